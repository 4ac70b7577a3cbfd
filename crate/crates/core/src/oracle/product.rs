//! End-to-end check of the product formula.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::connection::Connection;
use crate::derham::DeRham;
use crate::error::{Error, Result};
use crate::exactalg::{fmt_rat, rat_to_f64, Point, Rat, RationalFunction};
use crate::lines::{rational_reconstruct, GradedLine, SymbolicComplex};
use crate::localeps::{global_ell, local_report, FiberNormalization};
use crate::periods::{period_matrix, CycleOptions};

/// Order `c_x(ν)` of `ν dz` at every point where it is nonzero or `L` is singular.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointDegree {
    pub point: Point,
    pub singular: bool,
    pub c: i64,
    pub a: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeCheck {
    pub points: Vec<PointDegree>,
    /// `Σ c_x(ν)` including zeros and poles of `ν` at irrational points.
    pub sum_c: i64,
    /// Degree of `ν` carried by zeros and poles at irrational points.
    pub irrational_c: i64,
    /// `Σ (−c_x − a_x)`
    pub total_degree: i64,
    pub h0: usize,
    pub h1: usize,
    pub pass: bool,
}

/// Exact bookkeeping: `Σ c_x = −2` and `Σ(−c_x − a_x) = −(h¹ − h⁰)`.
pub fn degree_check(c: &Connection, nu: &RationalFunction) -> Result<DegreeCheck> {
    if nu.is_zero() {
        return Err(Error::ZeroSeries);
    }
    let prof = c.profile();
    let mut pts: Vec<Point> = c.singular_points().to_vec();
    let (num_roots, num_rest) = nu.num().rational_roots();
    let (den_roots, den_rest) = nu.den().rational_roots();
    for r in num_roots.iter().chain(&den_roots) {
        let p = Point::Finite(r.clone());
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    if !pts.contains(&Point::Infinity) {
        pts.push(Point::Infinity);
    }
    pts.sort();
    let mut points = Vec::new();
    for p in pts {
        let ord = nu.order_at(&p).unwrap();
        let cx = if p.is_infinity() { ord - 2 } else { ord };
        let singular = c.is_singular(&p);
        let a = prof.iter().find(|q| q.point == p).map(|q| q.a as i64).unwrap_or(0);
        if cx != 0 || singular {
            points.push(PointDegree { point: p, singular, c: cx, a });
        }
    }
    let irrational = num_rest.degree().unwrap_or(0) as i64 - den_rest.degree().unwrap_or(0) as i64;
    let sum_c = points.iter().map(|p| p.c).sum::<i64>() + irrational;
    let total_degree = points.iter().map(|p| -p.c - p.a).sum::<i64>() - irrational;
    let dr = DeRham::new(c)?;
    let h0 = dr.h0_dim();
    let h1 = dr.h1_basis().len();
    let pass = sum_c == -2 && total_degree == -(h1 as i64 - h0 as i64);
    Ok(DegreeCheck { points, sum_c, irrational_c: irrational, total_degree, h0, h1, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    pub chi: i64,
    pub degree_check: bool,
    pub degrees: DegreeCheck,
    #[serde(serialize_with = "ser_c")]
    pub lhs: Complex64,
    pub lhs_err: f64,
    #[serde(serialize_with = "ser_c")]
    pub rhs: Complex64,
    #[serde(skip)]
    pub rhs_symbolic: GradedLine,
    #[serde(serialize_with = "ser_c")]
    pub ratio: Complex64,
    /// Power of `i` removed from the ratio before reconstruction.
    pub phase_quarter_turns: u8,
    #[serde(serialize_with = "ser_opt_rat")]
    pub rational_part: Option<Rat>,
    pub pass: bool,
    /// Smallest `|k| ≤ 8` for which `ratio / (2πi)^k` reconstructs to a
    /// rational up to a power of `i`, with that rational. Diagnostic only.
    pub two_pi_i_excess: Option<(i64, String)>,
}

fn ser_c<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_opt_rat<S: serde::Serializer>(r: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(q) => s.serialize_str(&fmt_rat(q)),
        None => s.serialize_str("undetermined unit"),
    }
}

impl ProductReport {
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).unwrap();
        v["rhs_atoms"] = json!(self.rhs_symbolic.to_json());
        v
    }
}

/// `(2πi) ⊗ ⊗_x (2πi)^{c_x} τ(𝓛_x)` with fibers normalized at `anchor`.
pub fn product_rhs(c: &Connection, nu: &RationalFunction, anchor: &Rat, omit_m_units: bool) -> Result<GradedLine> {
    let deg = degree_check(c, nu)?;
    let dec = c.decompose();
    let norm = FiberNormalization::Global { anchor: anchor.clone() };
    let mut out = GradedLine::new(0, SymbolicComplex::two_pi_i_pow(1));
    for p in &deg.points {
        let local = if p.singular {
            let rep = local_report(c, &p.point, nu, &norm, omit_m_units)?;
            GradedLine::new(-p.c - p.a, rep.tau.value.mul(&SymbolicComplex::two_pi_i_pow(p.c)))
        } else {
            let ell = global_ell(c, &dec, &p.point, anchor)?;
            GradedLine::new(-p.c, ell.pow(-p.c).mul(&SymbolicComplex::two_pi_i_pow(p.c)))
        };
        out = out.tensor(&local);
    }
    Ok(out)
}

/// Value at `anchor` of the dual section used by the periods, continued from the base point.
fn section_at_anchor(sys: &crate::periods::CycleSystem, anchor: &Rat) -> Result<Complex64> {
    let z = Complex64::new(rat_to_f64(anchor), 0.0);
    let sec = &sys.section;
    for d in &sec.points {
        let dist_line = {
            let (a, b) = (sys.base, z);
            let ab = b - a;
            let t = (((d - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
            (a + ab * t - d).norm()
        };
        if dist_line < 1e-9 {
            return Err(Error::PathHitsSingularity(format!("segment from base point to anchor meets {d}")));
        }
    }
    let logs0 = sec.principal_logs(sys.base);
    let steps = 64;
    let mut logs = logs0;
    let mut at = sys.base;
    for k in 1..=steps {
        let next = sys.base + (z - sys.base) * (k as f64 / steps as f64);
        logs = sec.continue_logs(&logs, at, next);
        at = next;
    }
    Ok(sec.log_value(&logs, z).exp())
}

pub fn product_check(c: &Connection, nu: &RationalFunction, digits: u32, anchor: &Rat, omit_m_units: bool) -> Result<ProductReport> {
    let degrees = degree_check(c, nu)?;
    if degrees.irrational_c != 0 || has_irrational_roots(nu) {
        return Err(Error::Unsupported("ν has zeros or poles at irrational points".into()));
    }
    let chi = c.euler_char()?;
    let pm = period_matrix(c, digits, &CycleOptions::default())?;
    let (det, det_err) = pm.determinant();
    // Normalize the dual section to 1 at the anchor, as the fibers are.
    let s_anchor = section_at_anchor(&pm.cycles, anchor)?;
    let lhs = det / s_anchor.powi(chi as i32);
    let lhs_err = det_err / s_anchor.norm().powi(chi as i32);
    let rhs_symbolic = product_rhs(c, nu, anchor, omit_m_units)?;
    let rhs = rhs_symbolic.value.eval()?.value();
    let ratio = lhs / rhs;
    let tol = 10f64.powi(1 - digits as i32).max(lhs_err / lhs.norm());
    let (quarter, rational_part) = reconstruct_up_to_i(ratio, tol);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    // Many powers are tried, so use the computed error rather than the requested tolerance.
    let diag_tol = (10.0 * lhs_err / lhs.norm()).max(1e-13);
    let two_pi_i_excess = [0i64, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6, 7, -7, 8, -8]
        .iter()
        .find_map(|&k| reconstruct_up_to_i(ratio / two_pi_i.powi(k as i32), diag_tol).1.map(|q| (k, fmt_rat(&q))));
    let degree_ok = degrees.pass;
    Ok(ProductReport {
        chi,
        degree_check: degree_ok,
        degrees,
        lhs,
        lhs_err,
        rhs,
        rhs_symbolic,
        ratio,
        phase_quarter_turns: quarter,
        pass: degree_ok && rational_part.is_some(),
        rational_part,
        two_pi_i_excess,
    })
}

const MAX_HEIGHT: u64 = 1000;

/// Remove the nearest power of `i`, then reconstruct a rational of height ≤ 1000.
fn reconstruct_up_to_i(x: Complex64, tol: f64) -> (u8, Option<Rat>) {
    let quarter = ((x.arg() / (PI / 2.0)).round().rem_euclid(4.0)) as u8;
    let unphased = x * Complex64::i().powi(-(quarter as i32));
    let q = rational_reconstruct(unphased, MAX_HEIGHT, tol * unphased.norm())
        .filter(|q| !q.is_zero() && q.numer().magnitude() <= &MAX_HEIGHT.into());
    (quarter, q)
}

fn has_irrational_roots(nu: &RationalFunction) -> bool {
    let deg = |p: &crate::exactalg::Poly| p.degree().unwrap_or(0);
    deg(&nu.num().rational_roots().1) > 0 || deg(&nu.den().rational_roots().1) > 0
}
