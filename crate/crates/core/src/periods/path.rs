//! Piecewise paths in C and integration of the dual flat section along them.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::exactalg::{rat_to_f64, Rat, RationalFunction};

use super::quad::{integrate, QuadResult};

const MAX_EVALS: usize = 400_000;

/// The multivalued function `Π (z − d)^{α_d} · e^{φ(z)}`, i.e. a flat section of
/// the dual connection.
#[derive(Clone, Debug)]
pub struct Section {
    pub points: Vec<Complex64>,
    pub alphas: Vec<f64>,
    pub exact_alphas: Vec<Rat>,
    pub phi: RationalFunction,
}

impl Section {
    pub fn of(c: &Connection) -> Section {
        let dec = c.decompose();
        let points = dec.residues.iter().map(|(d, _)| Complex64::new(rat_to_f64(d), 0.0)).collect();
        let alphas = dec.residues.iter().map(|(_, a)| rat_to_f64(a)).collect();
        let exact_alphas = dec.residues.iter().map(|(_, a)| a.clone()).collect();
        Section { points, alphas, exact_alphas, phi: dec.phi }
    }

    /// Principal logs of `z − d` for every finite point.
    pub fn principal_logs(&self, z: Complex64) -> Vec<Complex64> {
        self.points.iter().map(|d| (z - d).ln()).collect()
    }

    /// Continue the logs from `z0` (where they are `logs`) to `z`, assuming
    /// the argument of each `z − d` moves by less than `π` on the way.
    pub fn continue_logs(&self, logs: &[Complex64], z0: Complex64, z: Complex64) -> Vec<Complex64> {
        self.points.iter().zip(logs).map(|(d, l)| l + ((z - d) / (z0 - d)).ln()).collect()
    }

    /// `log` of the section at `z` on the branch fixed by `logs`.
    pub fn log_value(&self, logs: &[Complex64], z: Complex64) -> Complex64 {
        let mut e = self.phi.eval_c(z);
        for (a, l) in self.alphas.iter().zip(logs) {
            e += l * *a;
        }
        e
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Segment {
    Line { from: [f64; 2], to: [f64; 2] },
    /// Arc of angle at most `π/2`.
    Arc { center: [f64; 2], radius: f64, from_angle: f64, to_angle: f64 },
    /// Half-line `from + t e^{iθ}` with `t ≥ 0` into a decay sector at infinity.
    RayOut { from: [f64; 2], angle: f64 },
    /// Radial segment ending at a wild point, approached inside a decay sector.
    RayIn { from: [f64; 2], to: [f64; 2] },
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn pt(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl Segment {
    pub fn start(&self) -> Complex64 {
        match self {
            Segment::Line { from, .. } | Segment::RayOut { from, .. } | Segment::RayIn { from, .. } => c(*from),
            Segment::Arc { center, radius, from_angle, .. } => c(*center) + Complex64::from_polar(*radius, *from_angle),
        }
    }

    /// End point; `None` for a ray to infinity.
    pub fn end(&self) -> Option<Complex64> {
        match self {
            Segment::Line { to, .. } | Segment::RayIn { to, .. } => Some(c(*to)),
            Segment::Arc { center, radius, to_angle, .. } => Some(c(*center) + Complex64::from_polar(*radius, *to_angle)),
            Segment::RayOut { .. } => None,
        }
    }

    /// Point and derivative at parameter `t`.
    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        match self {
            Segment::Line { from, to } | Segment::RayIn { from, to } => {
                let (a, b) = (c(*from), c(*to));
                (a + (b - a) * t, b - a)
            }
            Segment::Arc { center, radius, from_angle, to_angle } => {
                let th = from_angle + (to_angle - from_angle) * t;
                let u = Complex64::from_polar(*radius, th);
                (c(*center) + u, u * Complex64::i() * (to_angle - from_angle))
            }
            Segment::RayOut { from, angle } => {
                let dir = Complex64::from_polar(1.0, *angle);
                (c(*from) + dir * t, dir)
            }
        }
    }
}

/// Arcs around `center` from `a0` to `a1`, split into pieces of at most `π/2`.
pub fn arcs(center: Complex64, radius: f64, a0: f64, a1: f64) -> Vec<Segment> {
    let n = ((a1 - a0).abs() / FRAC_PI_2).ceil().max(0.0) as usize;
    (0..n)
        .map(|k| {
            let s = a0 + (a1 - a0) * k as f64 / n as f64;
            let e = a0 + (a1 - a0) * (k + 1) as f64 / n as f64;
            Segment::Arc { center: pt(center), radius, from_angle: s, to_angle: e }
        })
        .collect()
}

/// Signed angle from `a0` to `a1` reduced to `(−π, π]`.
pub fn shortest_turn(a0: f64, a1: f64) -> f64 {
    let mut d = (a1 - a0) % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// A path starting at `base`, where the section takes its principal branch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSpec {
    pub base: [f64; 2],
    pub segments: Vec<Segment>,
}

impl PathSpec {
    pub fn new(base: Complex64, segments: Vec<Segment>) -> Result<PathSpec> {
        let mut at = base;
        for (k, s) in segments.iter().enumerate() {
            if (s.start() - at).norm() > 1e-9 * (1.0 + at.norm()) {
                return Err(Error::BranchDiscontinuity(format!("segment {k} starts at {} but path is at {at}", s.start())));
            }
            match s.end() {
                Some(e) => at = e,
                None if k + 1 != segments.len() => {
                    return Err(Error::BranchDiscontinuity("ray to infinity must be last".into()))
                }
                None => {}
            }
            if matches!(s, Segment::RayIn { .. }) && k + 1 != segments.len() {
                return Err(Error::BranchDiscontinuity("ray into a pole must be last".into()));
            }
        }
        Ok(PathSpec { base: pt(base), segments })
    }

    pub fn base(&self) -> Complex64 {
        c(self.base)
    }

    /// Logs of `z − d` at the end of the path (on the continued branch).
    pub fn end_logs(&self, sec: &Section) -> Result<(Complex64, Vec<Complex64>)> {
        let mut z = self.base();
        let mut logs = sec.principal_logs(z);
        for s in &self.segments {
            let (nz, nl) = walk(sec, s, z, &logs)?;
            z = nz;
            logs = nl;
        }
        Ok((z, logs))
    }

    /// `∫ s(z) g(z) dz` along the path, to absolute tolerance about `tol`.
    pub fn integrate<G: Fn(Complex64) -> Complex64>(&self, sec: &Section, g: &G, tol: f64) -> Result<QuadResult> {
        let mut z = self.base();
        let mut logs = sec.principal_logs(z);
        let mut total = QuadResult::zero();
        let per = tol / self.segments.len().max(1) as f64;
        for s in &self.segments {
            total = total + integrate_segment(sec, s, z, &logs, g, per)?;
            if s.end().is_some() {
                let (nz, nl) = walk(sec, s, z, &logs)?;
                z = nz;
                logs = nl;
            }
        }
        Ok(total)
    }
}

/// Continue the branch across one segment, in small steps so that no argument
/// jumps by `π` or more.
fn walk(sec: &Section, s: &Segment, z0: Complex64, logs: &[Complex64]) -> Result<(Complex64, Vec<Complex64>)> {
    let Some(_) = s.end() else {
        return Ok((z0, logs.to_vec()));
    };
    let steps = 16;
    let mut z = z0;
    let mut l = logs.to_vec();
    for k in 1..=steps {
        let t = k as f64 / steps as f64;
        let t = if matches!(s, Segment::RayIn { .. }) { t.min(1.0 - 1e-9) } else { t };
        let (nz, _) = s.eval(t);
        for d in &sec.points {
            if (nz - d).norm() < 1e-14 && !matches!(s, Segment::RayIn { .. }) {
                return Err(Error::PathHitsSingularity(format!("path passes through {d}")));
            }
        }
        l = sec.continue_logs(&l, z, nz);
        z = nz;
    }
    Ok((z, l))
}

fn integrate_segment<G: Fn(Complex64) -> Complex64>(
    sec: &Section,
    s: &Segment,
    z0: Complex64,
    logs: &[Complex64],
    g: &G,
    tol: f64,
) -> Result<QuadResult> {
    let f = |t: f64| -> Complex64 {
        let (z, dz) = s.eval(t);
        let e = sec.log_value(&sec.continue_logs(logs, z0, z), z);
        if e.re < -740.0 {
            return Complex64::new(0.0, 0.0);
        }
        e.exp() * g(z) * dz
    };
    match s {
        Segment::Line { .. } | Segment::Arc { .. } => integrate(f, 0.0, 1.0, tol, MAX_EVALS),
        Segment::RayOut { .. } => {
            let mut peak = f(0.0).norm();
            let mut t = 1.0;
            loop {
                let v = f(t).norm();
                peak = peak.max(v);
                if v * t < tol * 1e-3 && f(2.0 * t).norm() <= v {
                    break;
                }
                t *= 2.0;
                if t > 1e6 {
                    return Err(Error::PrecisionUnreachable("ray integrand does not decay".into()));
                }
            }
            let mut r = integrate(&f, 0.0, t, tol, MAX_EVALS)?;
            r.err += f(t).norm() * t;
            Ok(r)
        }
        Segment::RayIn { .. } => {
            let mut eps = 0.5f64;
            loop {
                let v = f(1.0 - eps).norm();
                if v * eps < tol * 1e-3 {
                    break;
                }
                eps *= 0.5;
                if eps < 1e-12 {
                    return Err(Error::PrecisionUnreachable("integrand does not decay into the pole".into()));
                }
            }
            let mut r = integrate(&f, 0.0, 1.0 - eps, tol, MAX_EVALS)?;
            r.err += f(1.0 - eps).norm() * eps;
            Ok(r)
        }
    }
}
