//! Twisted cycles with rapid-decay ends.
//!
//! Generators are paths from a base point `b`: a loop around each finite
//! singular point (all but one when infinity is not singular) and one ray per
//! decay sector of every irregular point. A combination is a cycle when its
//! boundary at `b` vanishes; loops contribute `e^{2πiα} − 1`, rays `−1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::exactalg::{rat_to_f64, Point};

use super::path::{arcs, pt, shortest_turn, PathSpec, Section, Segment};

#[derive(Clone, Debug, Default)]
pub struct CycleOptions {
    /// Override the automatically chosen base point.
    pub base: Option<Complex64>,
    /// Multiplies every small circle radius.
    pub radius_scale: Option<f64>,
    /// Multiplies the radius of the large circle.
    pub outer_scale: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Generator {
    pub label: String,
    pub path: PathSpec,
    /// Coefficient of `[b]` in the boundary.
    #[serde(serialize_with = "ser_c")]
    pub boundary: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cycle {
    pub label: String,
    /// `(weight, generator index)`
    #[serde(serialize_with = "ser_terms")]
    pub terms: Vec<(Complex64, usize)>,
}

fn ser_c<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    [z.re, z.im].serialize(s)
}

fn ser_terms<S: serde::Serializer>(t: &[(Complex64, usize)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    t.iter().map(|(w, i)| ([w.re, w.im], *i)).collect::<Vec<_>>().serialize(s)
}

#[derive(Clone, Debug)]
pub struct CycleSystem {
    pub section: Section,
    pub base: Complex64,
    pub generators: Vec<Generator>,
    pub cycles: Vec<Cycle>,
}

struct Local {
    z: Complex64,
    radius: f64,
    /// Decay directions, empty for tame points.
    rays: Vec<f64>,
}

/// Distance from `p` to the segment `[a, b]`.
fn seg_dist(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / l2).clamp(0.0, 1.0);
    (a + ab * t - p).norm()
}

pub fn build_cycles(c: &Connection, opts: &CycleOptions) -> Result<CycleSystem> {
    let sec = Section::of(c);
    let dec = c.decompose();
    let n = sec.points.len();
    let rscale = opts.radius_scale.unwrap_or(1.0);

    let mut locals = Vec::with_capacity(n);
    for (i, (_, polar)) in dec.phi_polar.iter().enumerate() {
        let z = sec.points[i];
        let dist = sec
            .points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, w)| (w - z).norm())
            .fold(f64::INFINITY, f64::min);
        let p = polar.iter().rposition(|x| !x.is_zero()).map(|k| k + 1).unwrap_or(0);
        let (radius, rays) = if p == 0 {
            ((dist / 4.0).min(0.25), vec![])
        } else {
            let lead = rat_to_f64(&polar[p - 1]);
            let ac = if lead < 0.0 { PI } else { 0.0 };
            let natural = lead.abs().powf(1.0 / p as f64).max(1.0);
            let rays = (0..p).map(|k| (ac - PI - 2.0 * PI * k as f64) / p as f64).collect();
            ((0.4 * dist).min(natural), rays)
        };
        locals.push(Local { z, radius: radius * rscale, rays });
    }

    let p_inf = dec.phi_poly.degree().unwrap_or(0);
    let inf_rays: Vec<f64> = if p_inf >= 1 {
        let lead = rat_to_f64(&dec.phi_poly.lead());
        let ac = if lead < 0.0 { PI } else { 0.0 };
        (0..p_inf).map(|k| (PI - ac + 2.0 * PI * k as f64) / p_inf as f64).collect()
    } else {
        vec![]
    };
    let reach = locals.iter().map(|l| l.z.norm() + l.radius).fold(0.0, f64::max);
    let big_r = (2.0 * reach).max(1.0) * opts.outer_scale.unwrap_or(1.0);

    let ok_base = |b: Complex64| -> bool {
        if b.norm() >= 0.9 * big_r {
            return false;
        }
        for l in &locals {
            if (b - l.z).norm() < 1.5 * l.radius {
                return false;
            }
        }
        for (i, l) in locals.iter().enumerate() {
            let e = l.z + (b - l.z) / (b - l.z).norm() * l.radius;
            for (j, m) in locals.iter().enumerate() {
                if i != j && seg_dist(b, e, m.z) < 1.2 * m.radius {
                    return false;
                }
            }
        }
        if !inf_rays.is_empty() {
            let out = Complex64::from_polar(big_r, b.arg());
            for m in &locals {
                if seg_dist(b, out, m.z) < 1.2 * m.radius {
                    return false;
                }
            }
        }
        true
    };
    let base = match opts.base {
        Some(b) => {
            if !ok_base(b) {
                return Err(Error::PathHitsSingularity(format!("base point {b} is too close to a singular point")));
            }
            b
        }
        None => (1..2000)
            .map(|k| {
                let fr = |x: f64| x - x.floor();
                let psi = 2.0 * PI * fr(k as f64 * 0.618_033_988_75 + 0.123);
                let rho = big_r * (0.15 + 0.7 * fr(k as f64 * 0.754_877_666_2 + 0.31));
                Complex64::from_polar(rho, psi)
            })
            .find(|b| ok_base(*b))
            .ok_or_else(|| Error::PathHitsSingularity("no admissible base point".into()))?,
    };

    let mut generators = Vec::new();
    let inf_singular = c.is_singular(&Point::Infinity);
    let loop_count = if inf_singular { n } else { n.saturating_sub(1) };
    let entry = |l: &Local| -> (Complex64, f64) {
        let ang = (base - l.z).arg();
        (l.z + Complex64::from_polar(l.radius, ang), ang)
    };
    for (i, l) in locals.iter().enumerate().take(loop_count) {
        let (e, ang) = entry(l);
        let mut segs = vec![Segment::Line { from: pt(base), to: pt(e) }];
        segs.extend(arcs(l.z, l.radius, ang, ang + 2.0 * PI));
        segs.push(Segment::Line { from: pt(e), to: pt(base) });
        let boundary = if sec.exact_alphas[i].is_integer() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(1.0, 2.0 * PI * sec.alphas[i]) - 1.0
        };
        generators.push(Generator {
            label: format!("loop({})", dec.residues[i].0),
            path: PathSpec::new(base, segs)?,
            boundary,
        });
    }
    for (i, l) in locals.iter().enumerate() {
        let (e, ang) = entry(l);
        for (k, th) in l.rays.iter().enumerate() {
            let turn = shortest_turn(ang, *th);
            let mut segs = vec![Segment::Line { from: pt(base), to: pt(e) }];
            segs.extend(arcs(l.z, l.radius, ang, ang + turn));
            let from = l.z + Complex64::from_polar(l.radius, ang + turn);
            segs.push(Segment::RayIn { from: pt(from), to: pt(l.z) });
            generators.push(Generator {
                label: format!("ray({}, {k})", dec.residues[i].0),
                path: PathSpec::new(base, segs)?,
                boundary: Complex64::new(-1.0, 0.0),
            });
        }
    }
    let ang = base.arg();
    for (k, th) in inf_rays.iter().enumerate() {
        let out = Complex64::from_polar(big_r, ang);
        let turn = shortest_turn(ang, *th);
        let mut segs = vec![Segment::Line { from: pt(base), to: pt(out) }];
        segs.extend(arcs(Complex64::new(0.0, 0.0), big_r, ang, ang + turn));
        segs.push(Segment::RayOut { from: pt(Complex64::from_polar(big_r, ang + turn)), angle: ang + turn });
        generators.push(Generator {
            label: format!("ray(inf, {k})"),
            path: PathSpec::new(base, segs)?,
            boundary: Complex64::new(-1.0, 0.0),
        });
    }

    let cycles = kernel(&generators);
    Ok(CycleSystem { section: sec, base, generators, cycles })
}

/// Basis of the boundary kernel, pivoting on the last generator with a
/// nonzero boundary coefficient.
fn kernel(gens: &[Generator]) -> Vec<Cycle> {
    let pivot = gens.iter().rposition(|g| g.boundary.norm() > 0.0);
    gens.iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != pivot)
        .map(|(i, g)| {
            let mut terms = vec![(Complex64::new(1.0, 0.0), i)];
            let mut label = g.label.clone();
            if let Some(p) = pivot {
                if g.boundary.norm() > 0.0 {
                    let w = -g.boundary / gens[p].boundary;
                    terms.push((w, p));
                    label = format!("{} + w*{}", g.label, gens[p].label);
                }
            }
            Cycle { label, terms }
        })
        .collect()
}

impl CycleSystem {
    /// `∫_γ s(z) g(z) dz` for cycle `k`.
    pub fn integrate<G: Fn(Complex64) -> Complex64>(
        &self,
        k: usize,
        g: &G,
        tol: f64,
    ) -> Result<super::quad::QuadResult> {
        let cyc = &self.cycles[k];
        let mut out = super::quad::QuadResult::zero();
        let wsum: f64 = cyc.terms.iter().map(|(w, _)| w.norm()).sum();
        for (w, i) in &cyc.terms {
            let r = self.generators[*i].path.integrate(&self.section, g, tol / wsum.max(1e-300))?;
            out = out + r.scale(*w);
        }
        Ok(out)
    }

    /// Boundary of cycle `k` at the base point; zero up to rounding.
    pub fn boundary(&self, k: usize) -> Complex64 {
        self.cycles[k].terms.iter().map(|(w, i)| w * self.generators[*i].boundary).sum()
    }
}
