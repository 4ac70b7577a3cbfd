//! Direct contour evaluation of the local Gauss sum.
//!
//! With `γ = t^{c+a}` and `u = x₀ exp(L)`, `L = l₁t + … + l_f t^f`, the
//! integrand is `x₀^{λ₀−1} e^{λ(L)} e^{x₀ μ(exp L)} dx₀ dl₁ ⋯ dl_f` where
//! `μ_j = ν_{c+a−1−j}`. The `x₀` integral runs over a keyhole, `l_f` over a
//! clockwise Hankel contour in `s = κA` with `A = −μ(exp L)` and
//! `κ = −λ_f/μ_f`, and `l₁` (when `f = 2`) over a line rotated by `−arg(δ)/2`.
//!
//! Normalizations against the closed form, fiber scalar `ℓ = 1`:
//! unramified `λ₀ = n ≥ 1`: `Γ(n)/P` over a ray; unramified `n ≤ 0`: `A^n`;
//! tame: `1/P`; wild: `(e^{2πiλ₀} − 1)/P`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::exactalg::{rat_to_f64, LocalForm};
use crate::localeps::{CharacterData, Ramification};
use crate::periods::quad::{integrate, QuadResult};

const MAX_EVALS: usize = 200_000;
/// Offset used to step around integral `λ₀` in the wild case.
const STEP: f64 = 1.0 / 128.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleValue {
    /// The raw contour integral `P`.
    #[serde(serialize_with = "ser_c")]
    pub period: Complex64,
    pub period_err: f64,
    /// `τ` in the closed form's normalization.
    #[serde(serialize_with = "ser_c")]
    pub tau: Complex64,
    pub err: f64,
}

fn ser_c<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn i() -> Complex64 {
    Complex64::i()
}

/// `x^{e}` with `arg x = theta`.
fn pow_arg(r: f64, theta: f64, e: f64) -> Complex64 {
    Complex64::from_polar(r.powf(e), theta * e)
}

/// `∫ x^{λ−1} e^{−xA} dx` over the keyhole that starts along `arg x = −θ_A`
/// and turns once counter-clockwise, where `θ_A` is the chosen argument of `A`.
fn keyhole(lambda: f64, a_abs: f64, theta_a: f64, tol: f64) -> Result<QuadResult> {
    let th = -theta_a;
    let rho = 1.0 / a_abs;
    let t_max = (60.0 + 3.0 * lambda.abs()) / a_abs;
    let rays = |theta: f64| {
        move |r: f64| -> Complex64 {
            // e^{−xA} is real and decaying on this ray.
            pow_arg(r, theta, lambda - 1.0) * (-r * a_abs).exp() * Complex64::from_polar(1.0, theta)
        }
    };
    let scale = pow_arg(rho, 0.0, lambda).norm().max(1e-300);
    let t = tol * scale;
    let r_in = integrate(rays(th), rho, t_max, t, MAX_EVALS)?.scale(Complex64::new(-1.0, 0.0));
    let circle = integrate(
        |phi: f64| {
            let x = Complex64::from_polar(rho, phi);
            let log_x = Complex64::new(rho.ln(), phi);
            ((lambda - 1.0) * log_x - x * Complex64::from_polar(a_abs, theta_a)).exp() * i() * x
        },
        th,
        th + 2.0 * PI,
        t,
        MAX_EVALS,
    )?;
    let r_out = integrate(rays(th + 2.0 * PI), rho, t_max, t, MAX_EVALS)?;
    Ok(r_in + circle + r_out)
}

/// `∫ x^{n−1} e^{−xA} dx` along the ray `arg x = −θ_A`.
fn ray(n: f64, a_abs: f64, theta_a: f64, tol: f64) -> Result<QuadResult> {
    let th = -theta_a;
    let t_max = (60.0 + 3.0 * n.abs()) / a_abs;
    integrate(
        |r: f64| pow_arg(r, th, n - 1.0) * (-r * a_abs).exp() * Complex64::from_polar(1.0, th),
        0.0,
        t_max,
        tol * a_abs.powf(-n).max(1e-300),
        MAX_EVALS,
    )
}

/// Coefficients of `exp(L)` below `t^{f+1}` for `L = Σ_{j≥1} l_j t^j`.
fn exp_jet(l: &[Complex64]) -> Vec<Complex64> {
    let f = l.len() - 1;
    let mut e = vec![Complex64::zero(); f + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for k in 1..=f {
        let mut s = Complex64::zero();
        for j in 1..=k {
            s += l[j] * e[k - j] * j as f64;
        }
        e[k] = s / k as f64;
    }
    e
}

struct Wild {
    lam: Vec<f64>,
    mu: Vec<f64>,
    kappa: f64,
}

impl Wild {
    fn f(&self) -> usize {
        self.lam.len() - 1
    }

    /// Integrand over `s` on the Hankel contour for fixed `l₁ … l_{f−1}`,
    /// including the `x₀` keyhole value `K · A^{−λ₀}`.
    fn hankel_point(&self, outer: &[Complex64], s: Complex64, arg_s: f64, k: Complex64) -> Complex64 {
        let f = self.f();
        let mut l: Vec<Complex64> = vec![Complex64::zero()];
        l.extend_from_slice(outer);
        l.push(Complex64::zero());
        let e0 = exp_jet(&l);
        let a = s / self.kappa;
        let rest: Complex64 = e0[..=f].iter().zip(&self.mu[..=f]).map(|(e, m)| e * m).sum();
        l[f] = (-a - rest) / self.mu[f];
        let phase: Complex64 = l[1..=f].iter().zip(&self.lam[1..=f]).map(|(x, m)| x * m).sum();
        let arg_a = arg_s - if self.kappa < 0.0 { PI } else { 0.0 };
        let a_pow = Complex64::new(-self.lam[0] * a.norm().ln(), -self.lam[0] * arg_a).exp();
        // dl_f = ds / λ_f
        (phase.exp() * a_pow * k) / self.lam[f]
    }

    /// Clockwise Hankel contour: in along `arg s = π`, around `|s| = 1`, out along `arg s = −π`.
    fn hankel(&self, outer: &[Complex64], k: Complex64, tol: f64) -> Result<QuadResult> {
        let t_max = 60.0 + 4.0 * self.lam[0].abs();
        let upper = integrate(
            |r: f64| self.hankel_point(outer, Complex64::new(-r, 0.0), PI, k) * -1.0,
            1.0,
            t_max,
            tol,
            MAX_EVALS,
        )?;
        // ds = −dr along the upper side traversed inward
        let upper = upper.scale(Complex64::new(-1.0, 0.0));
        let circle = integrate(
            |th: f64| {
                let s = Complex64::from_polar(1.0, th);
                self.hankel_point(outer, s, th, k) * i() * s
            },
            PI,
            -PI,
            tol,
            MAX_EVALS,
        )?;
        let lower = integrate(
            |r: f64| self.hankel_point(outer, Complex64::new(-r, 0.0), -PI, k) * -1.0,
            1.0,
            t_max,
            tol,
            MAX_EVALS,
        )?;
        Ok(upper + circle + lower)
    }

    fn period(&self, tol: f64) -> Result<QuadResult> {
        let kq = keyhole(self.lam[0], 1.0, 0.0, tol)?;
        let k = kq.value;
        let scale = |r: &QuadResult| r.value.norm().max(1e-300);
        match self.f() {
            1 => {
                let coarse = self.hankel(&[], k, 1e-3 * k.norm())?;
                let mut r = self.hankel(&[], k, tol * scale(&coarse))?;
                r.err += kq.err / k.norm() * r.value.norm();
                Ok(r)
            }
            2 => {
                let delta = self.lam[2];
                let dir = Complex64::from_polar(1.0, if delta < 0.0 { -PI / 2.0 } else { 0.0 });
                let inner = |t: f64, tl: f64| self.hankel(&[dir * t], k, tl).map(|r| (r, r.value * dir));
                let peak = inner(0.0, 1e-4 * k.norm())?.1.norm().max(1e-300);
                let mut t_max = 1.0;
                while t_max < 1e3 {
                    let lo = inner(-t_max, 1e-3 * peak)?.1.norm();
                    let hi = inner(t_max, 1e-3 * peak)?.1.norm();
                    if lo.max(hi) < tol * peak * 1e-3 {
                        break;
                    }
                    t_max *= 1.5;
                }
                let inner_tol = tol * peak * 0.1;
                let failure = std::cell::RefCell::new(None);
                let worst = std::cell::Cell::new(0.0f64);
                let mut r = integrate(
                    |t: f64| match inner(t, inner_tol) {
                        Ok((q, v)) => {
                            worst.set(worst.get().max(q.err));
                            v
                        }
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            Complex64::zero()
                        }
                    },
                    -t_max,
                    t_max,
                    tol * peak,
                    MAX_EVALS,
                )?;
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                r.err += worst.get() * 2.0 * t_max + kq.err / k.norm() * r.value.norm();
                Ok(r)
            }
            f => Err(Error::Unsupported(format!("direct Gauss sum integral for conductor {f}"))),
        }
    }

    fn tau(&self, tol: f64) -> Result<OracleValue> {
        let p = self.period(tol)?;
        let norm = Complex64::from_polar(1.0, 2.0 * PI * self.lam[0]) - 1.0;
        let tau = norm / p.value;
        Ok(OracleValue { period: p.value, period_err: p.err, tau, err: tau.norm() * p.err / p.value.norm() })
    }
}

/// Numerical Gauss sum at relative tolerance `10^{−digits}`.
pub fn tau_numeric(chi: &CharacterData, nu: &LocalForm, digits: u32) -> Result<OracleValue> {
    if nu.center() != &chi.point {
        return Err(Error::CenterMismatch(Box::new((nu.center().clone(), chi.point.clone()))));
    }
    if chi.f > 2 {
        return Err(Error::Unsupported(format!("direct Gauss sum integral for conductor {}", chi.f)));
    }
    let tol = 10f64.powi(-(digits as i32));
    let c = nu.order()?;
    let a = chi.a as i64;
    let mu: Vec<f64> = (0..=chi.f as i64)
        .map(|j| nu.series.coeff(c + a - 1 - j).map(|q| rat_to_f64(&q)))
        .collect::<Result<_>>()?;
    let lam: Vec<f64> = chi.lambda_coeffs.iter().map(rat_to_f64).collect();
    match chi.ramification {
        Ramification::Unramified | Ramification::Tame => {
            let a_val = -mu[0];
            let (a_abs, theta_a) = (a_val.abs(), if a_val < 0.0 { -PI } else { 0.0 });
            if chi.ramification == Ramification::Tame {
                let p = keyhole(lam[0], a_abs, theta_a, tol)?;
                let tau = p.value.inv();
                return Ok(OracleValue { period: p.value, period_err: p.err, tau, err: tau.norm() * p.err / p.value.norm() });
            }
            let n = lam[0];
            if n >= 1.0 {
                let p = ray(n, a_abs, theta_a, tol)?;
                let tau = gamma(n) / p.value;
                Ok(OracleValue { period: p.value, period_err: p.err, tau, err: tau.norm() * p.err / p.value.norm() })
            } else {
                // The x₀ cycle collapses to the point u₀ = 1/A.
                let tau = Complex64::from_polar(a_abs.powf(n), theta_a * n);
                Ok(OracleValue { period: tau.inv(), period_err: 0.0, tau, err: tau.norm() * 1e-15 })
            }
        }
        Ramification::Wild => {
            let f = chi.f;
            let kappa = -lam[f] / mu[f];
            if !chi.lambda_coeffs[0].is_integer() {
                return Wild { lam, mu, kappa }.tau(tol);
            }
            // Both cycles degenerate at integral λ₀; τ is analytic in λ₀, so
            // extrapolate from symmetric means at steps h, 2h, 4h.
            let at = |d: f64| {
                let mut l = lam.clone();
                l[0] += d;
                Wild { lam: l, mu: mu.clone(), kappa }.tau(tol)
            };
            let mut sym = Vec::new();
            let mut qerr: f64 = 0.0;
            for k in [1.0, 2.0, 4.0] {
                let (p, m) = (at(k * STEP)?, at(-k * STEP)?);
                qerr = qerr.max(p.err).max(m.err);
                sym.push((p.tau + m.tau) / 2.0);
            }
            let r1 = (sym[0] * 4.0 - sym[1]) / 3.0;
            let r1b = (sym[1] * 4.0 - sym[2]) / 3.0;
            let best = (r1 * 16.0 - r1b) / 15.0;
            let err = (best - r1).norm() + qerr;
            Ok(OracleValue { period: (Complex64::from_polar(1.0, 2.0 * PI * lam[0]) - 1.0) / best, period_err: 0.0, tau: best, err })
        }
    }
}
