use num_complex::Complex64;

use crate::exactalg::{rat, Rat};

/// Best rational approximation `p/q` with `q ≤ max_denominator` from the
/// continued fraction of the real part, accepted only within `tol`.
pub fn rational_reconstruct(x: Complex64, max_denominator: u64, tol: f64) -> Option<Rat> {
    if !x.is_finite() || x.im.abs() > tol * x.norm().max(f64::MIN_POSITIVE) {
        return None;
    }
    let target = x.re;
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut y = target;
    let mut best: Option<Rat> = None;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e18 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_denominator as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (target - approx).abs() <= tol {
            best = Some(rat(h1 as i64, k1 as i64));
            break;
        }
        let r = y - a;
        if r.abs() < 1e-300 {
            break;
        }
        y = 1.0 / r;
    }
    best
}
