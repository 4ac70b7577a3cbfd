//! Numerical periods: pairing twisted cycles with the de Rham basis.

pub mod cycles;
pub mod path;
pub mod quad;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::connection::Connection;
use crate::derham::{DeRham, TwistedForm};
use crate::error::{Error, Result};

pub use cycles::{build_cycles, Cycle, CycleOptions, CycleSystem, Generator};
pub use path::{PathSpec, Section, Segment};
pub use quad::QuadResult;

/// `P[i][j] = ∫_{γ_i} s · ω_j` with absolute error estimates.
#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    pub basis: Vec<TwistedForm>,
    pub cycles: CycleSystem,
    pub entries: Vec<Vec<Complex64>>,
    pub errors: Vec<Vec<f64>>,
}

/// Relative tolerance `10^{-digits}` for the quadrature.
pub fn tolerance(digits: u32) -> f64 {
    10f64.powi(-(digits as i32))
}

pub fn period_matrix(c: &Connection, digits: u32, opts: &CycleOptions) -> Result<PeriodMatrix> {
    let dr = DeRham::new(c)?;
    let h0 = dr.h0_dim();
    if h0 != 0 {
        return Err(Error::NonzeroH0(h0));
    }
    let basis = dr.h1_basis();
    let sys = build_cycles(c, opts)?;
    if sys.cycles.len() != basis.len() {
        return Err(Error::CycleCountMismatch { cycles: sys.cycles.len(), h1: basis.len() });
    }
    let tol = tolerance(digits);
    let n = basis.len();
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let results: Vec<Result<QuadResult>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let f = &basis[j].coeff;
            let g = |z: Complex64| f.eval_c(z);
            // A coarse pass fixes the scale for the absolute tolerance.
            let coarse = sys.integrate(i, &g, 1e-4)?;
            let scale = coarse.value.norm().max(1e-300);
            sys.integrate(i, &g, tol * scale * 0.1)
        })
        .collect();
    let mut entries = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut errors = vec![vec![0.0; n]; n];
    for ((i, j), r) in cells.into_iter().zip(results) {
        let r = r?;
        entries[i][j] = r.value;
        errors[i][j] = r.err;
    }
    Ok(PeriodMatrix { basis, cycles: sys, entries, errors })
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm())).unwrap();
        if a[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            let (top, rest) = a.split_at_mut(r);
            for (x, v) in rest[0][k..].iter_mut().zip(&top[k][k..]) {
                *x -= f * v;
            }
        }
    }
    det
}

fn minor(m: &[Vec<Complex64>], i: usize, j: usize) -> Vec<Vec<Complex64>> {
    m.iter()
        .enumerate()
        .filter(|(r, _)| *r != i)
        .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
        .collect()
}

impl PeriodMatrix {
    /// Determinant and a first-order error bound from the cofactors.
    pub fn determinant(&self) -> (Complex64, f64) {
        let d = determinant(&self.entries);
        let n = self.entries.len();
        let mut err = 0.0;
        for i in 0..n {
            for j in 0..n {
                let cof = if n == 1 { Complex64::new(1.0, 0.0) } else { determinant(&minor(&self.entries, i, j)) };
                err += cof.norm() * self.errors[i][j];
            }
        }
        (d, err + d.norm() * 1e-15 * n as f64)
    }

    pub fn to_json(&self) -> Value {
        let (d, e) = self.determinant();
        json!({
            "basis": self.basis.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "cycles": self.cycles.cycles.iter().map(|c| c.label.clone()).collect::<Vec<_>>(),
            "generators": self.cycles.generators,
            "entries": self.entries.iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "errors": self.errors,
            "determinant": [d.re, d.im],
            "determinant_err": e,
        })
    }
}

/// `det ∫_{γ_i} s ω_j` with its error bound.
pub fn period_determinant(c: &Connection, digits: u32) -> Result<(Complex64, f64)> {
    Ok(period_matrix(c, digits, &CycleOptions::default())?.determinant())
}

/// Nested quadrature of `∫_{γ} ∫_{η} s₁(z) s₂(w) g(z, w) dw dz`, where `γ` is
/// cycle `i` of `a` and `η` cycle `j` of `b`.
pub fn integrate_product<G: Fn(Complex64, Complex64) -> Complex64>(
    a: &CycleSystem,
    i: usize,
    b: &CycleSystem,
    j: usize,
    g: &G,
    tol: f64,
) -> Result<QuadResult> {
    let inner_err = std::cell::Cell::new(0.0f64);
    let failure = std::cell::RefCell::new(None);
    let outer = |z: Complex64| -> Complex64 {
        match b.integrate(j, &|w| g(z, w), tol) {
            Ok(r) => {
                inner_err.set(inner_err.get().max(r.err));
                r.value
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let mut r = a.integrate(i, &outer, tol)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    r.err += inner_err.get();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_small() {
        let m = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 1.0)],
        ];
        assert!((determinant(&m) - Complex64::new(-2.0, 1.0)).norm() < 1e-14);
    }
}
