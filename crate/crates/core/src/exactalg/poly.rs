//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{rat, rat_to_f64, Rat};

/// Coefficients are stored lowest degree first, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    /// The variable `z`.
    pub fn x() -> Self {
        Poly::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * z^n`
    pub fn monomial(c: Rat, n: usize) -> Self {
        let mut v = vec![Rat::zero(); n + 1];
        v[n] = c;
        Poly::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Poly::from_coeffs(cs.iter().map(|&c| rat(c, 1)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&(Rat::one() / self.lead()))
    }

    /// Multiply by `z^n`.
    pub fn shift_up(&self, n: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rat::zero(); n];
        v.extend(self.coeffs.iter().cloned());
        Poly::from_coeffs(v)
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv_lead = Rat::one() / d.lead();
        let mut q = vec![Rat::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &inv_lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = &r[i + j] - &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64, 1))
                .collect(),
        )
    }

    /// Termwise antiderivative with zero constant term.
    pub fn integral(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rat::zero()];
        v.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c / rat(i as i64 + 1, 1)),
        );
        Poly::from_coeffs(v)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + rat_to_f64(c))
    }

    /// `p(z + a)` as a polynomial in `z`.
    pub fn taylor_shift(&self, a: &Rat) -> Poly {
        let mut out: Vec<Rat> = Vec::new();
        for c in self.coeffs.iter().rev() {
            // out = out * (z + a) + c
            let mut next = vec![Rat::zero(); out.len() + 1];
            for (i, o) in out.iter().enumerate() {
                next[i + 1] = &next[i + 1] + o;
                next[i] = &next[i] + o * a;
            }
            next[0] = &next[0] + c;
            out = next;
        }
        Poly::from_coeffs(out)
    }

    /// Coefficients in reverse order: `z^deg p(1/z)`.
    pub fn reversed(&self) -> Poly {
        let mut v = self.coeffs.clone();
        v.reverse();
        Poly::from_coeffs(v)
    }

    /// Multiplicity of `a` as a root.
    pub fn root_multiplicity(&self, a: &Rat) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let root = Poly::from_coeffs(vec![-a.clone(), Rat::one()]);
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = p.div_rem(&root);
            if !r.is_zero() {
                return m;
            }
            m += 1;
            p = q;
        }
    }

    /// Distinct rational roots (ascending) and the cofactor left after removing
    /// them with multiplicity. Candidates come from numerically located roots and
    /// are confirmed exactly.
    pub fn rational_roots(&self) -> (Vec<Rat>, Poly) {
        let mut roots = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return (roots, self.clone());
        }
        let sqfree = {
            let g = self.gcd(&self.derivative());
            self.div_rem(&g).0.monic()
        };
        let int_poly = sqfree.clear_denominators();
        let lead = int_poly.last().cloned().unwrap_or_else(BigInt::one).abs();
        let lead_u = lead.to_u64().unwrap_or(u64::MAX);
        let mut rest = self.clone();
        for z in sqfree.numeric_roots() {
            if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                continue;
            }
            // Rational root theorem: denominator divides the leading coefficient.
            let mut found = None;
            for cand in approx_rationals(z.re, lead_u) {
                if (rat_to_f64(&cand) - z.re).abs() > 1e-6 * (1.0 + z.re.abs()) {
                    continue;
                }
                if sqfree.eval(&cand).is_zero() {
                    found = Some(cand);
                    break;
                }
            }
            if let Some(r) = found {
                if !roots.contains(&r) {
                    let m = rest.root_multiplicity(&r);
                    let lin = Poly::from_coeffs(vec![-r.clone(), Rat::one()]);
                    for _ in 0..m {
                        rest = rest.div_rem(&lin).0;
                    }
                    roots.push(r);
                }
            }
        }
        roots.sort();
        (roots, rest)
    }

    /// Integer coefficients with the same roots (primitive, positive lead not enforced).
    fn clear_denominators(&self) -> Vec<BigInt> {
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        self.coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(l.clone())).to_integer())
            .collect()
    }

    /// Durand-Kerner iteration on the monic polynomial.
    fn numeric_roots(&self) -> Vec<Complex64> {
        let n = match self.degree() {
            Some(n) if n > 0 => n,
            _ => return Vec::new(),
        };
        let m = self.monic();
        let c: Vec<Complex64> = m.coeffs.iter().map(|x| rat_to_f64(x).into()).collect();
        let bound = 1.0
            + c[..n]
                .iter()
                .map(|x| x.norm())
                .fold(0.0f64, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(bound * 0.9, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        let eval = |x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a);
        for _ in 0..2000 {
            let mut delta = 0.0f64;
            for i in 0..n {
                let mut den = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        den *= z[i] - z[j];
                    }
                }
                if den.norm() == 0.0 {
                    den = Complex64::new(1e-12, 0.0);
                }
                let step = eval(z[i]) / den;
                z[i] -= step;
                delta = delta.max(step.norm());
            }
            if delta < 1e-15 * bound {
                break;
            }
        }
        z
    }
}

/// Rational candidates near `x` with denominator dividing `lead` (and small convergents).
fn approx_rationals(x: f64, lead: u64) -> Vec<Rat> {
    let mut out = Vec::new();
    let mut dens: Vec<u64> = Vec::new();
    if lead <= 1_000_000 {
        let mut d = 1;
        while d * d <= lead {
            if lead.is_multiple_of(d) {
                dens.push(d);
                dens.push(lead / d);
            }
            d += 1;
        }
    } else {
        dens.push(1);
    }
    dens.sort_unstable();
    dens.dedup();
    for d in dens {
        let n = (x * d as f64).round();
        if n.is_finite() && n.abs() < 9.0e15 {
            out.push(rat(n as i64, d as i64));
        }
    }
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = &v[i + j] + a * b;
            }
        }
        Poly::from_coeffs(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Writes `3*z^2 - 1/2*z + 5`, the grammar accepted by the parser.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coeff = super::fmt_rat(&a);
            match i {
                0 => write!(f, "{coeff}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{coeff}*")?;
                    }
                    if i == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn div_rem_and_gcd() {
        // (z-1)(z+2) / (z-1)
        let p = Poly::from_i64s(&[-2, 1, 1]);
        let d = Poly::from_i64s(&[-1, 1]);
        let (q, r) = p.div_rem(&d);
        assert_eq!(q, Poly::from_i64s(&[2, 1]));
        assert!(r.is_zero());
        assert_eq!(p.gcd(&Poly::from_i64s(&[1, 0, -1])), d.monic());
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = Poly::from_i64s(&[5, 0, 3, -1]);
        let a = rat(2, 3);
        let s = p.taylor_shift(&a);
        let x = rat(-7, 5);
        assert_eq!(s.eval(&x), p.eval(&(&x + &a)));
    }

    #[test]
    fn nearby_roots_are_not_confused() {
        let p = Poly::from_coeffs(vec![rat(2, 3), rat(-5, 3), rat(1, 1)]);
        let (roots, rest) = p.rational_roots();
        assert_eq!(roots, vec![rat(2, 3), rat(1, 1)]);
        assert_eq!(rest.degree(), Some(0));
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // 4 (z - 1/2)^2 (z + 3) (z^2 + 1)
        let p = &(&Poly::from_i64s(&[-1, 2]) * &Poly::from_i64s(&[-1, 2]))
            * &(&Poly::from_i64s(&[3, 1]) * &Poly::from_i64s(&[1, 0, 1]));
        let (roots, rest) = p.rational_roots();
        assert_eq!(roots, vec![rat(-3, 1), rat(1, 2)]);
        assert_eq!(rest.monic(), Poly::from_i64s(&[1, 0, 1]));
    }

    #[test]
    fn display() {
        let p = Poly::from_coeffs(vec![rat(5, 1), rat(-1, 2), rat(3, 1)]);
        assert_eq!(p.to_string(), "3*z^2 - 1/2*z + 5");
        assert_eq!(Poly::from_i64s(&[0, -1]).to_string(), "-z");
    }
}
