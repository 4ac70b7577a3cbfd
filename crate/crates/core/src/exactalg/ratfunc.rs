use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{Point, Poly, Rat};
use crate::error::{Error, Result};

/// `num / den` with `den` monic and coprime to `num`. Zero is `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RationalFunction { num, den: Poly::one() };
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let l = d.lead();
        if !l.is_one() {
            let inv = Rat::one() / l;
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RationalFunction { num: n, den: d }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction { num: p, den: Poly::one() }
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn x() -> Self {
        Self::from_poly(Poly::x())
    }

    /// `c / (z - d)^k`
    pub fn polar(c: Rat, d: &Rat, k: usize) -> Self {
        let lin = Poly::from_coeffs(vec![-d.clone(), Rat::one()]);
        let mut den = Poly::one();
        for _ in 0..k {
            den = &den * &lin;
        }
        Self::normalized(Poly::constant(c), den)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        Self::normalized(n, d)
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.num.eval_c(z) / self.den.eval_c(z)
    }

    /// Degree of the numerator minus degree of the denominator; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap() as i64)
    }

    /// Distinct finite poles with their orders, ascending.
    pub fn finite_poles(&self) -> Result<Vec<(Rat, usize)>> {
        let (roots, rest) = self.den.rational_roots();
        if rest.degree().unwrap_or(0) > 0 {
            return Err(Error::IrrationalPole(rest.to_string()));
        }
        Ok(roots
            .into_iter()
            .map(|r| {
                let m = self.den.root_multiplicity(&r);
                (r, m)
            })
            .collect())
    }

    /// Substitute `z -> (a z + b) / (c z + d)`.
    pub fn compose_mobius(&self, a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Self {
        let top = Poly::from_coeffs(vec![b.clone(), a.clone()]);
        let bot = Poly::from_coeffs(vec![d.clone(), c.clone()]);
        let n = self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0));
        let homog = |p: &Poly| {
            let mut acc = Poly::zero();
            for (i, coef) in p.coeffs().iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let mut term = Poly::constant(coef.clone());
                for _ in 0..i {
                    term = &term * &top;
                }
                for _ in i..n {
                    term = &term * &bot;
                }
                acc = &acc + &term;
            }
            acc
        };
        Self::normalized(homog(&self.num), homog(&self.den))
    }

    /// Value at a point of P¹, or `None` at a pole.
    pub fn value_at(&self, p: &Point) -> Option<Rat> {
        match p {
            Point::Finite(x) => self.eval(x),
            Point::Infinity => match self.degree() {
                None => Some(Rat::zero()),
                Some(d) if d < 0 => Some(Rat::zero()),
                Some(0) => Some(self.num.lead() / self.den.lead()),
                _ => None,
            },
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if self.den == o.den {
            return RationalFunction::normalized(&self.num + &o.num, self.den.clone());
        }
        RationalFunction::normalized(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::normalized(&self.num * &o.num, &self.den * &o.den)
    }
}

/// Panics on division by zero; use [`RationalFunction::inv`] for a checked version.
impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, o: &RationalFunction) -> RationalFunction {
        assert!(!o.is_zero(), "rational function division by zero");
        RationalFunction::normalized(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: RationalFunction) -> RationalFunction {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

/// `(num)/(den)`, or just the numerator for polynomials. Parses back to the same value.
impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_i64s(n), Poly::from_i64s(d)).unwrap()
    }

    #[test]
    fn normalizes_common_factors() {
        // (2z - 2) / (2z^2 - 2) = 1 / (z + 1)
        let r = rf(&[-2, 2], &[-2, 0, 2]);
        assert_eq!(r, rf(&[1], &[1, 1]));
        assert!(r.den().lead().is_one());
    }

    #[test]
    fn derivative_quotient_rule() {
        let r = rf(&[1], &[0, 1]);
        assert_eq!(r.derivative(), rf(&[-1], &[0, 0, 1]));
    }

    #[test]
    fn poles_and_irrational() {
        let r = rf(&[1], &[0, -1, 1]);
        assert_eq!(r.finite_poles().unwrap(), vec![(rat(0, 1), 1), (rat(1, 1), 1)]);
        let s = rf(&[1], &[-2, 0, 1]);
        assert!(matches!(s.finite_poles(), Err(Error::IrrationalPole(_))));
    }

    #[test]
    fn mobius_inversion() {
        let r = rf(&[3, 1], &[0, 0, 1]);
        let one = rat(1, 1);
        let zero = rat(0, 1);
        // z -> 1/z twice is the identity
        let back = r.compose_mobius(&zero, &one, &one, &zero).compose_mobius(&zero, &one, &one, &zero);
        assert_eq!(back, r);
    }

    #[test]
    fn display() {
        assert_eq!(rf(&[5, 3], &[0, 0, 1]).to_string(), "(3*z + 5)/(z^2)");
    }
}
