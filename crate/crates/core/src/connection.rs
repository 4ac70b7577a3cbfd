//! Rank-one connections `d + ω dz` on P¹ minus a finite set.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactalg::{
    fmt_rat, form_expand_at, parse_rational_function, LocalForm, Point, Poly, Rat, RationalFunction,
};

#[derive(Clone, PartialEq, Debug)]
pub struct Connection {
    omega: RationalFunction,
    finite_poles: Vec<(Rat, usize)>,
    singular: Vec<Point>,
}

/// `ω = ω_reg + φ'` with `ω_reg` having only simple poles.
#[derive(Clone, PartialEq, Debug)]
pub struct Decomposition {
    pub omega_reg: RationalFunction,
    pub phi: RationalFunction,
    /// Residues of `ω_reg` at the finite poles, ascending by point.
    pub residues: Vec<(Rat, Rat)>,
    /// Polar part of `φ` at each finite pole (terms `c (z-d)^{-k}`, `k ≥ 1`).
    pub phi_polar: Vec<(Rat, Vec<Rat>)>,
    /// Polynomial part of `φ` (zero constant term).
    pub phi_poly: Poly,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct PointProfile {
    pub point: Point,
    pub pole_order: usize,
    pub irregularity: usize,
    pub a: usize,
    #[serde(serialize_with = "ser_rat")]
    pub alpha: Rat,
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(r))
}

pub type SingularProfile = Vec<PointProfile>;

impl Connection {
    pub fn new(omega: RationalFunction) -> Result<Self> {
        let finite_poles = omega.finite_poles()?;
        let mut singular: Vec<Point> = finite_poles.iter().map(|(d, _)| Point::Finite(d.clone())).collect();
        if Self::infinity_order(&omega) > 0 {
            singular.push(Point::Infinity);
        }
        Ok(Connection { omega, finite_poles, singular })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_rational_function(s)?)
    }

    /// Pole order of `ω dz` at infinity (0 if regular there).
    fn infinity_order(omega: &RationalFunction) -> usize {
        match omega.degree() {
            Some(d) if d >= -1 => (d + 2) as usize,
            _ => 0,
        }
    }

    pub fn omega(&self) -> &RationalFunction {
        &self.omega
    }

    /// Finite singular points ascending, then infinity if singular.
    pub fn singular_points(&self) -> &[Point] {
        &self.singular
    }

    pub fn is_singular(&self, p: &Point) -> bool {
        self.singular.contains(p)
    }

    pub fn pole_order(&self, p: &Point) -> usize {
        match p {
            Point::Infinity => Self::infinity_order(&self.omega),
            Point::Finite(x) => self
                .finite_poles
                .iter()
                .find(|(d, _)| d == x)
                .map(|(_, m)| *m)
                .unwrap_or(0),
        }
    }

    pub fn finite_poles(&self) -> &[(Rat, usize)] {
        &self.finite_poles
    }

    /// `ω dz` in the local coordinate at `p`, known below `trunc`.
    pub fn local_form(&self, p: &Point, trunc: i64) -> LocalForm {
        form_expand_at(&self.omega, p, trunc)
    }

    /// The connection `d − ω dz` on the dual line.
    pub fn dual(&self) -> Connection {
        Connection { omega: -&self.omega, finite_poles: self.finite_poles.clone(), singular: self.singular.clone() }
    }

    pub fn decompose(&self) -> Decomposition {
        let mut omega_reg = RationalFunction::zero();
        let mut phi = RationalFunction::zero();
        let mut residues = Vec::new();
        let mut phi_polar = Vec::new();
        for (d, m) in &self.finite_poles {
            let s = self.omega.expand_at(&Point::Finite(d.clone()), 0);
            let res = s.coeff(-1).unwrap();
            if !res.is_zero() {
                omega_reg = &omega_reg + &RationalFunction::polar(res.clone(), d, 1);
            }
            residues.push((d.clone(), res));
            // c (z-d)^{-i} integrates to -c/(i-1) (z-d)^{-(i-1)}
            let mut polar = vec![Rat::zero(); m.saturating_sub(1)];
            for i in 2..=*m {
                let c = s.coeff(-(i as i64)).unwrap();
                if c.is_zero() {
                    continue;
                }
                let k = i - 1;
                let coef = -c / Rat::from_integer((k as i64).into());
                phi = &phi + &RationalFunction::polar(coef.clone(), d, k);
                polar[k - 1] = coef;
            }
            phi_polar.push((d.clone(), polar));
        }
        let (q, _) = self.omega.num().div_rem(self.omega.den());
        let phi_poly = q.integral();
        phi = &phi + &RationalFunction::from_poly(phi_poly.clone());
        let out = Decomposition { omega_reg, phi, residues, phi_polar, phi_poly };
        debug_assert!(out.verify(&self.omega));
        out
    }

    pub fn profile(&self) -> SingularProfile {
        self.singular
            .iter()
            .map(|p| {
                let m = self.pole_order(p);
                let irregularity = m.saturating_sub(1);
                let alpha = self.local_form(p, 0).residue().unwrap();
                PointProfile { point: p.clone(), pole_order: m, irregularity, a: irregularity + 1, alpha }
            })
            .collect()
    }

    /// `−2 + Σ a_d`
    pub fn euler_char(&self) -> Result<i64> {
        if self.singular.is_empty() {
            return Err(Error::EmptyDivisor);
        }
        Ok(-2 + self.profile().iter().map(|p| p.a as i64).sum::<i64>())
    }

    /// Pull back along `z = (a z' + b)/(c z' + d)`.
    pub fn mobius(&self, a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Result<Connection> {
        let det = a * d - b * c;
        if det.is_zero() {
            return Err(Error::Unsupported("degenerate Mobius map".into()));
        }
        let lin = RationalFunction::from_poly(Poly::from_coeffs(vec![d.clone(), c.clone()]));
        let jac = &RationalFunction::constant(det) / &(&lin * &lin);
        Connection::new(&self.omega.compose_mobius(a, b, c, d) * &jac)
    }

    /// True when the flat sections are rational functions: `φ = 0` and every residue is an integer.
    pub fn has_rational_flat_section(&self) -> bool {
        let dec = self.decompose();
        dec.phi.is_zero() && dec.residues.iter().all(|(_, r)| r.is_integer())
    }
}

impl Decomposition {
    pub fn verify(&self, omega: &RationalFunction) -> bool {
        (&(&self.omega_reg + &self.phi.derivative()) - omega).is_zero()
    }

    pub fn residue_at(&self, d: &Rat) -> Rat {
        self.residues.iter().find(|(x, _)| x == d).map(|(_, r)| r.clone()).unwrap_or_else(Rat::zero)
    }

    /// `α_∞ = −Σ α_d`
    pub fn residue_at_infinity(&self) -> Rat {
        -self.residues.iter().fold(Rat::zero(), |acc, (_, r)| acc + r)
    }

    /// Value at `d` of `φ` with its own polar part at `d` removed.
    pub fn phi_regular_at(&self, p: &Point) -> Rat {
        match p {
            Point::Infinity => Rat::zero(),
            Point::Finite(x) => {
                let mut v = self.phi_poly.eval(x);
                for (d, polar) in &self.phi_polar {
                    if d == x {
                        continue;
                    }
                    let inv = Rat::one() / (x - d);
                    let mut pw = inv.clone();
                    for c in polar {
                        v += c * &pw;
                        pw *= &inv;
                    }
                }
                v
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    #[test]
    fn kummer_decomposition() {
        let c = Connection::parse("1/2/z - 1").unwrap();
        let d = c.decompose();
        assert_eq!(d.omega_reg, parse_rational_function("1/2/z").unwrap());
        assert_eq!(d.phi, parse_rational_function("-z").unwrap());
        assert_eq!(c.singular_points(), &[Point::finite(0, 1), Point::Infinity]);
        let prof = c.profile();
        assert_eq!((prof[0].irregularity, prof[0].a, prof[0].alpha.clone()), (0, 1, rat(1, 2)));
        assert_eq!((prof[1].irregularity, prof[1].a, prof[1].alpha.clone()), (1, 2, rat(-1, 2)));
        assert_eq!(c.euler_char().unwrap(), 1);
    }

    #[test]
    fn gaussian_and_higher_poles() {
        let g = Connection::parse("-2*z").unwrap();
        assert_eq!(g.decompose().phi, parse_rational_function("-z^2").unwrap());
        assert_eq!(g.euler_char().unwrap(), 1);
        let h = Connection::parse("1/z^2").unwrap();
        let d = h.decompose();
        assert!(d.omega_reg.is_zero());
        assert_eq!(d.phi, parse_rational_function("-1/z").unwrap());
        let c3 = Connection::parse("1/z^3").unwrap();
        let p = c3.profile();
        assert_eq!((p[0].irregularity, p[0].a, p[0].alpha.clone()), (2, 3, rat(0, 1)));
    }

    #[test]
    fn trivial_connection() {
        let c = Connection::parse("0").unwrap();
        assert!(c.profile().is_empty());
        assert_eq!(c.euler_char(), Err(Error::EmptyDivisor));
    }

    #[test]
    fn three_tame_points() {
        let c = Connection::parse("1/3/z + 1/5/(z - 1)").unwrap();
        assert_eq!(c.euler_char().unwrap(), 1);
        assert_eq!(c.decompose().residue_at_infinity(), rat(-8, 15));
    }

    #[test]
    fn phi_regular_values() {
        let c = Connection::parse("1/z^2 + 1/(z-2)^3 + 1").unwrap();
        let d = c.decompose();
        // φ = -1/z - 1/(2 (z-2)^2) + z
        assert_eq!(d.phi_regular_at(&Point::finite(0, 1)), rat(-1, 8));
        assert_eq!(d.phi_regular_at(&Point::finite(2, 1)), rat(3, 2));
    }

    #[test]
    fn mobius_preserves_euler_char() {
        let c = Connection::parse("1/3/z - 1 + 1/(z-1)^2").unwrap();
        let one = rat(1, 1);
        let m = c.mobius(&rat(2, 1), &one, &one, &rat(3, 1)).unwrap();
        assert_eq!(m.euler_char().unwrap(), c.euler_char().unwrap());
    }
}
