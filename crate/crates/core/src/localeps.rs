//! Local characters, closed-form Gauss sums and epsilon factors at a point.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::connection::{Connection, Decomposition};
use crate::error::{Error, Result};
use crate::exactalg::{fmt_rat, form_expand_at, rat, rat_int, LocalForm, LocalSeries, Point, Rat, RationalFunction};
use crate::lines::{GradedLine, SymbolicComplex};

/// Extra coefficients kept beyond what the formulas strictly read.
const SLACK: i64 = 4;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ramification {
    Unramified,
    Tame,
    Wild,
}

impl Ramification {
    pub fn name(self) -> &'static str {
        match self {
            Ramification::Unramified => "unramified",
            Ramification::Tame => "tame",
            Ramification::Wild => "wild",
        }
    }
}

/// Local multiplicative character `λ(t^j) = −Res(t^j ω_loc)` at a point.
#[derive(Clone, PartialEq, Debug)]
pub struct CharacterData {
    pub point: Point,
    pub f: usize,
    pub a: usize,
    /// `λ(t^j)` for `j = 0..=f`.
    pub lambda_coeffs: Vec<Rat>,
    pub delta: Rat,
    pub ramification: Ramification,
}

impl CharacterData {
    /// Character with the given `λ(t^j)`; trailing zeros are dropped.
    pub fn from_lambda(point: Point, lambda: &[Rat]) -> Self {
        let f = lambda.iter().rposition(|l| !l.is_zero()).unwrap_or(0);
        let lambda_coeffs: Vec<Rat> = (0..=f).map(|j| lambda.get(j).cloned().unwrap_or_else(Rat::zero)).collect();
        let delta = lambda_coeffs[f].clone();
        let ramification = if f > 0 {
            Ramification::Wild
        } else if lambda_coeffs[0].is_integer() {
            Ramification::Unramified
        } else {
            Ramification::Tame
        };
        CharacterData { point, f, a: f + 1, lambda_coeffs, delta, ramification }
    }

    /// The connection form `ω = −Σ λ_j t^{−j−1} dt` realizing this character.
    pub fn local_form(&self, trunc: i64) -> LocalForm {
        let terms: Vec<(i64, Rat)> =
            self.lambda_coeffs.iter().enumerate().map(|(j, l)| (-(j as i64) - 1, -l.clone())).collect();
        LocalForm::new(LocalSeries::from_terms(self.point.clone(), &terms, trunc))
    }

    pub fn dual(&self) -> CharacterData {
        let neg: Vec<Rat> = self.lambda_coeffs.iter().map(|l| -l.clone()).collect();
        CharacterData::from_lambda(self.point.clone(), &neg)
    }

    /// `λ(x) = Σ λ_j x_j` on the jet of `x` (terms beyond `t^f` ignored).
    pub fn apply(&self, x: &LocalSeries) -> Result<Rat> {
        let mut s = Rat::zero();
        for (j, l) in self.lambda_coeffs.iter().enumerate() {
            if !l.is_zero() {
                s += l * x.coeff(j as i64)?;
            }
        }
        Ok(s)
    }
}

/// `λ(t^j) = −Res(t^j ω_loc)`.
pub fn character_from_form(omega_loc: &LocalForm) -> Result<CharacterData> {
    let s = &omega_loc.series;
    let lowest = match s.valuation() {
        Ok(v) => v,
        Err(_) => return Ok(CharacterData::from_lambda(s.center().clone(), &[Rat::zero()])),
    };
    let depth = (-lowest).max(1) as usize;
    let mut lambda = Vec::with_capacity(depth);
    for j in 0..depth {
        lambda.push(-s.coeff(-(j as i64) - 1)?);
    }
    Ok(CharacterData::from_lambda(s.center().clone(), &lambda))
}

pub fn character_of(c: &Connection, p: &Point, trunc: i64) -> Result<CharacterData> {
    if !c.is_singular(p) {
        return Err(Error::NotSingular(Box::new(p.clone())));
    }
    character_from_form(&c.local_form(p, trunc))
}

#[derive(Clone, PartialEq, Debug)]
pub struct GaussSumInput {
    pub chi: CharacterData,
    pub nu_loc: LocalForm,
    pub c_nu: i64,
    pub gamma_degree: i64,
}

impl GaussSumInput {
    pub fn new(chi: CharacterData, nu_loc: LocalForm) -> Result<Self> {
        if nu_loc.center() != &chi.point {
            return Err(Error::CenterMismatch(Box::new((nu_loc.center().clone(), chi.point.clone()))));
        }
        let c_nu = nu_loc.order()?;
        let gamma_degree = c_nu + chi.a as i64;
        Ok(GaussSumInput { chi, nu_loc, c_nu, gamma_degree })
    }

    /// `ν` expanded far enough for every formula at this point.
    pub fn needed_trunc(c_nu: i64, a: usize) -> i64 {
        c_nu + 2 * a as i64 + SLACK
    }
}

/// `g_λ`: the part of `ω_loc / ν_loc` with exponents `≤ −c − 1`.
pub fn g_lambda(input: &GaussSumInput, omega_loc: &LocalForm) -> Result<LocalSeries> {
    if input.chi.a < 2 {
        return Err(Error::WrongRamification { expected: "wild", got: input.chi.ramification.name() });
    }
    let top = -input.c_nu - 1;
    let q = omega_loc.series.div(&input.nu_loc.series, top + 1)?;
    let g = q.polar_part_upto(top, top + 1 + SLACK)?;
    debug_assert_eq!(g.valuation().ok(), Some(-input.gamma_degree));
    Ok(g)
}

/// `g_ν = −(1/ν_c) t^{−c−1}`, so that `Res(g_ν ν) = −1`.
pub fn g_nu(input: &GaussSumInput) -> Result<LocalSeries> {
    if input.chi.a != 1 {
        return Err(Error::WrongRamification { expected: "tame or unramified", got: input.chi.ramification.name() });
    }
    let lead = input.nu_loc.series.lead()?;
    let e = -input.c_nu - 1;
    Ok(LocalSeries::monomial(input.chi.point.clone(), -Rat::one() / lead, e, e + 1 + SLACK))
}

/// Comparison scalar of the fiber at `g = t^n u`: `ℓ^n · χ_U(u)^{−1}` with
/// `χ_U(u) = u₀^{λ₀} · exp(λ(log(u/u₀)))` and principal `u₀^{λ₀}`.
pub fn fiber_local(chi: &CharacterData, g: &LocalSeries, ell: &SymbolicComplex) -> Result<SymbolicComplex> {
    let n = g.valuation()?;
    let u = g.shift(-n);
    let u0 = u.lead()?;
    let need = chi.f as i64 + 1;
    if u.trunc() < need {
        return Err(Error::InsufficientPrecision { needed: need, known: u.trunc() });
    }
    let unit = u.scale(&(Rat::one() / &u0)).truncate(need);
    let log = unit.log_one_plus()?;
    let mut lam_log = Rat::zero();
    for (j, l) in chi.lambda_coeffs.iter().enumerate().skip(1) {
        lam_log += l * log.coeff(j as i64)?;
    }
    let mut v = SymbolicComplex::rat_pow(&u0, &(-chi.lambda_coeffs[0].clone()))?;
    v = v.mul(&SymbolicComplex::exp(-lam_log));
    Ok(ell.pow(n).mul(&v))
}

/// Scalar `ℓ_p` of the global flat section `Π (z − d)^{−α_d} e^{−φ}`,
/// normalized to 1 at `anchor`. At a singular point the local factor
/// `(z − d)^{−α_d}` becomes `(−1)^{−α_d}` and the polar part of `φ` at `d` is dropped.
pub fn global_ell(c: &Connection, dec: &Decomposition, p: &Point, anchor: &Rat) -> Result<SymbolicComplex> {
    let anchor_pt = Point::Finite(anchor.clone());
    if c.is_singular(&anchor_pt) {
        return Err(Error::SingularAnchor(Box::new(anchor_pt)));
    }
    let mut norm = SymbolicComplex::exp(dec.phi.eval(anchor).unwrap());
    for (d, alpha) in &dec.residues {
        if !alpha.is_zero() {
            norm = norm.mul(&SymbolicComplex::rat_pow(&(anchor - d), alpha)?);
        }
    }
    let value = match p {
        Point::Infinity => {
            if c.is_singular(p) {
                SymbolicComplex::exp_two_pi_i(&(-dec.residue_at_infinity() / rat_int(2)))
            } else {
                SymbolicComplex::one()
            }
        }
        Point::Finite(x) => {
            let mut v;
            if c.is_singular(p) {
                v = SymbolicComplex::exp_two_pi_i(&(-dec.residue_at(x) / rat_int(2)));
                v = v.mul(&SymbolicComplex::exp(-dec.phi_regular_at(p)));
            } else {
                v = SymbolicComplex::exp(-dec.phi.eval(x).unwrap());
            }
            for (d, alpha) in &dec.residues {
                if d != x && !alpha.is_zero() {
                    v = v.mul(&SymbolicComplex::rat_pow(&(x - d), &(-alpha.clone()))?);
                }
            }
            v
        }
    };
    Ok(value.mul(&norm))
}

/// The fiber `(𝓛, 𝐋; g)` for the global connection with the anchor normalization.
pub fn fiber_value(c: &Connection, p: &Point, g: &LocalSeries, anchor: &Rat) -> Result<SymbolicComplex> {
    let chi = if c.is_singular(p) {
        character_of(c, p, 0)?
    } else {
        CharacterData::from_lambda(p.clone(), &[Rat::zero()])
    };
    let dec = c.decompose();
    fiber_local(&chi, g, &global_ell(c, &dec, p, anchor)?)
}

#[derive(Clone, PartialEq, Debug)]
pub struct FiberSpec {
    pub g: LocalSeries,
    pub value: SymbolicComplex,
}

/// The closed-form Gauss sum, in degree 0.
pub fn tau_closed_form(input: &GaussSumInput, fiber: &FiberSpec, omit_m_units: bool) -> Result<GradedLine> {
    let chi = &input.chi;
    let delta = &chi.delta;
    let value = match chi.ramification {
        Ramification::Unramified => fiber.value.clone(),
        Ramification::Tame => {
            let mut v = SymbolicComplex::gamma_pow(delta, -1)?.mul(&fiber.value);
            if !omit_m_units {
                v = v.mul(&SymbolicComplex::cyclotomic_pow(delta, -1)?);
            }
            v
        }
        Ramification::Wild => {
            let a = chi.a as i64;
            let res = input.nu_loc.mul_series(&fiber.g)?.residue()?;
            let mut v = SymbolicComplex::exp(-res);
            v = v.mul(&SymbolicComplex::rat_pow(&delta.abs(), &rat(a, 2))?);
            v = v.mul(&SymbolicComplex::two_pi_pow_half(-a));
            let mut ipow = a / 2;
            if delta.is_negative() {
                ipow += a;
            }
            v = v.mul(&SymbolicComplex::i_pow(ipow));
            v.mul(&fiber.value)
        }
    };
    Ok(GradedLine::new(0, value))
}

/// `τ(dual) ⊗ (2πi)^{c}` placed in degree `−c − a`.
pub fn epsilon_factor(dual_input: &GaussSumInput, dual_fiber: &FiberSpec, omit_m_units: bool) -> Result<GradedLine> {
    let tau = tau_closed_form(dual_input, dual_fiber, omit_m_units)?;
    let c = dual_input.c_nu;
    Ok(GradedLine::new(
        -c - dual_input.chi.a as i64,
        tau.value.mul(&SymbolicComplex::two_pi_i_pow(c)),
    ))
}

/// How fiber scalars `ℓ` are fixed.
#[derive(Clone, PartialEq, Debug)]
pub enum FiberNormalization {
    /// `ℓ = 1` at every point.
    Local,
    /// Values of the global flat section normalized at the anchor.
    Global { anchor: Rat },
}

/// `g_ν` or `g_λ` for the input together with the fiber value.
pub fn canonical_fiber(
    input: &GaussSumInput,
    omega_loc: &LocalForm,
    ell: &SymbolicComplex,
) -> Result<FiberSpec> {
    let g = if input.chi.a >= 2 { g_lambda(input, omega_loc)? } else { g_nu(input)? };
    let value = fiber_local(&input.chi, &g, ell)?;
    Ok(FiberSpec { g, value })
}

#[derive(Clone, PartialEq, Debug)]
pub struct LocalReport {
    pub chi: CharacterData,
    pub c_nu: i64,
    pub g: LocalSeries,
    pub tau: GradedLine,
    pub epsilon: GradedLine,
}

impl LocalReport {
    pub fn to_json(&self) -> Value {
        json!({
            "point": self.chi.point.to_string(),
            "f": self.chi.f,
            "a": self.chi.a,
            "ramification": self.chi.ramification.name(),
            "delta": fmt_rat(&self.chi.delta),
            "c_nu": self.c_nu,
            "g": self.g.to_string(),
            "tau": self.tau.to_json(),
            "epsilon": self.epsilon.to_json(),
        })
    }
}

/// Local form of `ν` at `p` with enough precision for the Gauss sum of a character of level `a`.
pub fn nu_local(nu: &RationalFunction, p: &Point, a: usize) -> Result<LocalForm> {
    if nu.is_zero() {
        return Err(Error::ZeroSeries);
    }
    let c = nu.order_at(p).unwrap() + if p.is_infinity() { -2 } else { 0 };
    Ok(form_expand_at(nu, p, GaussSumInput::needed_trunc(c, a)))
}

/// Character, Gauss sum and epsilon factor at a singular point of `c`.
pub fn local_report(
    c: &Connection,
    p: &Point,
    nu: &RationalFunction,
    norm: &FiberNormalization,
    omit_m_units: bool,
) -> Result<LocalReport> {
    let chi = character_of(c, p, 0)?;
    let nu_loc = nu_local(nu, p, chi.a)?;
    let trunc = GaussSumInput::needed_trunc(nu_loc.order()?, chi.a).max(SLACK);
    let dual = c.dual();
    let (ell, ell_dual) = match norm {
        FiberNormalization::Local => (SymbolicComplex::one(), SymbolicComplex::one()),
        FiberNormalization::Global { anchor } => (
            global_ell(c, &c.decompose(), p, anchor)?,
            global_ell(&dual, &dual.decompose(), p, anchor)?,
        ),
    };
    let input = GaussSumInput::new(chi.clone(), nu_loc.clone())?;
    let fiber = canonical_fiber(&input, &c.local_form(p, trunc), &ell)?;
    let tau = tau_closed_form(&input, &fiber, omit_m_units)?;
    let dual_input = GaussSumInput::new(chi.dual(), nu_loc)?;
    let dual_fiber = canonical_fiber(&dual_input, &dual.local_form(p, trunc), &ell_dual)?;
    let epsilon = epsilon_factor(&dual_input, &dual_fiber, omit_m_units)?;
    Ok(LocalReport { chi, c_nu: input.c_nu, g: fiber.g, tau, epsilon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse_rational_function;
    use num_complex::Complex64;

    fn z0() -> Point {
        Point::finite(0, 1)
    }

    fn input(omega: &str, nu: &str) -> (Connection, GaussSumInput) {
        let c = Connection::parse(omega).unwrap();
        let chi = character_of(&c, &z0(), 0).unwrap();
        let nu_loc = nu_local(&parse_rational_function(nu).unwrap(), &z0(), chi.a).unwrap();
        (c, GaussSumInput::new(chi, nu_loc).unwrap())
    }

    #[test]
    fn character_examples() {
        let c = Connection::parse("1/3/z").unwrap();
        let chi = character_of(&c, &z0(), 0).unwrap();
        assert_eq!((chi.f, chi.a, chi.delta.clone(), chi.ramification), (0, 1, rat(-1, 3), Ramification::Tame));
        let w = Connection::parse("-1/z^2").unwrap();
        let chi = character_of(&w, &z0(), 0).unwrap();
        assert_eq!((chi.f, chi.a, chi.delta.clone()), (1, 2, rat(1, 1)));
        assert_eq!(chi.ramification, Ramification::Wild);
        let u = Connection::parse("2/z").unwrap();
        assert_eq!(character_of(&u, &z0(), 0).unwrap().ramification, Ramification::Unramified);
        let flat = CharacterData::from_lambda(z0(), &[Rat::zero()]);
        assert_eq!(flat.ramification, Ramification::Unramified);
    }

    #[test]
    fn g_lambda_examples() {
        let (c, inp) = input("-1/z^2", "1");
        let g = g_lambda(&inp, &c.local_form(&z0(), 8)).unwrap();
        assert_eq!(g.terms().map(|(e, q)| (e, q.clone())).collect::<Vec<_>>(), vec![(-2, rat(-1, 1))]);
        let (c, inp) = input("1/z^3", "1/z");
        let g = g_lambda(&inp, &c.local_form(&z0(), 8)).unwrap();
        assert_eq!(g.terms().map(|(e, q)| (e, q.clone())).collect::<Vec<_>>(), vec![(-2, rat(1, 1))]);
    }

    #[test]
    fn g_nu_examples() {
        let (_, inp) = input("1/2/z", "1");
        assert_eq!(g_nu(&inp).unwrap().terms().map(|(e, q)| (e, q.clone())).collect::<Vec<_>>(), vec![(-1, rat(-1, 1))]);
        let (_, inp) = input("1/2/z", "3/z");
        assert_eq!(g_nu(&inp).unwrap().terms().map(|(e, q)| (e, q.clone())).collect::<Vec<_>>(), vec![(0, rat(-1, 3))]);
        let c = Connection::parse("1/2/z").unwrap();
        let chi = character_of(&c, &Point::Infinity, 0).unwrap();
        let nu = nu_local(&RationalFunction::one(), &Point::Infinity, 1).unwrap();
        let inp = GaussSumInput::new(chi, nu).unwrap();
        assert_eq!(g_nu(&inp).unwrap().terms().map(|(e, q)| (e, q.clone())).collect::<Vec<_>>(), vec![(1, rat(1, 1))]);
    }

    #[test]
    fn tame_half_value() {
        // λ(1) = 1/2
        let (c, inp) = input("-1/2/z", "1");
        let fiber = canonical_fiber(&inp, &c.local_form(&z0(), 8), &SymbolicComplex::one()).unwrap();
        let tau = tau_closed_form(&inp, &fiber, false).unwrap();
        let fib = fiber.value.eval().unwrap().value();
        let v = tau.numeric_eval(53).unwrap().value() / fib;
        let expect = Complex64::new(-2.0 * std::f64::consts::PI.sqrt(), 0.0).inv();
        assert!((v - expect).norm() < 1e-14, "{v}");
    }

    #[test]
    fn wild_a2_delta1() {
        let (c, inp) = input("-1/z^2", "1");
        let fiber = canonical_fiber(&inp, &c.local_form(&z0(), 8), &SymbolicComplex::one()).unwrap();
        assert_eq!(inp.nu_loc.mul_series(&fiber.g).unwrap().residue().unwrap(), Rat::zero());
        let tau = tau_closed_form(&inp, &fiber, false).unwrap();
        let v = tau.value.mul(&fiber.value.inv()).eval().unwrap().value();
        assert!((v - Complex64::new(0.0, 1.0 / (2.0 * std::f64::consts::PI))).norm() < 1e-15);
    }

    #[test]
    fn epsilon_degrees() {
        let c = Connection::parse("1/2/z - 1").unwrap();
        let one = RationalFunction::one();
        let r0 = local_report(&c, &z0(), &one, &FiberNormalization::Local, false).unwrap();
        assert_eq!(r0.epsilon.degree, -1);
        let ri = local_report(&c, &Point::Infinity, &one, &FiberNormalization::Local, false).unwrap();
        assert_eq!((ri.c_nu, ri.chi.a, ri.epsilon.degree), (-2, 2, 0));
    }

    #[test]
    fn fiber_of_identity_and_kummer_unit() {
        let c = Connection::parse("1/3/z").unwrap();
        let chi = character_of(&c, &z0(), 0).unwrap();
        let one = LocalSeries::monomial(z0(), Rat::one(), 0, 5);
        assert!(fiber_local(&chi, &one, &SymbolicComplex::one()).unwrap().is_one());
        // u = 2 + t: u₀^{-λ₀} = 2^{1/3}
        let u = LocalSeries::new(z0(), 0, vec![rat(2, 1), rat(1, 1)], 5);
        let v = fiber_local(&chi, &u, &SymbolicComplex::one()).unwrap();
        assert_eq!(v, SymbolicComplex::rat_pow(&rat(2, 1), &rat(1, 3)).unwrap());
    }

    #[test]
    fn anchor_must_be_regular() {
        let c = Connection::parse("1/2/(z-1)").unwrap();
        let g = LocalSeries::monomial(z0(), Rat::one(), 1, 5);
        assert!(matches!(fiber_value(&c, &z0(), &g, &rat(1, 1)), Err(Error::SingularAnchor(_))));
    }
}
