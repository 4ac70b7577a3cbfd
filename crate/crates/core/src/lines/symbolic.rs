//! Exact products of transcendental atoms with a numeric evaluator.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::exactalg::{fmt_rat, rat, rat_int, rat_to_f64, Rat};

const TRIAL_LIMIT: u64 = 100_000;
const MAX_LOG_MAGNITUDE: f64 = 709.0;

/// Nonzero complex number written as a product of atoms
///
/// `q · i^k · (2π)^{h/2} · Π Γ(x)^e · e^{r} · e^{2πi s} · Π p^{m} · Π (e^{2πi c} − 1)^{n} · Π ζ^{j}`
///
/// where `p^m` ranges over rational powers of positive integers and `ζ` over
/// opaque numeric constants. Every constructor leaves the value in canonical
/// form, so equal products of atoms compare equal.
#[derive(Clone, PartialEq, Debug)]
pub struct SymbolicComplex {
    rational: Rat,
    i_power: u8,
    two_pi_half: i64,
    gamma: BTreeMap<Rat, i64>,
    exp_rational: Rat,
    exp_two_pi_i: Rat,
    radicals: BTreeMap<BigInt, Rat>,
    cyclotomic: BTreeMap<Rat, i64>,
    numeric: BTreeMap<(u64, u64), NumericAtom>,
}

#[derive(Clone, Copy, PartialEq, Debug)]
struct NumericAtom {
    value: Complex64,
    rel_err: f64,
    power: i64,
}

/// Numeric value with an absolute error estimate.
#[derive(Clone, Copy, PartialEq, Debug, serde::Serialize)]
pub struct Approx {
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

impl Approx {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

fn small_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_LIMIT as usize;
        let mut sieve = vec![true; n + 1];
        let mut out = Vec::new();
        for i in 2..=n {
            if sieve[i] {
                out.push(i as u64);
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        out
    })
}

/// Trial division by primes below the limit; a leftover cofactor is returned as
/// a single "prime".
fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    for &p in small_primes() {
        if n.is_one() {
            break;
        }
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

impl Default for SymbolicComplex {
    fn default() -> Self {
        Self::one()
    }
}

impl SymbolicComplex {
    pub fn one() -> Self {
        SymbolicComplex {
            rational: Rat::one(),
            i_power: 0,
            two_pi_half: 0,
            gamma: BTreeMap::new(),
            exp_rational: Rat::zero(),
            exp_two_pi_i: Rat::zero(),
            radicals: BTreeMap::new(),
            cyclotomic: BTreeMap::new(),
            numeric: BTreeMap::new(),
        }
    }

    pub fn rational(q: Rat) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut s = Self::one();
        s.rational = q;
        Ok(s)
    }

    /// `i^k`
    pub fn i_pow(k: i64) -> Self {
        let mut s = Self::one();
        s.i_power = k.rem_euclid(4) as u8;
        s
    }

    /// `(2π)^{h/2}`
    pub fn two_pi_pow_half(h: i64) -> Self {
        let mut s = Self::one();
        s.two_pi_half = h;
        s
    }

    /// `(2πi)^n`
    pub fn two_pi_i_pow(n: i64) -> Self {
        let mut s = Self::two_pi_pow_half(2 * n);
        s.i_power = n.rem_euclid(4) as u8;
        s
    }

    /// `Γ(x)^e`, reduced so that the remaining argument lies in (0, 1).
    pub fn gamma_pow(x: &Rat, e: i64) -> Result<Self> {
        if x <= &Rat::zero() && x.is_integer() {
            return Err(Error::GammaPole(fmt_rat(x)));
        }
        let mut s = Self::one();
        let mut arg = x.clone();
        let mut q = Rat::one();
        // Γ(x) = (x-1) Γ(x-1) and Γ(x) = Γ(x+1) / x
        while arg > Rat::one() {
            arg -= Rat::one();
            q *= &arg;
        }
        while arg <= Rat::zero() {
            q /= &arg;
            arg += Rat::one();
        }
        s.rational = pow_rat(&q, e);
        if !arg.is_one() {
            s.gamma.insert(arg, e);
        }
        Ok(s)
    }

    pub fn gamma(x: &Rat) -> Result<Self> {
        Self::gamma_pow(x, 1)
    }

    /// `e^r`
    pub fn exp(r: Rat) -> Self {
        let mut s = Self::one();
        s.exp_rational = r;
        s
    }

    /// `e^{2πi r}`
    pub fn exp_two_pi_i(r: &Rat) -> Self {
        let mut s = Self::one();
        s.exp_two_pi_i = r.clone();
        s.canonicalize();
        s
    }

    /// Principal `x^e` for rational `x ≠ 0`; a negative base contributes `e^{iπe}`.
    pub fn rat_pow(x: &Rat, e: &Rat) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut s = Self::one();
        if x.is_negative() {
            s.exp_two_pi_i = e / rat_int(2);
        }
        for (p, m) in factor(x.numer()) {
            *s.radicals.entry(p).or_insert_with(Rat::zero) += e * rat_int(m as i64);
        }
        for (p, m) in factor(x.denom()) {
            *s.radicals.entry(p).or_insert_with(Rat::zero) -= e * rat_int(m as i64);
        }
        s.canonicalize();
        Ok(s)
    }

    /// Principal square root of a positive rational.
    pub fn sqrt(x: &Rat) -> Result<Self> {
        if !x.is_positive() {
            return Err(Error::Unsupported(format!("sqrt of non-positive {}", fmt_rat(x))));
        }
        Self::rat_pow(x, &rat(1, 2))
    }

    /// `(e^{2πi c} − 1)^n`
    pub fn cyclotomic_pow(c: &Rat, n: i64) -> Result<Self> {
        let c = frac(c);
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut s = Self::one();
        s.cyclotomic.insert(c, n);
        s.canonicalize();
        Ok(s)
    }

    /// Opaque numeric constant with relative error `rel_err`.
    pub fn numeric(value: Complex64, rel_err: f64) -> Result<Self> {
        if value == Complex64::new(0.0, 0.0) || !value.is_finite() {
            return Err(Error::Unsupported(format!("numeric atom {value} must be finite and nonzero")));
        }
        let mut s = Self::one();
        let key = (value.re.to_bits(), value.im.to_bits());
        s.numeric.insert(key, NumericAtom { value, rel_err: rel_err.abs(), power: 1 });
        Ok(s)
    }

    fn canonicalize(&mut self) {
        // Whole quarter turns of e^{2πi s} become powers of i, leaving s in [0, 1/4).
        let s = frac(&self.exp_two_pi_i);
        let k = (&s * rat_int(4)).floor();
        self.i_power = ((self.i_power as i64 + k.to_integer().to_i64().unwrap()).rem_euclid(4)) as u8;
        self.exp_two_pi_i = s - k / rat_int(4);
        // Integer parts of radical exponents move into the rational factor.
        let mut q = self.rational.clone();
        self.radicals.retain(|p, e| {
            let fl = e.floor();
            if !fl.is_zero() {
                let k = fl.to_integer().to_i64().expect("radical exponent overflow");
                q *= pow_rat(&Rat::from_integer(p.clone()), k);
                *e -= fl;
            }
            !e.is_zero()
        });
        self.rational = q;
        self.gamma.retain(|_, e| *e != 0);
        // e^{iπ} − 1 = −2
        if let Some(n) = self.cyclotomic.remove(&rat(1, 2)) {
            self.rational *= pow_rat(&rat_int(-2), n);
        }
        self.cyclotomic.retain(|_, e| *e != 0);
        self.numeric.retain(|_, a| a.power != 0);
    }

    /// Product with exact merging of like atoms.
    pub fn mul(&self, o: &SymbolicComplex) -> SymbolicComplex {
        let mut s = self.clone();
        s.rational *= &o.rational;
        s.i_power = (s.i_power + o.i_power) % 4;
        s.two_pi_half += o.two_pi_half;
        for (k, e) in &o.gamma {
            *s.gamma.entry(k.clone()).or_insert(0) += e;
        }
        s.exp_rational += &o.exp_rational;
        s.exp_two_pi_i += &o.exp_two_pi_i;
        for (k, e) in &o.radicals {
            *s.radicals.entry(k.clone()).or_insert_with(Rat::zero) += e;
        }
        for (k, e) in &o.cyclotomic {
            *s.cyclotomic.entry(k.clone()).or_insert(0) += e;
        }
        for (k, a) in &o.numeric {
            s.numeric
                .entry(*k)
                .and_modify(|b| {
                    b.power += a.power;
                    b.rel_err = b.rel_err.max(a.rel_err);
                })
                .or_insert(*a);
        }
        s.canonicalize();
        s
    }

    pub fn inv(&self) -> SymbolicComplex {
        self.pow(-1)
    }

    pub fn pow(&self, n: i64) -> SymbolicComplex {
        let mut s = self.clone();
        s.rational = pow_rat(&self.rational, n);
        s.i_power = ((self.i_power as i64 * n).rem_euclid(4)) as u8;
        s.two_pi_half *= n;
        s.gamma.values_mut().for_each(|e| *e *= n);
        s.exp_rational *= rat_int(n);
        s.exp_two_pi_i *= rat_int(n);
        s.radicals.values_mut().for_each(|e| *e *= rat_int(n));
        s.cyclotomic.values_mut().for_each(|e| *e *= n);
        s.numeric.values_mut().for_each(|a| a.power *= n);
        s.canonicalize();
        s
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// True when no transcendental or numeric atom is present.
    pub fn as_rational(&self) -> Option<Rat> {
        let mut r = self.clone();
        r.rational = Rat::one();
        r.i_power = 0;
        if !r.is_one() {
            return None;
        }
        match self.i_power {
            0 => Some(self.rational.clone()),
            2 => Some(-self.rational.clone()),
            _ => None,
        }
    }

    pub fn rational_factor(&self) -> &Rat {
        &self.rational
    }

    pub fn gamma_factors(&self) -> impl Iterator<Item = (&Rat, i64)> {
        self.gamma.iter().map(|(k, e)| (k, *e))
    }

    pub fn cyclotomic_factors(&self) -> impl Iterator<Item = (&Rat, i64)> {
        self.cyclotomic.iter().map(|(k, e)| (k, *e))
    }

    /// Drop every cyclotomic atom `(e^{2πic} − 1)^n` (cyclotomic units of the Betti field).
    pub fn without_cyclotomic(&self) -> SymbolicComplex {
        let mut s = self.clone();
        s.cyclotomic.clear();
        s
    }

    /// Log-magnitude and argument, with an absolute error estimate on each.
    fn log_parts(&self) -> (f64, f64, f64) {
        let eps = f64::EPSILON;
        let mut lm = 0.0;
        let mut arg = 0.0;
        let mut err = 0.0;
        let mut add = |l: f64, a: f64, e: f64| {
            lm += l;
            arg += a;
            err += e;
        };
        let (lq, sq) = ln_abs_rat(&self.rational);
        add(lq, if sq { PI } else { 0.0 }, 2.0 * eps * (1.0 + lq.abs()));
        add(0.0, self.i_power as f64 * PI / 2.0, 0.0);
        let l2pi = (2.0 * PI).ln();
        let h = self.two_pi_half as f64 / 2.0;
        add(h * l2pi, 0.0, 2.0 * eps * (1.0 + (h * l2pi).abs()));
        for (x, e) in &self.gamma {
            let lg = ln_gamma(rat_to_f64(x)) * *e as f64;
            add(lg, 0.0, 16.0 * eps * (1.0 + lg.abs()));
        }
        let er = rat_to_f64(&self.exp_rational);
        add(er, 0.0, 2.0 * eps * (1.0 + er.abs()));
        let s = rat_to_f64(&self.exp_two_pi_i);
        add(0.0, 2.0 * PI * s, 4.0 * eps);
        for (p, e) in &self.radicals {
            let lp = ln_big(p) * rat_to_f64(e);
            add(lp, 0.0, 2.0 * eps * (1.0 + lp.abs()));
        }
        for (c, n) in &self.cyclotomic {
            // e^{2πic} − 1 = 2 sin(πc) · e^{iπ(c + 1/2)} for 0 < c < 1
            let cf = rat_to_f64(c);
            let l = (2.0 * (PI * cf).sin()).ln() * *n as f64;
            add(l, PI * (cf + 0.5) * *n as f64, 8.0 * eps * (1.0 + l.abs()) * (*n as f64).abs());
        }
        for a in self.numeric.values() {
            let p = a.power as f64;
            add(a.value.norm().ln() * p, a.value.arg() * p, (a.rel_err + 2.0 * eps) * p.abs());
        }
        (lm, arg, err)
    }

    /// Double-precision evaluation. Any `precision_bits ≥ 53` is accepted; the
    /// result is computed in double precision regardless.
    pub fn numeric_eval(&self, precision_bits: u32) -> Result<Approx> {
        if precision_bits < 53 {
            return Err(Error::PrecisionTooLow(precision_bits));
        }
        let (lm, arg, err) = self.log_parts();
        if !lm.is_finite() || lm.abs() > MAX_LOG_MAGNITUDE {
            return Err(Error::Overflow(lm));
        }
        let v = Complex64::from_polar(lm.exp(), arg);
        let rel = err + 4.0 * f64::EPSILON * (1.0 + arg.abs());
        Ok(Approx { re: v.re, im: v.im, err: v.norm() * rel })
    }

    pub fn eval(&self) -> Result<Approx> {
        self.numeric_eval(53)
    }

    /// Atoms in a stable order: rational, i, 2π, Γ (ascending argument), exp,
    /// exp2πi, radicals (ascending base), cyclotomic (ascending), numeric.
    pub fn atoms_json(&self) -> Vec<Value> {
        let mut v = vec![json!({"kind": "rational", "value": fmt_rat(&self.rational)})];
        if self.i_power != 0 {
            v.push(json!({"kind": "i_power", "exp": self.i_power}));
        }
        if self.two_pi_half != 0 {
            v.push(json!({"kind": "two_pi_power", "exp": fmt_rat(&rat(self.two_pi_half, 2))}));
        }
        for (x, e) in &self.gamma {
            v.push(json!({"kind": "gamma", "arg": fmt_rat(x), "exp": e}));
        }
        if !self.exp_rational.is_zero() {
            v.push(json!({"kind": "exp", "arg": fmt_rat(&self.exp_rational)}));
        }
        if !self.exp_two_pi_i.is_zero() {
            v.push(json!({"kind": "exp_two_pi_i", "arg": fmt_rat(&self.exp_two_pi_i)}));
        }
        for (p, e) in &self.radicals {
            v.push(json!({"kind": "power", "base": p.to_string(), "exp": fmt_rat(e)}));
        }
        for (c, n) in &self.cyclotomic {
            v.push(json!({"kind": "cyclotomic", "arg": fmt_rat(c), "exp": n}));
        }
        for a in self.numeric.values() {
            v.push(json!({"kind": "numeric", "re": a.value.re, "im": a.value.im, "exp": a.power}));
        }
        v
    }
}

fn pow_rat(q: &Rat, n: i64) -> Rat {
    if n >= 0 {
        num_traits::pow(q.clone(), n as usize)
    } else {
        num_traits::pow(Rat::one() / q, n.unsigned_abs() as usize)
    }
}

fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        n.to_f64().unwrap().abs().ln()
    } else {
        let shift = bits - 60;
        (n.abs() >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `(ln |q|, q < 0)`
fn ln_abs_rat(q: &Rat) -> (f64, bool) {
    (ln_big(q.numer()) - ln_big(q.denom()), q.is_negative())
}

impl fmt::Display for SymbolicComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![fmt_rat(&self.rational)];
        match self.i_power {
            0 => {}
            1 => parts.push("i".into()),
            k => parts.push(format!("i^{k}")),
        }
        if self.two_pi_half != 0 {
            parts.push(format!("(2pi)^({})", fmt_rat(&rat(self.two_pi_half, 2))));
        }
        for (x, e) in &self.gamma {
            parts.push(if *e == 1 { format!("Gamma({})", fmt_rat(x)) } else { format!("Gamma({})^{e}", fmt_rat(x)) });
        }
        if !self.exp_rational.is_zero() {
            parts.push(format!("exp({})", fmt_rat(&self.exp_rational)));
        }
        if !self.exp_two_pi_i.is_zero() {
            parts.push(format!("exp(2pi*i*{})", fmt_rat(&self.exp_two_pi_i)));
        }
        for (p, e) in &self.radicals {
            parts.push(format!("{p}^({})", fmt_rat(e)));
        }
        for (c, n) in &self.cyclotomic {
            parts.push(format!("(exp(2pi*i*{}) - 1)^{n}", fmt_rat(c)));
        }
        for a in self.numeric.values() {
            parts.push(format!("[{}]^{}", a.value, a.power));
        }
        write!(f, "{}", parts.join(" * "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Approx, b: Complex64, tol: f64) -> bool {
        (a.value() - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let g = SymbolicComplex::gamma(&rat(1, 2)).unwrap().eval().unwrap();
        assert!(close(g, Complex64::new(PI.sqrt(), 0.0), 1e-14));
        assert!(g.err < 1e-12);
    }

    #[test]
    fn gamma_recurrence_only() {
        let a = SymbolicComplex::gamma(&rat(7, 3)).unwrap();
        let b = SymbolicComplex::gamma(&rat(1, 3)).unwrap().mul(&SymbolicComplex::rational(rat(4, 9)).unwrap());
        assert_eq!(a, b);
        assert!(SymbolicComplex::gamma(&rat(1, 1)).unwrap().is_one());
        assert!(matches!(SymbolicComplex::gamma(&rat(-2, 1)), Err(Error::GammaPole(_))));
    }

    #[test]
    fn exp_two_pi_i_folds_quarters() {
        let v = SymbolicComplex::exp_two_pi_i(&rat(1, 2));
        assert_eq!(v.as_rational(), Some(rat(-1, 1)));
        assert_eq!(SymbolicComplex::exp_two_pi_i(&rat(5, 4)), SymbolicComplex::i_pow(1));
        let a = SymbolicComplex::exp_two_pi_i(&rat(5, 8));
        let b = SymbolicComplex::i_pow(3).mul(&SymbolicComplex::exp_two_pi_i(&rat(7, 8)));
        assert_eq!(a, b);
    }

    #[test]
    fn sqrt_merging() {
        let s = SymbolicComplex::sqrt(&rat(2, 1)).unwrap();
        assert_eq!(s.mul(&s).as_rational(), Some(rat(2, 1)));
        let t = SymbolicComplex::sqrt(&rat(8, 1)).unwrap();
        assert_eq!(s.mul(&t).as_rational(), Some(rat(4, 1)));
    }

    #[test]
    fn negative_base_power() {
        let v = SymbolicComplex::rat_pow(&rat(-4, 1), &rat(1, 2)).unwrap();
        assert!(close(v.eval().unwrap(), Complex64::new(0.0, 2.0), 1e-15));
    }

    #[test]
    fn cyclotomic_values() {
        let c = SymbolicComplex::cyclotomic_pow(&rat(1, 3), 1).unwrap().eval().unwrap();
        let z = Complex64::from_polar(1.0, 2.0 * PI / 3.0) - 1.0;
        assert!(close(c, z, 1e-15));
        let h = SymbolicComplex::cyclotomic_pow(&rat(3, 2), -1).unwrap();
        assert_eq!(h.as_rational(), Some(rat(-1, 2)));
    }

    #[test]
    fn numeric_atoms_cancel() {
        let z = SymbolicComplex::numeric(Complex64::new(0.3, -1.7), 1e-12).unwrap();
        assert!(z.mul(&z.inv()).is_one());
    }

    #[test]
    fn two_pi_i() {
        let v = SymbolicComplex::two_pi_i_pow(1).eval().unwrap();
        assert!(close(v, Complex64::new(0.0, 2.0 * PI), 1e-15));
    }

    #[test]
    fn precision_guards() {
        let one = SymbolicComplex::one();
        assert!(matches!(one.numeric_eval(52), Err(Error::PrecisionTooLow(52))));
        assert!(one.numeric_eval(200).is_ok());
        assert!(matches!(SymbolicComplex::exp(rat(800, 1)).eval(), Err(Error::Overflow(_))));
    }
}
