use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{fmt_rat, rat_int, rat_to_f64, Point, Poly, Rat, RationalFunction};
use crate::error::{Error, Result};

/// Truncated Laurent series `Σ_{val ≤ j < trunc} c_j t^j` in the local coordinate
/// at `center`: `t = z - p` at a finite point, `t = 1/z` at infinity.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LocalSeries {
    center: Point,
    val: i64,
    coeffs: Vec<Rat>,
    trunc: i64,
}

impl LocalSeries {
    /// `coeffs[k]` is the coefficient of `t^(start + k)`. Coefficients at or above
    /// `trunc` are discarded, leading zeros are stripped.
    pub fn new(center: Point, start: i64, coeffs: Vec<Rat>, trunc: i64) -> Self {
        let mut s = LocalSeries { center, val: start, coeffs, trunc };
        s.normalize();
        s
    }

    pub fn zero(center: Point, trunc: i64) -> Self {
        LocalSeries { center, val: trunc, coeffs: Vec::new(), trunc }
    }

    /// Sum of `c t^e` terms; repeated exponents add up.
    pub fn from_terms(center: Point, terms: &[(i64, Rat)], trunc: i64) -> Self {
        let lo = terms.iter().map(|(e, _)| *e).min().unwrap_or(trunc).min(trunc);
        let mut v = vec![Rat::zero(); (trunc - lo).max(0) as usize];
        for (e, c) in terms {
            if *e < trunc {
                let k = (e - lo) as usize;
                v[k] = &v[k] + c;
            }
        }
        Self::new(center, lo, v, trunc)
    }

    pub fn monomial(center: Point, c: Rat, e: i64, trunc: i64) -> Self {
        Self::from_terms(center, &[(e, c)], trunc)
    }

    fn normalize(&mut self) {
        let keep = (self.trunc - self.val).max(0) as usize;
        self.coeffs.truncate(keep);
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.val = self.trunc;
        } else {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    /// All exponents at or above this are unknown.
    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn valuation(&self) -> Result<i64> {
        if self.is_zero() {
            Err(Error::ZeroSeries)
        } else {
            Ok(self.val)
        }
    }

    /// Leading coefficient.
    pub fn lead(&self) -> Result<Rat> {
        self.coeffs.first().cloned().ok_or(Error::ZeroSeries)
    }

    pub fn coeff(&self, j: i64) -> Result<Rat> {
        if j >= self.trunc {
            return Err(Error::InsufficientPrecision { needed: j + 1, known: self.trunc });
        }
        if j < self.val {
            return Ok(Rat::zero());
        }
        Ok(self.coeffs.get((j - self.val) as usize).cloned().unwrap_or_else(Rat::zero))
    }

    /// Nonzero `(exponent, coefficient)` pairs, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.val + k as i64, c))
    }

    fn check_center(&self, o: &LocalSeries) -> Result<()> {
        if self.center != o.center {
            Err(Error::CenterMismatch(Box::new((self.center.clone(), o.center.clone()))))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, o: &LocalSeries) -> Result<LocalSeries> {
        self.check_center(o)?;
        let trunc = self.trunc.min(o.trunc);
        let lo = self.val.min(o.val).min(trunc);
        let v = (lo..trunc)
            .map(|j| self.coeff(j).unwrap() + o.coeff(j).unwrap())
            .collect();
        Ok(Self::new(self.center.clone(), lo, v, trunc))
    }

    pub fn sub(&self, o: &LocalSeries) -> Result<LocalSeries> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> LocalSeries {
        LocalSeries {
            center: self.center.clone(),
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &Rat) -> LocalSeries {
        Self::new(
            self.center.clone(),
            self.val,
            self.coeffs.iter().map(|a| a * c).collect(),
            self.trunc,
        )
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> LocalSeries {
        LocalSeries {
            center: self.center.clone(),
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            trunc: self.trunc + k,
        }
    }

    /// Forget coefficients at or above `trunc` (no-op if already coarser).
    pub fn truncate(&self, trunc: i64) -> LocalSeries {
        Self::new(self.center.clone(), self.val, self.coeffs.clone(), trunc.min(self.trunc))
    }

    /// Keep only exponents `≤ e`; the result is exact (no unknown tail) when the
    /// source knows every exponent up to `e`.
    pub fn polar_part_upto(&self, e: i64, exact_trunc: i64) -> Result<LocalSeries> {
        if e >= self.trunc {
            return Err(Error::InsufficientPrecision { needed: e + 1, known: self.trunc });
        }
        let terms: Vec<(i64, Rat)> =
            self.terms().filter(|(j, _)| *j <= e).map(|(j, c)| (j, c.clone())).collect();
        Ok(Self::from_terms(self.center.clone(), &terms, exact_trunc))
    }

    pub fn mul(&self, o: &LocalSeries) -> Result<LocalSeries> {
        self.check_center(o)?;
        let trunc = (self.val + o.trunc).min(o.val + self.trunc);
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(self.center.clone(), trunc));
        }
        let val = self.val + o.val;
        let n = (trunc - val).max(0) as usize;
        let mut v = vec![Rat::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= n || a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                v[i + j] = &v[i + j] + a * b;
            }
        }
        Ok(Self::new(self.center.clone(), val, v, trunc))
    }

    /// Multiplicative inverse known below `target_trunc`.
    pub fn inv(&self, target_trunc: i64) -> Result<LocalSeries> {
        let v = self.valuation()?;
        let known = self.trunc - 2 * v;
        if target_trunc > known {
            return Err(Error::InsufficientPrecision { needed: target_trunc, known });
        }
        let n = (target_trunc + v).max(0) as usize;
        let inv0 = Rat::one() / &self.coeffs[0];
        let mut b: Vec<Rat> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(inv0.clone());
                continue;
            }
            let mut s = Rat::zero();
            for i in 1..=k.min(self.coeffs.len() - 1) {
                s += &self.coeffs[i] * &b[k - i];
            }
            b.push(-s * &inv0);
        }
        Ok(Self::new(self.center.clone(), -v, b, target_trunc))
    }

    pub fn div(&self, o: &LocalSeries, target_trunc: i64) -> Result<LocalSeries> {
        let ov = o.valuation()?;
        let inv_trunc = (o.trunc - 2 * ov).min(target_trunc - self.val.min(self.trunc));
        Ok(self.mul(&o.inv(inv_trunc)?)?.truncate(target_trunc))
    }

    /// `log(u)` for a unit with constant term 1.
    pub fn log_one_plus(&self) -> Result<LocalSeries> {
        if self.valuation()? != 0 || !self.coeffs[0].is_one() {
            return Err(Error::Unsupported("log of a series with constant term other than 1".into()));
        }
        let x = self.sub(&Self::monomial(self.center.clone(), Rat::one(), 0, self.trunc))?;
        let mut acc = Self::zero(self.center.clone(), self.trunc);
        if x.is_zero() {
            return Ok(acc);
        }
        let mut pow = x.clone();
        let mut k = 1i64;
        while pow.val < self.trunc && !pow.is_zero() {
            let sign = if k % 2 == 1 { rat_int(1) } else { rat_int(-1) };
            acc = acc.add(&pow.scale(&(sign / rat_int(k))))?;
            pow = pow.mul(&x)?.truncate(self.trunc);
            k += 1;
        }
        Ok(acc)
    }

    /// Term-by-term sum of the known coefficients at coordinate value `t`.
    pub fn eval_c(&self, t: Complex64) -> Complex64 {
        self.terms()
            .map(|(j, c)| rat_to_f64(c) * t.powi(j as i32))
            .sum()
    }
}

/// Laurent expansion of `n(t) / d(t)` (polynomials in the local coordinate),
/// multiplied by `t^extra`, known below `trunc`.
fn expand_quotient(center: Point, n: &Poly, d: &Poly, extra: i64, trunc: i64) -> LocalSeries {
    if n.is_zero() {
        return LocalSeries::zero(center, trunc);
    }
    let vn = n.coeffs().iter().take_while(|c| c.is_zero()).count();
    let vd = d.coeffs().iter().take_while(|c| c.is_zero()).count();
    let val = vn as i64 - vd as i64 + extra;
    let len = (trunc - val).max(0) as usize;
    let nc = &n.coeffs()[vn..];
    let dc = &d.coeffs()[vd..];
    let inv0 = Rat::one() / &dc[0];
    let mut out: Vec<Rat> = Vec::with_capacity(len);
    for k in 0..len {
        let mut s = nc.get(k).cloned().unwrap_or_else(Rat::zero);
        for i in 1..=k.min(dc.len() - 1) {
            s -= &dc[i] * &out[k - i];
        }
        out.push(s * &inv0);
    }
    LocalSeries::new(center, val, out, trunc)
}

impl RationalFunction {
    /// Laurent expansion in `z - p` (finite `p`) or `w = 1/z` (infinity).
    pub fn expand_at(&self, p: &Point, target_trunc: i64) -> LocalSeries {
        match p {
            Point::Finite(a) => expand_quotient(
                p.clone(),
                &self.num().taylor_shift(a),
                &self.den().taylor_shift(a),
                0,
                target_trunc,
            ),
            Point::Infinity => {
                if self.is_zero() {
                    return LocalSeries::zero(Point::Infinity, target_trunc);
                }
                let dn = self.num().degree().unwrap() as i64;
                let dd = self.den().degree().unwrap() as i64;
                expand_quotient(
                    Point::Infinity,
                    &self.num().reversed(),
                    &self.den().reversed(),
                    dd - dn,
                    target_trunc,
                )
            }
        }
    }

    /// Order of vanishing at `p` (negative for poles); `None` for zero.
    pub fn order_at(&self, p: &Point) -> Option<i64> {
        match p {
            Point::Finite(a) => {
                if self.is_zero() {
                    return None;
                }
                Some(self.num().root_multiplicity(a) as i64 - self.den().root_multiplicity(a) as i64)
            }
            Point::Infinity => self.degree().map(|d| -d),
        }
    }
}

/// A local 1-form `s(t) dt`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LocalForm {
    pub series: LocalSeries,
}

impl LocalForm {
    pub fn new(series: LocalSeries) -> Self {
        LocalForm { series }
    }

    pub fn center(&self) -> &Point {
        self.series.center()
    }

    /// Coefficient of `t^{-1} dt`.
    pub fn residue(&self) -> Result<Rat> {
        self.series.coeff(-1)
    }

    pub fn order(&self) -> Result<i64> {
        self.series.valuation()
    }

    /// `g · (s dt)`.
    pub fn mul_series(&self, g: &LocalSeries) -> Result<LocalForm> {
        Ok(LocalForm::new(self.series.mul(g)?))
    }
}

/// Local expansion of `f dz` at `p`; at infinity `dz = -dw/w²` is applied.
pub fn form_expand_at(f: &RationalFunction, p: &Point, target_trunc: i64) -> LocalForm {
    match p {
        Point::Finite(_) => LocalForm::new(f.expand_at(p, target_trunc)),
        Point::Infinity => {
            let s = f.expand_at(p, target_trunc + 2);
            LocalForm::new(s.shift(-2).neg())
        }
    }
}

fn fmt_terms(s: &LocalSeries, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (j, c) in s.terms() {
        let neg = c.is_negative();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let a = c.abs();
        match (j, a.is_one()) {
            (0, _) => write!(f, "{}", fmt_rat(&a))?,
            (_, true) => write!(f, "{var}^{j}")?,
            (_, false) => write!(f, "{}*{var}^{j}", fmt_rat(&a))?,
        }
    }
    if first {
        write!(f, "O({var}^{})", s.trunc)
    } else {
        write!(f, " + O({var}^{})", s.trunc)
    }
}

/// `5*t^-2 + 3*t^-1 + O(t^0)`.
impl fmt::Display for LocalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(self, "t", f)
    }
}

impl fmt::Debug for LocalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalSeries[{}]({self})", self.center)
    }
}

impl Serialize for LocalSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
