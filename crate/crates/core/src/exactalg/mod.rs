//! Exact arithmetic over the rationals: polynomials, rational functions on P¹,
//! and truncated Laurent series at points of P¹.

mod parse;
mod poly;
mod ratfunc;
mod series;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use parse::parse_rational_function;
pub use poly::Poly;
pub use ratfunc::RationalFunction;
pub use series::{form_expand_at, LocalForm, LocalSeries};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Nearest double. Exact for small numerators and denominators; large ones are
/// scaled down first so that neither side overflows.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb.max(db) - 900).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    if d == 0.0 {
        return if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    n / d
}

/// `p` or `p/q`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

/// A closed point of P¹ over the rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Point {
    Finite(Rat),
    Infinity,
}

impl Point {
    pub fn finite(n: i64, d: i64) -> Self {
        Point::Finite(rat(n, d))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            Point::Finite(r) => Some(r),
            Point::Infinity => None,
        }
    }
}

/// Finite points ascending, then infinity.
impl Ord for Point {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Point::Finite(a), Point::Finite(b)) => a.cmp(b),
            (Point::Finite(_), Point::Infinity) => Less,
            (Point::Infinity, Point::Finite(_)) => Greater,
            (Point::Infinity, Point::Infinity) => Equal,
        }
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(r) => write!(f, "{}", fmt_rat(r)),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(Point::Infinity);
        }
        parse_rat(&s)
            .map(Point::Finite)
            .ok_or_else(|| serde::de::Error::custom(format!("bad point {s:?}")))
    }
}
