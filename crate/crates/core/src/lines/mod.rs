//! Graded lines: an integer degree together with a symbolic comparison scalar.

mod reconstruct;
mod symbolic;

use serde_json::{json, Value};

pub use reconstruct::rational_reconstruct;
pub use symbolic::{Approx, SymbolicComplex};

use crate::error::Result;

#[derive(Clone, PartialEq, Debug, Default)]
pub struct GradedLine {
    pub degree: i64,
    pub value: SymbolicComplex,
}

impl GradedLine {
    pub fn new(degree: i64, value: SymbolicComplex) -> Self {
        GradedLine { degree, value }
    }

    /// The unit object.
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn tensor(&self, o: &GradedLine) -> GradedLine {
        GradedLine { degree: self.degree + o.degree, value: self.value.mul(&o.value) }
    }

    pub fn inverse(&self) -> GradedLine {
        GradedLine { degree: -self.degree, value: self.value.inv() }
    }

    /// Multiply the value by `(2πi)^{-n}`.
    pub fn tate_twist(&self, n: i64) -> GradedLine {
        GradedLine { degree: self.degree, value: self.value.mul(&SymbolicComplex::two_pi_i_pow(-n)) }
    }

    pub fn numeric_eval(&self, precision_bits: u32) -> Result<Approx> {
        self.value.numeric_eval(precision_bits)
    }

    /// `{degree, atoms, numeric}`; `numeric` is null when evaluation overflows.
    pub fn to_json(&self) -> Value {
        let numeric = match self.value.eval() {
            Ok(a) => json!({"re": a.re, "im": a.im, "err": a.err}),
            Err(_) => Value::Null,
        };
        json!({"degree": self.degree, "atoms": self.value.atoms_json(), "numeric": numeric})
    }
}

impl std::fmt::Display for GradedLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})[{}]", self.value, self.degree)
    }
}
