use thiserror::Error;

use crate::exactalg::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("series centers differ: {} vs {}", .0.0, .0.1)]
    CenterMismatch(Box<(Point, Point)>),

    #[error("series is zero up to its truncation order")]
    ZeroSeries,

    #[error("insufficient precision: need coefficients below t^{needed}, series known below t^{known}")]
    InsufficientPrecision { needed: i64, known: i64 },

    #[error("division by the zero rational function")]
    DivisionByZero,

    #[error("pole at a non-rational point (denominator factor {0} has no rational root)")]
    IrrationalPole(String),

    #[error("connection has no singular points; it extends to all of P^1 and the Euler characteristic convention is inapplicable")]
    EmptyDivisor,

    #[error("{0} is not a singular point of the connection")]
    NotSingular(Box<Point>),

    #[error("anchor point {0} is a singular point")]
    SingularAnchor(Box<Point>),

    #[error("operation requires a {expected} character, got {got}")]
    WrongRamification { expected: &'static str, got: &'static str },

    #[error("Gamma factor has a pole: argument {0} is a non-positive integer")]
    GammaPole(String),

    #[error("numeric value overflows the exponent range (log-magnitude {0})")]
    Overflow(f64),

    #[error("precision below 53 bits requested ({0})")]
    PrecisionTooLow(u32),

    #[error("requested precision unreachable: {0}")]
    PrecisionUnreachable(String),

    #[error("branch discontinuity at a path joint: {0}")]
    BranchDiscontinuity(String),

    #[error("path meets singular point {0}")]
    PathHitsSingularity(String),

    #[error("cycle count {cycles} does not match cohomology dimension {h1}")]
    CycleCountMismatch { cycles: usize, h1: usize },

    #[error("determinant line requires H^0 handling (h0 = {0}), out of scope")]
    NonzeroH0(usize),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("degree bookkeeping mismatch: {0}")]
    DegreeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
