//! Epsilon factors of rank-one meromorphic connections on the projective line.
//!
//! The pipeline runs from a connection form `ω dz` through its singular profile,
//! local characters and closed-form Gauss sums, to twisted de Rham cohomology,
//! period determinants and the global product check.

pub mod error;
pub mod connection;
pub mod derham;
pub mod exactalg;
pub mod lines;
pub mod localeps;
pub mod oracle;
pub mod periods;

pub use error::{Error, Result};
pub use exactalg::{
    form_expand_at, parse_rational_function, LocalForm, LocalSeries, Point, Poly, Rat,
    RationalFunction,
};
pub use lines::{rational_reconstruct, Approx, GradedLine, SymbolicComplex};
pub use connection::{Connection, Decomposition, PointProfile, SingularProfile};
pub use derham::{cohomology, reduce_form, CohomologyBasis, DeRham, Reduction, TwistedForm};
pub use localeps::{CharacterData, FiberNormalization, LocalReport, Ramification};
pub use oracle::{degree_check, product_check, tau_numeric, DegreeCheck, OracleValue, ProductReport};
pub use periods::{period_determinant, period_matrix, CycleOptions, PeriodMatrix};
