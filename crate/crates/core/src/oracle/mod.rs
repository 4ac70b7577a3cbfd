//! Independent numerical checks of the closed forms.

pub mod product;
pub mod tau;

pub use product::{degree_check, product_check, product_rhs, DegreeCheck, PointDegree, ProductReport};
pub use tau::{tau_numeric, OracleValue};
