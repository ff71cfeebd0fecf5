//! Exact computer algebra for minimal finite W-superalgebras.
//!
//! The crate builds basic classical Lie superalgebras from matrix
//! realizations, the short grading attached to a minimal root, the
//! W-superalgebra generators inside the generalized Gelfand-Graev quotient,
//! and truncated Verma, highest-weight and Whittaker-induced modules.

pub mod cartanw;
pub mod envelope;
pub mod error;
pub mod grading;
pub mod highest;
pub mod linalg;
pub mod scalar;
pub mod superalgebra;
pub mod wgen;

pub use error::{Error, Result};
pub use scalar::{FieldTower, Rational, Scalar};
