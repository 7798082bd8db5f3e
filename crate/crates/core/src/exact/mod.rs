//! Exact arithmetic substrate: rationals, real number fields, matrices and
//! canonical subspaces.

pub mod exp;
pub mod field;
pub mod literal;
pub mod mat;
pub mod poly;
pub mod rat;
pub mod scalar;
pub mod subspace;

pub use field::{Irreducibility, NumberField};
pub use mat::Mat;
pub use rat::Rat;
pub use scalar::{RealInterval, Scalar};
pub use subspace::Subspace;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid number field: {0}")]
    InvalidField(String),
    #[error("mixed field contexts")]
    FieldMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation undefined on the zero subspace")]
    ZeroSubspace,
    #[error("matrix is singular")]
    Singular,
}
