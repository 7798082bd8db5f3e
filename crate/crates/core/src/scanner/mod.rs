//! Integer solutions of the product inequality ∏|L_i(x)| ≤ ‖x‖^{−ε}:
//! exhaustive scanning, classification against subspaces, the rounding
//! of a solution to an integer flow, and the multiplicative approximation
//! fixture.

pub mod reduce;
pub mod scan;
pub mod vwma;

pub use reduce::{exceptional_subspaces, operator_bound, solution_to_flow, AasVerdict, SolutionFlow};
pub use scan::{classify, scan_solutions, Classification, ScanConfig, Solution};
pub use vwma::{vwma_test, VwmaHit};

use thiserror::Error;

use crate::exact::ExactError;
use crate::slopes::SlopeError;

#[derive(Debug, Clone, Error)]
pub enum ScanError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Slope(#[from] SlopeError),
    #[error("solution too small: t = {0} < 1")]
    TooSmall(i64),
    #[error("linear form {0} vanishes at the solution")]
    ZeroForm(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}
