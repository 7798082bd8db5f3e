//! Numerical orbit a_t·L·ℤ^d: certified successive minima over a time grid,
//! slope estimates, flag capture and Minkowski consistency.

pub mod intlat;
pub mod minima;
pub mod simulate;

pub use minima::{successive_minima, FixedBasis, Minima, Minimum};
pub use simulate::{
    capture_report, estimate_slopes, minkowski_bound, minkowski_check, simulate, CaptureVerdict, SimConfig, Snapshot,
    SnapshotSeries,
};

use thiserror::Error;

use crate::exact::ExactError;
use crate::slopes::SlopeError;

#[derive(Debug, Clone, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Slope(#[from] SlopeError),
    #[error("basis is singular")]
    Singular,
    #[error("precision exhausted at {prec} bits (relative error {relative_error:e})")]
    PrecisionExhausted { prec: u32, relative_error: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}
