//! Expansion rates, Grayson polygons and Harder–Narasimhan filtrations.

pub mod brute;
pub mod flow;
pub mod lattice;
pub mod oracle;
pub mod plucker;
pub mod polygon;
pub mod submod;
pub mod sweep;
pub mod tau;

pub use flow::{Flow, MatrixFamily};
pub use lattice::{close_lattice, CandidateLattice};
pub use oracle::{SubmodularOracle, TableOracle, TauOracle};
pub use polygon::{grayson_polygon, hn_filtration, is_semistable, slopes_to_lambda, GraysonPolygon, HnFiltration};
pub use tau::{tau_family, tau_pivot, tau_single};

use thiserror::Error;

use crate::exact::ExactError;

#[derive(Debug, Clone, Error)]
pub enum SlopeError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("candidate lattice is not saturated")]
    Unsaturated,
    #[error("oracle is not submodular on the lattice: {0}")]
    NotSubmodular(Box<submod::Violation>),
    #[error("polygon vertex is not unique: {0} and {1} share (dim, value)")]
    NonUnique(String, String),
    #[error("no value for subspace {0}")]
    MissingValue(String),
    #[error("subspace {0} is not a lattice member")]
    MissingMember(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("filtration and polygon disagree: {0}")]
    Incoherent(String),
    #[error("census of {size} subspaces exceeds the bound {bound}")]
    CensusBound { size: usize, bound: String },
}
