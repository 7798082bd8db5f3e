//! Exact evaluators for diophantine exponents over finite candidate sets of
//! rational subspaces.

pub mod dirichlet;
pub mod pencil;
pub mod polytope;
pub mod quasinorm;

pub use dirichlet::{dirichlet_witness, Witness, WitnessKind};
pub use pencil::{
    beta_formula, certificate_holds, gamma_bridge, height_candidates, l_y, omega_formula, rank_image, s_rank, BetaReport, HomFamily,
    OmegaCertificate, OmegaReport,
};
pub use polytope::{polytope_vertices, PolytopeVertex};
pub use quasinorm::{alpha_growth, beta_alpha_formula, QuasiNorm};

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact::rat::fmt_rat;
use crate::exact::{ExactError, Rat};

#[derive(Debug, Clone, Error)]
pub enum ExponentError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid index set: {0}")]
    Indices(String),
    #[error("nothing to prove: s = {s} ≥ dim W = {k}")]
    Trivial { s: usize, k: usize },
    #[error("degenerate polygon: γ + m = {0} ≤ 0")]
    Degenerate(String),
    #[error("witness search exceeded {0} lattice points")]
    SearchCap(u64),
    #[error("candidate list must contain the full space")]
    MissingFull,
}

/// A rational or +∞.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExtRat {
    Finite(Rat),
    Infinite,
}

impl ExtRat {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtRat::Finite(r) => Some(r),
            ExtRat::Infinite => None,
        }
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
            (ExtRat::Finite(_), ExtRat::Infinite) => Ordering::Less,
            (ExtRat::Infinite, ExtRat::Finite(_)) => Ordering::Greater,
            (ExtRat::Infinite, ExtRat::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(r) => write!(f, "{}", fmt_rat(r)),
            ExtRat::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
