//! Subspace functions φ with φ(0) = 0.

use std::collections::HashMap;

use num_traits::Zero;

use crate::exact::{Rat, Subspace};

use super::flow::{Flow, MatrixFamily};
use super::tau::tau_family;
use super::SlopeError;

pub trait SubmodularOracle: Sync {
    fn ambient(&self) -> usize;
    fn eval(&self, v: &Subspace) -> Result<Rat, SlopeError>;
}

/// φ(V) = τ_M(V) for a finite family and a flow.
#[derive(Clone, Debug)]
pub struct TauOracle {
    pub family: MatrixFamily,
    pub flow: Flow,
}

impl TauOracle {
    pub fn new(family: MatrixFamily, flow: Flow) -> Result<TauOracle, SlopeError> {
        if family.dim() != flow.dim() {
            return Err(SlopeError::Exact(crate::exact::ExactError::DimensionMismatch {
                expected: family.dim(),
                got: flow.dim(),
            }));
        }
        Ok(TauOracle { family, flow })
    }
}

impl SubmodularOracle for TauOracle {
    fn ambient(&self) -> usize {
        self.family.dim()
    }

    fn eval(&self, v: &Subspace) -> Result<Rat, SlopeError> {
        Ok(tau_family(&self.family, v, &self.flow)?)
    }
}

/// Explicit finite table; subspaces outside it take `fallback` when set.
#[derive(Clone, Debug)]
pub struct TableOracle {
    ambient: usize,
    table: HashMap<Subspace, Rat>,
    fallback: Option<Rat>,
}

impl TableOracle {
    pub fn new(ambient: usize, entries: Vec<(Subspace, Rat)>, fallback: Option<Rat>) -> TableOracle {
        TableOracle { ambient, table: entries.into_iter().collect(), fallback }
    }

    /// φ ≡ c·dim, which is modular; c = 0 gives the zero function.
    pub fn constant_slope(ambient: usize, c: Rat) -> ConstantSlope {
        ConstantSlope { ambient, c }
    }
}

impl SubmodularOracle for TableOracle {
    fn ambient(&self) -> usize {
        self.ambient
    }

    fn eval(&self, v: &Subspace) -> Result<Rat, SlopeError> {
        if v.is_zero() {
            return Ok(Rat::zero());
        }
        match self.table.get(v).or(self.fallback.as_ref()) {
            Some(x) => Ok(x.clone()),
            None => Err(SlopeError::MissingValue(format!("{v:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConstantSlope {
    ambient: usize,
    c: Rat,
}

impl SubmodularOracle for ConstantSlope {
    fn ambient(&self) -> usize {
        self.ambient
    }

    fn eval(&self, v: &Subspace) -> Result<Rat, SlopeError> {
        Ok(&self.c * Rat::from_integer(v.dim().into()))
    }
}

/// φ_V(W) = φ(W) − φ(V) on subspaces W ≥ V.
pub struct QuotientOracle<'a> {
    inner: &'a dyn SubmodularOracle,
    base: Subspace,
    base_value: Rat,
}

impl<'a> QuotientOracle<'a> {
    pub fn new(inner: &'a dyn SubmodularOracle, base: Subspace) -> Result<QuotientOracle<'a>, SlopeError> {
        let base_value = inner.eval(&base)?;
        Ok(QuotientOracle { inner, base, base_value })
    }

    pub fn base(&self) -> &Subspace {
        &self.base
    }
}

impl SubmodularOracle for QuotientOracle<'_> {
    fn ambient(&self) -> usize {
        self.inner.ambient()
    }

    fn eval(&self, w: &Subspace) -> Result<Rat, SlopeError> {
        Ok(self.inner.eval(w)? - &self.base_value)
    }
}
