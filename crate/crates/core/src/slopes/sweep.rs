//! HN census over many flows, and the ordered Bell bound.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::exact::{Rat, Subspace};

use super::flow::{Flow, MatrixFamily};
use super::lattice::{close_lattice, family_generators};
use super::oracle::TauOracle;
use super::polygon::{hn_filtration, HnFiltration};
use super::SlopeError;

/// b(n) = Σ_{k=1..n} C(n,k)·b(n−k), b(0) = 1.
pub fn ordered_bell(n: usize) -> BigUint {
    let mut b: Vec<BigUint> = vec![BigUint::one()];
    for m in 1..=n {
        let mut binom = BigUint::one();
        let mut acc = BigUint::zero();
        for k in 1..=m {
            binom = binom * BigUint::from(m - k + 1) / BigUint::from(k);
            acc += &binom * &b[m - k];
        }
        b.push(acc);
    }
    b.swap_remove(n)
}

/// How candidate lattices are built per flow.
#[derive(Clone, Debug)]
pub struct CandidateRecipe {
    /// User-supplied generators added to the sample flags.
    pub extra: Vec<Subspace>,
    pub rounds: usize,
    pub rational_only: bool,
}

impl Default for CandidateRecipe {
    fn default() -> Self {
        CandidateRecipe { extra: Vec::new(), rounds: 6, rational_only: true }
    }
}

/// Filtration of τ_M for one flow using the recipe's candidate lattice.
pub fn hn_for_flow(fam: &MatrixFamily, a: &Flow, recipe: &CandidateRecipe) -> Result<HnFiltration, SlopeError> {
    let mut gens = family_generators(fam, a, recipe.rational_only)?;
    for e in &recipe.extra {
        if !gens.contains(e) {
            gens.push(e.clone());
        }
    }
    let lat = close_lattice(fam.dim(), &gens, recipe.rounds)?;
    let oracle = TauOracle::new(fam.clone(), a.clone())?;
    hn_filtration(&oracle, &lat)
}

#[derive(Clone, Debug)]
pub struct FlowRecord {
    pub flow: Flow,
    pub dims: Vec<usize>,
    pub slopes: Vec<Rat>,
}

#[derive(Clone, Debug)]
pub struct Census {
    /// Distinct proper nonzero HN terms, in first-seen order.
    pub subspaces: Vec<Subspace>,
    pub records: Vec<FlowRecord>,
    pub bound: BigUint,
}

pub fn flow_sweep(fam: &MatrixFamily, flows: &[Flow], recipe: &CandidateRecipe) -> Result<Census, SlopeError> {
    let d = fam.dim();
    let hns: Vec<HnFiltration> = flows.par_iter().map(|a| hn_for_flow(fam, a, recipe)).collect::<Result<_, _>>()?;
    let mut subspaces: Vec<Subspace> = Vec::new();
    let mut records = Vec::new();
    for (a, hn) in flows.iter().zip(&hns) {
        for (s, _) in hn.interior() {
            if !subspaces.contains(s) {
                subspaces.push(s.clone());
            }
        }
        records.push(FlowRecord { flow: a.clone(), dims: hn.dims(), slopes: hn.slopes.clone() });
    }
    let bound = ordered_bell(1 << d);
    if BigUint::from(subspaces.len()) > bound {
        return Err(SlopeError::CensusBound { size: subspaces.len(), bound: bound.to_string() });
    }
    Ok(Census { subspaces, records, bound })
}
