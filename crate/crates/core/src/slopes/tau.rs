//! Expansion rates τ(LV) under a diagonal flow.

use itertools::Itertools;
use num_traits::Zero;

use crate::exact::{ExactError, Mat, Rat, Subspace};

use super::flow::{Flow, MatrixFamily};

fn check(l: &Mat, v: &Subspace, a: &Flow) -> Result<(), ExactError> {
    let d = a.dim();
    for got in [l.rows(), l.cols(), v.ambient()] {
        if got != d {
            return Err(ExactError::DimensionMismatch { expected: d, got });
        }
    }
    Ok(())
}

/// Largest weight sum Σ_{i∈I} A_i over index sets I with nonzero Plücker
/// coordinate of L·V.
pub fn tau_single(l: &Mat, v: &Subspace, a: &Flow) -> Result<Rat, ExactError> {
    check(l, v, a)?;
    if v.is_zero() {
        return Ok(Rat::zero());
    }
    let w = v.image(l)?;
    let coords = w.wedge_coords()?;
    let best = (0..a.dim())
        .combinations(w.dim())
        .zip(coords)
        .filter(|(_, c)| !c.is_zero())
        .map(|(idx, _)| idx.iter().fold(Rat::zero(), |s, &i| s + a.weight(i)))
        .max();
    Ok(best.expect("nonzero subspace has a nonzero Plücker coordinate"))
}

/// Same value through the jump indices of W = L·V against the flag
/// F_i = ⟨e_σ(i), …, e_σ(d)⟩, σ the descending-weight order. The jumps of
/// dim(W ∩ F_i) are the pivot columns of W in permuted coordinates.
pub fn tau_pivot(l: &Mat, v: &Subspace, a: &Flow) -> Result<Rat, ExactError> {
    check(l, v, a)?;
    if v.is_zero() {
        return Ok(Rat::zero());
    }
    let sigma = a.descending_order();
    let w = v.image(l)?;
    let permuted = w.basis().select_cols(sigma);
    let r = permuted.rref()?;
    Ok(r.pivots.iter().fold(Rat::zero(), |s, &p| s + a.weight(sigma[p])))
}

/// τ_M(V) = max over samples of τ(LV).
pub fn tau_family(fam: &MatrixFamily, v: &Subspace, a: &Flow) -> Result<Rat, ExactError> {
    let mut best: Option<Rat> = None;
    for l in fam.samples() {
        let t = tau_single(l, v, a)?;
        if best.as_ref().map_or(true, |b| t > *b) {
            best = Some(t);
        }
    }
    Ok(best.unwrap())
}

/// Jump set {i : dim(W∩F_i) > dim(W∩F_{i+1})} computed by explicit
/// intersections, positions 0-based in the descending order.
pub fn jump_set(w: &Subspace, a: &Flow) -> Result<Vec<usize>, ExactError> {
    let d = a.dim();
    let sigma = a.descending_order();
    let dims: Vec<usize> = (0..=d)
        .map(|i| w.intersect(&Subspace::coordinate(d, &sigma[i..])).map(|s| s.dim()))
        .collect::<Result<_, _>>()?;
    Ok((0..d).filter(|&i| dims[i] > dims[i + 1]).collect())
}
