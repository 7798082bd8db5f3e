//! Quasi-norm growth rates α(W) and the exponent β_α.

use rayon::prelude::*;
use serde::Serialize;

use super::pencil::{restricted_rank, HomFamily};
use super::{ExponentError, ExtRat};
use crate::exact::rat::int;
use crate::exact::{Mat, Rat, Subspace};

/// |v| = max_i |⟨v, u_i*⟩|^{1/α_i}.
#[derive(Clone, Debug)]
pub struct QuasiNorm {
    alphas: Vec<Rat>,
    dual_basis: Mat,
}

impl QuasiNorm {
    pub fn new(alphas: Vec<Rat>, dual_basis: Mat) -> Result<QuasiNorm, ExponentError> {
        let d = alphas.len();
        if dual_basis.rows() != d || dual_basis.cols() != d {
            return Err(ExponentError::Shape(format!("{d} exponents need a {d}×{d} dual basis")));
        }
        if alphas.iter().any(|a| *a <= int(0)) {
            return Err(ExponentError::Shape("exponents must be positive".into()));
        }
        if dual_basis.rank() != d {
            return Err(ExponentError::Shape("dual forms are dependent".into()));
        }
        Ok(QuasiNorm { alphas, dual_basis })
    }

    pub fn standard(alphas: Vec<Rat>) -> Result<QuasiNorm, ExponentError> {
        let d = alphas.len();
        QuasiNorm::new(alphas, Mat::identity(d))
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Rat] {
        &self.alphas
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaReport {
    #[serde(serialize_with = "crate::exact::rat::ser_rat")]
    pub value: Rat,
    /// The greedy index set I_W, 0-based.
    pub indices: Vec<usize>,
}

/// Σ_{i∈I_W} α_i with I_W picked greedily: i_j minimal such that the
/// restrictions of u_{i_1}*, …, u_{i_j}* to W stay independent.
pub fn alpha_growth(w: &Subspace, qn: &QuasiNorm) -> Result<AlphaReport, ExponentError> {
    if w.is_zero() {
        return Err(crate::exact::ExactError::ZeroSubspace.into());
    }
    if w.ambient() != qn.dim() {
        return Err(ExponentError::Shape(format!("subspace in K^{}, quasi-norm on K^{}", w.ambient(), qn.dim())));
    }
    let mut idx = Vec::new();
    for i in 0..qn.dim() {
        if idx.len() == w.dim() {
            break;
        }
        let mut trial = idx.clone();
        trial.push(i);
        if restricted_rank(&qn.dual_basis.select_rows(&trial), w)? == trial.len() {
            idx = trial;
        }
    }
    let value = idx.iter().map(|&i| qn.alphas[i].clone()).sum();
    Ok(AlphaReport { value, indices: idx })
}

fn alpha_or_zero(w: &Subspace, qn: &QuasiNorm) -> Result<Rat, ExponentError> {
    if w.is_zero() {
        Ok(int(0))
    } else {
        Ok(alpha_growth(w, qn)?.value)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaAlphaReport {
    pub value: ExtRat,
    pub argmax: usize,
}

/// max over candidates W of min over samples y of
/// α(W ∩ ker y) / (dim W − dim(W ∩ ker y)). Kernels are exact in the
/// samples' field.
pub fn beta_alpha_formula(fam: &HomFamily, candidates: &[Subspace], qn: &QuasiNorm) -> Result<BetaAlphaReport, ExponentError> {
    let d = fam.source_dim();
    if qn.dim() != d {
        return Err(ExponentError::Shape(format!("quasi-norm on K^{}, family on K^{d}", qn.dim())));
    }
    if candidates.iter().any(|w| w.ambient() != d) {
        return Err(ExponentError::Shape(format!("candidates must live in K^{d}")));
    }
    if !candidates.iter().any(Subspace::is_full) {
        return Err(ExponentError::MissingFull);
    }
    let kernels: Vec<Subspace> = fam.samples().iter().map(Mat::kernel).collect();
    let vals: Vec<Option<ExtRat>> = candidates
        .par_iter()
        .map(|w| {
            if w.is_zero() {
                return Ok(None);
            }
            let mut best: Option<ExtRat> = None;
            for k in &kernels {
                let cap = w.intersect(k)?;
                let den = w.dim() - cap.dim();
                let v = if den == 0 {
                    ExtRat::Infinite
                } else {
                    ExtRat::Finite(alpha_or_zero(&cap, qn)? / Rat::from_integer(den.into()))
                };
                best = Some(match best {
                    Some(b) if b <= v => b,
                    _ => v,
                });
            }
            Ok(best)
        })
        .collect::<Result<_, ExponentError>>()?;
    let mut out: Option<(usize, ExtRat)> = None;
    for (i, v) in vals.into_iter().enumerate() {
        if let Some(v) = v {
            if out.as_ref().map_or(true, |(_, b)| v > *b) {
                out = Some((i, v));
            }
        }
    }
    let (argmax, value) = out.expect("full space is a nonzero candidate");
    Ok(BetaAlphaReport { value, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{NumberField, Scalar};
    use crate::exponents::pencil::{beta_formula, height_candidates};

    fn ones(d: usize) -> QuasiNorm {
        QuasiNorm::standard(vec![int(1); d]).unwrap()
    }

    #[test]
    fn growth_rates() {
        let qn = QuasiNorm::standard(vec![int(1), int(2)]).unwrap();
        assert_eq!(alpha_growth(&Subspace::full(2), &qn).unwrap().value, int(3));
        let r = alpha_growth(&Subspace::coordinate(2, &[1]), &qn).unwrap();
        assert_eq!((r.value, r.indices), (int(2), vec![1]));
        let w = Subspace::from_int_rows(3, &[vec![1, 1, 0]]);
        assert_eq!(alpha_growth(&w, &ones(3)).unwrap().value, int(1));
        assert!(alpha_growth(&Subspace::zero(2), &qn).is_err());
    }

    #[test]
    fn roth_case() {
        let k = NumberField::sqrt(2, "t").unwrap();
        let fam = HomFamily::new(vec![Mat::from_rows(vec![vec![Scalar::one(), Scalar::generator(&k)]]).unwrap()], "r2").unwrap();
        let c = height_candidates(2, 6);
        let b = beta_alpha_formula(&fam, &c, &ones(2)).unwrap();
        assert_eq!(b.value, ExtRat::Finite(int(1)));
        assert!(c[b.argmax].is_full());
        assert_eq!(beta_formula(&fam, &c).unwrap().value, b.value);
    }

    #[test]
    fn rational_kernel_is_infinite() {
        let fam = HomFamily::new(vec![Mat::from_i64(&[&[0, 1]])], "e2").unwrap();
        let b = beta_alpha_formula(&fam, &height_candidates(2, 1), &ones(2)).unwrap();
        assert_eq!(b.value, ExtRat::Infinite);
    }
}
