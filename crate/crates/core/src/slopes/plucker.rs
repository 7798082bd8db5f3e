//! Linear span of ρ(L) = ⊕_{k=1}^{d} ∧^k L over a family.

use itertools::Itertools;

use crate::exact::{ExactError, Mat, Scalar, Subspace};

use super::flow::MatrixFamily;

/// Entries of ∧^k L: minors on (row set, column set), both lexicographic.
pub fn wedge_power(l: &Mat, k: usize) -> Result<Vec<Scalar>, ExactError> {
    let d = l.rows();
    let sets: Vec<Vec<usize>> = (0..d).combinations(k).collect();
    let mut out = Vec::with_capacity(sets.len() * sets.len());
    for r in &sets {
        let rows = l.select_rows(r);
        for c in &sets {
            out.push(rows.select_cols(c).det()?);
        }
    }
    Ok(out)
}

pub fn rho(l: &Mat) -> Result<Vec<Scalar>, ExactError> {
    let mut v = Vec::new();
    for k in 1..=l.rows() {
        v.extend(wedge_power(l, k)?);
    }
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct PluckerSpan {
    pub dimension: usize,
    /// Ambient dimension Σ_k C(d,k)².
    pub ambient: usize,
    pub basis: Subspace,
}

pub fn plucker_span(fam: &MatrixFamily) -> Result<PluckerSpan, ExactError> {
    let rows: Vec<Vec<Scalar>> = fam.samples().iter().map(rho).collect::<Result<_, _>>()?;
    let ambient = rows[0].len();
    let basis = Subspace::from_rows(ambient, rows)?;
    Ok(PluckerSpan { dimension: basis.dim(), ambient, basis })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_spans() {
        let one = MatrixFamily::singleton(Mat::from_i64(&[&[1, 2], &[3, 4]])).unwrap();
        let s = plucker_span(&one).unwrap();
        assert_eq!((s.dimension, s.ambient), (1, 5));
        let two = MatrixFamily::new(vec![Mat::identity(2), Mat::from_i64(&[&[2, 0], &[0, 1]])], "diag").unwrap();
        assert_eq!(plucker_span(&two).unwrap().dimension, 2);
    }

    #[test]
    fn full_group_saturates() {
        let samples = vec![
            Mat::from_i64(&[&[1, 0], &[0, 1]]),
            Mat::from_i64(&[&[2, 1], &[1, 1]]),
            Mat::from_i64(&[&[0, 1], &[1, 3]]),
            Mat::from_i64(&[&[1, 4], &[0, 2]]),
            Mat::from_i64(&[&[3, 0], &[5, 1]]),
            Mat::from_i64(&[&[1, 1], &[-1, 2]]),
        ];
        let fam = MatrixFamily::new(samples, "gl2").unwrap();
        assert_eq!(plucker_span(&fam).unwrap().dimension, 5);
    }
}
