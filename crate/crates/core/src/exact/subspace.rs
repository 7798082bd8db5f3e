//! Subspaces of K^d in canonical form.
//!
//! The basis is the reduced row-echelon form of any spanning set. Over ℚ each
//! row is additionally scaled to a primitive integer vector with positive
//! leading entry. Either way the representation is unique, so derived
//! equality is subspace equality.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::mat::Mat;
use super::rat::{gcd_of, lcm_of_denominators, Rat};
use super::scalar::Scalar;
use super::ExactError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_rows(ambient: usize, rows: Vec<Vec<Scalar>>) -> Result<Subspace, ExactError> {
        if let Some(r) = rows.iter().find(|r| r.len() != ambient) {
            return Err(ExactError::DimensionMismatch { expected: ambient, got: r.len() });
        }
        if rows.is_empty() {
            return Ok(Subspace::zero(ambient));
        }
        let m = Mat::from_rows(rows)?;
        let r = m.rref()?;
        let mut out = Vec::with_capacity(r.rank);
        for i in 0..r.rank {
            out.push(normalize_row(r.mat.row(i)));
        }
        let basis = Mat::from_rows(out)?;
        Ok(Subspace { ambient, basis, pivots: r.pivots })
    }

    pub fn from_mat_rows(m: &Mat) -> Result<Subspace, ExactError> {
        Subspace::from_rows(m.cols(), m.row_vecs())
    }

    pub fn from_int_rows(ambient: usize, rows: &[Vec<i64>]) -> Subspace {
        let rows = rows.iter().map(|r| r.iter().map(|&x| Scalar::from_i64(x)).collect()).collect();
        Subspace::from_rows(ambient, rows).expect("integer rows of ambient length")
    }

    pub fn from_bigint_rows(ambient: usize, rows: &[Vec<BigInt>]) -> Result<Subspace, ExactError> {
        let rows = rows.iter().map(|r| r.iter().cloned().map(Scalar::from_bigint).collect()).collect();
        Subspace::from_rows(ambient, rows)
    }

    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Mat::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Subspace {
        Subspace { ambient, basis: Mat::identity(ambient), pivots: (0..ambient).collect() }
    }

    /// Span of the standard basis vectors with the given 0-based indices.
    pub fn coordinate(ambient: usize, idx: &[usize]) -> Subspace {
        let rows = idx
            .iter()
            .map(|&i| (0..ambient).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
        Subspace::from_rows(ambient, rows).expect("coordinate rows")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_rational(&self) -> bool {
        self.basis.is_rational()
    }

    /// Primitive integer basis rows; `None` for irrational subspaces.
    pub fn integer_rows(&self) -> Option<Vec<Vec<BigInt>>> {
        if !self.is_rational() {
            return None;
        }
        Some(
            (0..self.dim())
                .map(|i| self.basis.row(i).iter().map(|s| s.as_rat().unwrap().to_integer()).collect())
                .collect(),
        )
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), ExactError> {
        if self.ambient != other.ambient {
            return Err(ExactError::DimensionMismatch { expected: self.ambient, got: other.ambient });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, ExactError> {
        self.check_ambient(other)?;
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        Subspace::from_rows(self.ambient, rows)
    }

    /// Annihilator {y : ⟨y, v⟩ = 0 for all v ∈ self} under the standard pairing.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.ambient);
        }
        self.basis.kernel()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, ExactError> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_full() {
            return Ok(self.clone());
        }
        if other.is_zero() || self.is_full() {
            return Ok(other.clone());
        }
        let ann = self.annihilator().sum(&other.annihilator())?;
        let out = ann.annihilator();
        debug_assert_eq!(out.dim() + self.sum(other)?.dim(), self.dim() + other.dim());
        Ok(out)
    }

    /// Membership of an arbitrary vector by reduction against the pivots.
    pub fn contains_vec(&self, x: &[Scalar]) -> Result<bool, ExactError> {
        if x.len() != self.ambient {
            return Err(ExactError::DimensionMismatch { expected: self.ambient, got: x.len() });
        }
        let mut r = x.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].checked_div(self.basis.get(i, p))?;
            for (j, b) in self.basis.row(i).iter().enumerate() {
                if !b.is_zero() {
                    r[j] = r[j].checked_sub(&f.checked_mul(b)?)?;
                }
            }
        }
        Ok(r.iter().all(Scalar::is_zero))
    }

    pub fn contains(&self, x: &[BigInt]) -> Result<bool, ExactError> {
        let v: Vec<Scalar> = x.iter().cloned().map(Scalar::from_bigint).collect();
        self.contains_vec(&v)
    }

    pub fn contains_i64(&self, x: &[i64]) -> bool {
        let v: Vec<Scalar> = x.iter().map(|&a| Scalar::from_i64(a)).collect();
        self.contains_vec(&v).expect("ambient length")
    }

    /// self ≤ other.
    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, ExactError> {
        self.check_ambient(other)?;
        for i in 0..self.dim() {
            if !other.contains_vec(self.basis.row(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Image L·V = span{L v : v ∈ V}.
    pub fn image(&self, l: &Mat) -> Result<Subspace, ExactError> {
        if l.cols() != self.ambient {
            return Err(ExactError::DimensionMismatch { expected: l.cols(), got: self.ambient });
        }
        let rows = (0..self.dim()).map(|i| l.mul_vec(self.basis.row(i))).collect::<Result<Vec<_>, _>>()?;
        Subspace::from_rows(l.rows(), rows)
    }

    /// Plücker coordinates of the canonical basis: the k×k minors over the
    /// column sets in lexicographic order.
    pub fn wedge_coords(&self) -> Result<Vec<Scalar>, ExactError> {
        if self.is_zero() {
            return Err(ExactError::ZeroSubspace);
        }
        wedge_of_rows(&self.basis)
    }

    /// Total order on representations, used for deterministic sorting.
    pub fn repr_cmp(&self, other: &Subspace) -> Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then(self.dim().cmp(&other.dim()))
            .then_with(|| {
                for (a, b) in self.basis.entries().iter().zip(other.basis.entries()) {
                    let o = scalar_repr_cmp(a, b);
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }

    pub fn rows_literal(&self) -> Vec<Vec<String>> {
        self.basis.row_vecs().iter().map(|r| r.iter().map(Scalar::to_literal).collect()).collect()
    }
}

/// k×k minors of a k×d matrix over the column sets in lexicographic order.
pub fn wedge_of_rows(m: &Mat) -> Result<Vec<Scalar>, ExactError> {
    let k = m.rows();
    (0..m.cols()).combinations(k).map(|cols| m.select_cols(&cols).det()).collect()
}

fn scalar_repr_cmp(a: &Scalar, b: &Scalar) -> Ordering {
    match (a, b) {
        (Scalar::Rat(x), Scalar::Rat(y)) => x.cmp(y),
        (Scalar::Rat(_), Scalar::Alg(_)) => Ordering::Less,
        (Scalar::Alg(_), Scalar::Rat(_)) => Ordering::Greater,
        _ => a.coords(0).cmp(&b.coords(0)),
    }
}

fn normalize_row(row: &[Scalar]) -> Vec<Scalar> {
    if row.iter().any(|s| s.as_rat().is_none()) {
        return row.to_vec();
    }
    let rats: Vec<&Rat> = row.iter().map(|s| s.as_rat().unwrap()).collect();
    let den = lcm_of_denominators(rats.iter().copied());
    let ints: Vec<BigInt> = rats.iter().map(|r| (*r * Rat::from_integer(den.clone())).to_integer()).collect();
    let mut g = gcd_of(ints.iter());
    if g.is_zero() {
        g = BigInt::one();
    }
    let lead_neg = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if lead_neg {
        g = -g;
    }
    ints.into_iter().map(|x| Scalar::from_bigint(x / &g)).collect()
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{:?}⟩", self.basis)
    }
}
