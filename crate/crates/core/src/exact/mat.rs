//! Dense matrices over one exact field context, row-major.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::field::NumberField;
use super::rat::Rat;
use super::scalar::{same_field, Scalar};
use super::subspace::Subspace;
use super::ExactError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

/// Result of Gauss–Jordan elimination.
#[derive(Clone, Debug)]
pub struct Rref {
    pub mat: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Mat, ExactError> {
        if entries.len() != rows * cols {
            return Err(ExactError::DimensionMismatch { expected: rows * cols, got: entries.len() });
        }
        let mut ctx: Option<&Arc<NumberField>> = None;
        for e in &entries {
            if let Some(f) = e.field() {
                match ctx {
                    None => ctx = Some(f),
                    Some(g) if !same_field(f, g) => return Err(ExactError::FieldMismatch),
                    _ => {}
                }
            }
        }
        Ok(Mat { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Mat, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(ExactError::DimensionMismatch { expected: c, got: bad.len() });
        }
        Mat::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor for integer test data.
    pub fn from_i64(rows: &[&[i64]]) -> Mat {
        let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| Scalar::from_i64(x)).collect()).collect();
        Mat::from_rows(rows).expect("ragged integer rows")
    }

    pub fn from_rats(rows: &[Vec<Rat>]) -> Mat {
        let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().cloned().map(Scalar::Rat).collect()).collect();
        Mat::from_rows(rows).expect("ragged rational rows")
    }

    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, entries: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn diag(d: &[Scalar]) -> Mat {
        let n = d.len();
        let mut m = Mat::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m.entries[i * n + i] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// The number field the entries live in, if any entry is irrational.
    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.entries.iter().find_map(Scalar::field)
    }

    pub fn is_rational(&self) -> bool {
        self.field().is_none()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j).clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, entries: out }
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat, ExactError> {
        if self.cols != other.rows {
            return Err(ExactError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Scalar::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc.checked_add(&a.checked_mul(other.get(k, j))?)?;
                }
                out.push(acc);
            }
        }
        Ok(Mat { rows: self.rows, cols: other.cols, entries: out })
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, ExactError> {
        if self.cols != v.len() {
            return Err(ExactError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.checked_add(&a.checked_mul(x)?)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn mul_int_vec(&self, v: &[BigInt]) -> Result<Vec<Scalar>, ExactError> {
        let v: Vec<Scalar> = v.iter().cloned().map(Scalar::from_bigint).collect();
        self.mul_vec(&v)
    }

    /// Rows selected in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        let mut out = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            out.extend_from_slice(self.row(i));
        }
        Mat { rows: idx.len(), cols: self.cols, entries: out }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        let mut out = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            for &j in idx {
                out.push(self.get(i, j).clone());
            }
        }
        Mat { rows: self.rows, cols: idx.len(), entries: out }
    }

    pub fn vstack(&self, other: &Mat) -> Result<Mat, ExactError> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(ExactError::DimensionMismatch { expected: self.cols, got: other.cols });
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Mat::new(self.rows + other.rows, cols, entries)
    }

    /// Gauss–Jordan elimination to reduced row-echelon form.
    pub fn rref(&self) -> Result<Rref, ExactError> {
        let mut m = self.row_vecs();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(r, p);
            let inv = m[r][c].inv()?;
            if !inv.is_one() {
                for j in c..self.cols {
                    m[r][j] = m[r][j].checked_mul(&inv)?;
                }
            }
            for i in 0..self.rows {
                if i == r || m[i][c].is_zero() {
                    continue;
                }
                let f = m[i][c].clone();
                for j in c..self.cols {
                    if m[r][j].is_zero() {
                        continue;
                    }
                    let t = f.checked_mul(&m[r][j])?;
                    m[i][j] = m[i][j].checked_sub(&t)?;
                }
            }
            pivots.push(c);
            r += 1;
        }
        let entries = m.into_iter().flatten().collect();
        Ok(Rref { mat: Mat { rows: self.rows, cols: self.cols, entries }, rank: r, pivots })
    }

    pub fn rank(&self) -> usize {
        self.rref().expect("validated field context").rank
    }

    /// Right kernel {x : self·x = 0} in canonical form.
    pub fn kernel(&self) -> Subspace {
        let Rref { mat, rank, pivots } = self.rref().expect("validated field context");
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for f in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![Scalar::zero(); self.cols];
            v[f] = Scalar::one();
            for (i, &p) in pivots.iter().enumerate().take(rank) {
                v[p] = -mat.get(i, f);
            }
            basis.push(v);
        }
        Subspace::from_rows(self.cols, basis).expect("kernel vectors share the matrix field")
    }

    pub fn det(&self) -> Result<Scalar, ExactError> {
        if !self.is_square() {
            return Err(ExactError::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut m = self.row_vecs();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Ok(Scalar::zero()) };
            if p != c {
                m.swap(c, p);
                det = -det;
            }
            det = det.checked_mul(&m[c][c])?;
            let inv = m[c][c].inv()?;
            for i in c + 1..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = m[i][c].checked_mul(&inv)?;
                for j in c..n {
                    let t = f.checked_mul(&m[c][j])?;
                    m[i][j] = m[i][j].checked_sub(&t)?;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Mat, ExactError> {
        if !self.is_square() {
            return Err(ExactError::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut aug = Vec::with_capacity(n * 2 * n);
        for i in 0..n {
            aug.extend_from_slice(self.row(i));
            for j in 0..n {
                aug.push(if i == j { Scalar::one() } else { Scalar::zero() });
            }
        }
        let aug = Mat::new(n, 2 * n, aug)?;
        let r = aug.rref()?;
        if r.pivots.iter().copied().take(n).ne(0..n) || r.rank < n {
            return Err(ExactError::Singular);
        }
        let right: Vec<usize> = (n..2 * n).collect();
        Ok(r.mat.select_cols(&right))
    }

    /// Solves self·x = b for square nonsingular self.
    pub fn solve(&self, b: &[Scalar]) -> Result<Vec<Scalar>, ExactError> {
        self.inverse()?.mul_vec(b)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(Scalar::to_f64).collect()).collect()
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| format!("[{}]", self.row(i).iter().map(Scalar::to_literal).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_identity() {
        let i3 = Mat::identity(3);
        let r = i3.rref().unwrap();
        assert_eq!(r.mat, i3);
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn kernel_of_row() {
        let k = Mat::from_i64(&[&[1, 1]]).kernel();
        assert_eq!(k, Subspace::from_int_rows(2, &[vec![1, -1]]));
    }

    #[test]
    fn triangular_det() {
        let f = NumberField::sqrt(2, "t").unwrap();
        let s = Scalar::generator(&f);
        let m = Mat::from_rows(vec![vec![Scalar::one(), s], vec![Scalar::zero(), Scalar::one()]]).unwrap();
        assert_eq!(m.det().unwrap(), Scalar::one());
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Mat::identity(2));
    }

    #[test]
    fn singular_inverse() {
        let m = Mat::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.inverse(), Err(ExactError::Singular));
        assert!(m.det().unwrap().is_zero());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Scalar::generator(&NumberField::sqrt(2, "t").unwrap());
        let b = Scalar::generator(&NumberField::sqrt(3, "u").unwrap());
        assert_eq!(Mat::from_rows(vec![vec![a, b]]).unwrap_err(), ExactError::FieldMismatch);
    }

    #[test]
    fn solve_small() {
        let m = Mat::from_i64(&[&[2, 1], &[1, 3]]);
        let x = m.solve(&[Scalar::from_i64(3), Scalar::from_i64(5)]).unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![Scalar::from_i64(3), Scalar::from_i64(5)]);
    }
}
