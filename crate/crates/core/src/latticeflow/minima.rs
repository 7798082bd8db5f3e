//! Certified successive minima of a fixed-point lattice basis.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::intlat::{combine, dot, lll, row_echelon_transform, shortest_outside_prefix};
use super::LatticeError;
use crate::exact::rat::{ln_bigint, ln_ratio, pow2_rat, ratio_to_f64};
use crate::exact::{Mat, Rat, RealInterval};

/// Columns of a basis as integers scaled by 2^-prec, each entry within
/// `radius` units in the last place of the true value.
#[derive(Clone, Debug)]
pub struct FixedBasis {
    pub prec: u32,
    pub cols: Vec<Vec<BigInt>>,
    pub radius: BigInt,
}

impl FixedBasis {
    /// Rounds an exact matrix; the radius covers the enclosure width.
    pub fn from_mat(m: &Mat, prec: u32) -> FixedBasis {
        let d = m.rows();
        let mut cols = vec![vec![BigInt::zero(); d]; m.cols()];
        let mut radius = BigInt::zero();
        let scale = pow2_rat(prec as i64);
        for i in 0..d {
            for (j, col) in cols.iter_mut().enumerate() {
                let iv = m.get(i, j).real_value(prec + 2);
                let (c, r) = round_interval(&iv, &scale);
                col[i] = c;
                radius = radius.max(r);
            }
        }
        FixedBasis { prec, cols, radius }
    }

    /// Rows of doubles; exact apart from the rounding to 2^-prec.
    pub fn from_f64_rows(rows: &[Vec<f64>], prec: u32) -> FixedBasis {
        let rats: Vec<Vec<Rat>> = rows.iter().map(|r| r.iter().map(|&x| crate::exact::rat::rat_from_f64(x)).collect()).collect();
        let m = Mat::from_rats(&rats);
        FixedBasis::from_mat(&m, prec)
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// Relative perturbation bound d·r·‖B_int⁻¹‖_F, with the inverse
    /// Frobenius norm computed exactly.
    pub fn relative_error(&self) -> Result<f64, LatticeError> {
        if self.radius.is_zero() {
            return Ok(0.0);
        }
        let d = self.dim();
        let rows: Vec<Vec<Rat>> = (0..d).map(|i| self.cols.iter().map(|c| Rat::from_integer(c[i].clone())).collect()).collect();
        let m = Mat::from_rats(&rows);
        let inv = m.inverse().map_err(|_| LatticeError::Singular)?;
        let fro2: Rat = inv.entries().iter().map(|s| {
            let r = s.as_rat().expect("rational entries");
            r * r
        }).sum();
        let r = ratio_to_f64(&self.radius, &BigInt::one());
        Ok(d as f64 * r * crate::exact::rat::rat_to_f64(&fro2).sqrt())
    }
}

/// Nearest fixed-point integer to an enclosure, and the ulp distance that
/// still covers both endpoints.
pub(crate) fn round_interval(iv: &RealInterval, scale: &Rat) -> (BigInt, BigInt) {
    let lo = &iv.lo * scale;
    let hi = &iv.hi * scale;
    let c = crate::exact::rat::round_rat(&((&lo + &hi) / Rat::from_integer(2.into())));
    let cr = Rat::from_integer(c.clone());
    let dev = (&cr - &lo).abs().max((&hi - &cr).abs());
    (c, crate::exact::rat::ceil_rat(&dev))
}

/// One successive minimum: exact squared norm of the rounded lattice
/// vector, and its coefficients in the input basis.
#[derive(Clone, Debug, Serialize)]
pub struct Minimum {
    #[serde(skip)]
    pub norm2: BigInt,
    #[serde(serialize_with = "crate::exact::rat::ser_ints")]
    pub coeffs: Vec<BigInt>,
    /// ln λ of the true lattice, midpoint estimate.
    pub log: f64,
    /// Half-width of the certified enclosure of ln λ.
    pub log_err: f64,
}

impl Minimum {
    pub fn value(&self) -> f64 {
        self.log.exp()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Minima {
    pub minima: Vec<Minimum>,
    pub relative_error: f64,
}

impl Minima {
    pub fn logs(&self) -> Vec<f64> {
        self.minima.iter().map(|m| m.log).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.minima.iter().map(Minimum::value).collect()
    }

    pub fn minimizers(&self) -> Vec<Vec<BigInt>> {
        self.minima.iter().map(|m| m.coeffs.clone()).collect()
    }
}

/// Largest relative perturbation accepted before asking for more bits.
pub const MAX_RELATIVE_ERROR: f64 = 1.0 / (1u64 << 30) as f64;

pub fn successive_minima(b: &FixedBasis) -> Result<Minima, LatticeError> {
    let rho = b.relative_error()?;
    if rho > MAX_RELATIVE_ERROR {
        return Err(LatticeError::PrecisionExhausted { prec: b.prec, relative_error: rho });
    }
    let d = b.dim();
    let ident: Vec<Vec<BigInt>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut basis = b.cols.clone();
    let mut t = ident;
    // coordinates of the chosen minimizers in the current basis
    let mut cur: Vec<Vec<BigInt>> = Vec::new();
    let mut out = Vec::with_capacity(d);
    let ln2p = b.prec as f64 * std::f64::consts::LN_2;
    let log_err = if rho == 0.0 { 0.0 } else { -(1.0 - rho).ln() };
    for k in 0..d {
        if k > 0 {
            let (v, vinv) = row_echelon_transform(&cur, d);
            basis = mul_cols(&basis, &vinv);
            t = mul_cols(&t, &vinv);
            cur = cur.iter().map(|x| v.iter().map(|row| dot(row, x)).collect()).collect();
        }
        let red = lll(basis, t, k, 99, 100);
        basis = red.basis;
        t = red.u;
        let (x, norm2) = shortest_outside_prefix(&basis, k);
        let coeffs = combine(&t, &x);
        debug_assert_eq!(dot(&combine(&b.cols, &coeffs), &combine(&b.cols, &coeffs)), norm2);
        out.push(Minimum { log: 0.5 * ln_bigint(&norm2) - ln2p, log_err, norm2, coeffs: canonical_sign(coeffs) });
        cur.push(x);
    }
    Ok(Minima { minima: out, relative_error: rho })
}

/// Columns of `basis·W`, with W given by rows.
fn mul_cols(basis: &[Vec<BigInt>], w: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = w.len();
    (0..d)
        .map(|j| {
            let x: Vec<BigInt> = (0..d).map(|i| w[i][j].clone()).collect();
            combine(basis, &x)
        })
        .collect()
}

/// ±x normalized so the first nonzero entry is positive.
pub fn canonical_sign(x: Vec<BigInt>) -> Vec<BigInt> {
    if x.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative()) {
        x.into_iter().map(|v| -v).collect()
    } else {
        x
    }
}

/// ln of sqrt(n)·2^-p for exact comparisons in tests and reports.
pub fn log_norm(norm2: &BigInt, prec: u32) -> f64 {
    0.5 * ln_ratio(norm2, &BigInt::one()) - prec as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fb(rows: &[&[f64]]) -> FixedBasis {
        FixedBasis::from_f64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), 40)
    }

    #[test]
    fn identity() {
        let m = successive_minima(&fb(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_eq!(m.values(), vec![1.0, 1.0]);
        let mut xs = m.minimizers();
        xs.sort();
        assert_eq!(xs, vec![vec![BigInt::zero(), BigInt::one()], vec![BigInt::one(), BigInt::zero()]]);
    }

    #[test]
    fn orthogonal() {
        let m = successive_minima(&fb(&[&[0.5, 0.0], &[0.0, 2.0]])).unwrap();
        let v = m.values();
        assert!((v[0] - 0.5).abs() < 1e-12 && (v[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sheared() {
        // columns (1,0), (0.6,1)
        let m = successive_minima(&fb(&[&[1.0, 0.6], &[0.0, 1.0]])).unwrap();
        let v = m.values();
        assert!((v[0] - 1.0).abs() < 1e-9);
        assert!((v[1] - 1.16f64.sqrt()).abs() < 1e-9);
        // ±(−1, 1), stored with a positive leading entry
        assert_eq!(m.minima[1].coeffs, vec![BigInt::one(), BigInt::from(-1)]);
    }

    #[test]
    fn skewed_basis_needs_reduction() {
        // same lattice as ℤ² written with a long basis
        let m = successive_minima(&fb(&[&[1.0, 37.0], &[0.0, 1.0]])).unwrap();
        assert!(m.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn precision_exhaustion() {
        let b = FixedBasis { prec: 4, cols: vec![vec![1.into(), 0.into()], vec![0.into(), 1.into()]], radius: 1.into() };
        assert!(matches!(successive_minima(&b), Err(LatticeError::PrecisionExhausted { .. })));
    }
}
