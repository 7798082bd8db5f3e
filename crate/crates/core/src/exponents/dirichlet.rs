//! Dirichlet-type witnesses: a nonzero integer point of W in the box
//! |L_{i_ℓ}(v)| ≤ Q^{−(k−s)} (ℓ ≤ r), ≤ c₀ (r < ℓ ≤ s), ≤ Q^r (ℓ > s).

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::pencil::{l_y, restricted_rank};
use super::ExponentError;
use crate::exact::rat::{fmt_rat, int, ln_rat};
use crate::exact::{Mat, Rat, Scalar, Subspace};
use crate::latticeflow::intlat::{combine, row_echelon_transform};
use crate::latticeflow::minima::canonical_sign;

/// Lattice points enumerated per call before giving up.
pub const SEARCH_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, Serialize)]
pub enum WitnessKind {
    /// r = 0: the forms in I vanish on W, any lattice vector is a witness.
    Kernel,
    /// Box search succeeded at this c₀.
    Box { c0: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "crate::exact::rat::ser_ints")]
    pub v: Vec<BigInt>,
    pub kind: WitnessKind,
    /// Greedy form indices i_1, …, i_k, 0-based.
    pub selected: Vec<usize>,
    pub k: usize,
    pub r: usize,
    pub s: usize,
    #[serde(serialize_with = "crate::exact::rat::ser_rats")]
    pub bounds: Vec<Rat>,
    /// (k−s)|I| / (r(m+n−|J|)).
    #[serde(serialize_with = "crate::exact::rat::ser_opt_rat")]
    pub ratio: Option<Rat>,
    /// ln C with ∏_{i<m}|L_i(v)| = C·∏_j|L_{m+j}(v)|^{−ratio}; `None` if a
    /// factor vanishes.
    pub log_c: Option<f64>,
    pub points_searched: u64,
}

/// ℤ-basis of W ∩ ℤ^N as rows.
pub fn lattice_basis(w: &Subspace) -> Result<Vec<Vec<BigInt>>, ExponentError> {
    let n = w.ambient();
    let ann = w.annihilator();
    let rows = ann.integer_rows().ok_or_else(|| ExponentError::Shape("W must be rational".into()))?;
    if rows.is_empty() {
        return Ok((0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect()).collect());
    }
    // V·Aᵀ = [H; 0]: the last N − rank rows of V span ker_ℤ A
    let (v, _) = row_echelon_transform(&rows, n);
    Ok(v[rows.len()..].to_vec())
}

fn pow(q: &Rat, e: i64) -> Rat {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

fn check_sets(m: usize, n: usize, i: &[usize], j: &[usize]) -> Result<(), ExponentError> {
    if i.is_empty() || i.iter().any(|&x| x >= m) {
        return Err(ExponentError::Indices(format!("I = {i:?} must be a nonempty subset of 0..{m}")));
    }
    if (0..m).any(|x| !j.contains(&x)) || j.iter().any(|&x| x >= m + n) || j.len() >= m + n {
        return Err(ExponentError::Indices(format!("J = {j:?} must contain 0..{m} and be proper in 0..{}", m + n)));
    }
    Ok(())
}

pub fn dirichlet_witness(y: &Mat, w: &Subspace, i_set: &[usize], j_set: &[usize], q: &Rat) -> Result<Witness, ExponentError> {
    let (m, n) = (y.rows(), y.cols());
    check_sets(m, n, i_set, j_set)?;
    if w.ambient() != m + n {
        return Err(ExponentError::Shape(format!("W must live in K^{}", m + n)));
    }
    if !q.is_positive() {
        return Err(ExponentError::Shape("Q must be positive".into()));
    }
    let l = l_y(y);
    let k = w.dim();
    let r = restricted_rank(&l.select_rows(i_set), w)?;
    let s = restricted_rank(&l.select_rows(j_set), w)?;
    if s >= k {
        return Err(ExponentError::Trivial { s, k });
    }
    let basis = lattice_basis(w)?;
    if r == 0 {
        let v = basis.iter().min_by_key(|b| b.iter().map(|x| x * x).sum::<BigInt>()).expect("W is nonzero").clone();
        return Ok(Witness {
            v: canonical_sign(v),
            kind: WitnessKind::Kernel,
            selected: Vec::new(),
            k,
            r,
            s,
            bounds: Vec::new(),
            ratio: None,
            log_c: None,
            points_searched: 0,
        });
    }
    // greedy independent selection: from I up to rank r, J up to s, then any
    let mut sel: Vec<usize> = Vec::new();
    let pools: [(Vec<usize>, usize); 3] = [(i_set.to_vec(), r), (j_set.to_vec(), s), ((0..m + n).collect(), k)];
    for (pool, target) in pools {
        for &c in &pool {
            if sel.len() == target {
                break;
            }
            if sel.contains(&c) {
                continue;
            }
            let mut t = sel.clone();
            t.push(c);
            if restricted_rank(&l.select_rows(&t), w)? == t.len() {
                sel = t;
            }
        }
    }
    debug_assert_eq!(sel.len(), k);
    let forms = l.select_rows(&sel);
    // G z = forms applied to Σ z_j basis_j
    let zt = Mat::from_rows(basis.iter().map(|b| b.iter().cloned().map(Scalar::from_bigint).collect()).collect())?;
    let g = forms.mul(&zt.transpose())?;
    let ginv = g.inverse()?.to_f64_rows();
    let gf = g.to_f64_rows();
    let (ki, ri) = ((k - s) as i64, r as i64);
    let mut searched = 0u64;
    let mut c0 = int(1);
    loop {
        let bounds: Vec<Rat> = (0..k)
            .map(|l| {
                if l < r {
                    pow(q, -ki)
                } else if l < s {
                    c0.clone()
                } else {
                    pow(q, ri)
                }
            })
            .collect();
        let bf: Vec<f64> = bounds.iter().map(crate::exact::rat::rat_to_f64).collect();
        let half: Vec<i64> = ginv
            .iter()
            .map(|row| (row.iter().zip(&bf).map(|(a, b)| a.abs() * b).sum::<f64>() * (1.0 + 1e-9)).floor() as i64)
            .collect();
        let count: f64 = half.iter().map(|h| (2 * h + 1) as f64).product();
        if searched as f64 + count > SEARCH_CAP as f64 {
            return Err(ExponentError::SearchCap(SEARCH_CAP));
        }
        searched += count as u64;
        let mut best: Option<(BigInt, Vec<BigInt>)> = None;
        let mut z = half.iter().map(|h| -h).collect::<Vec<i64>>();
        'outer: loop {
            if z.iter().any(|&v| v != 0) {
                let near = gf.iter().zip(&bf).all(|(row, b)| {
                    let val: f64 = row.iter().zip(&z).map(|(a, &x)| a * x as f64).sum();
                    val.abs() <= b * (1.0 + 1e-9) + 1e-12
                });
                if near {
                    let zb: Vec<BigInt> = z.iter().map(|&x| x.into()).collect();
                    let v = combine(&basis, &zb);
                    if in_box(&forms, &v, &bounds)? {
                        let v = canonical_sign(v);
                        let n2: BigInt = v.iter().map(|x| x * x).sum();
                        if best.as_ref().map_or(true, |(b, bv)| n2 < *b || (n2 == *b && v < *bv)) {
                            best = Some((n2, v));
                        }
                    }
                }
            }
            for (zi, h) in z.iter_mut().zip(&half) {
                if *zi < *h {
                    *zi += 1;
                    continue 'outer;
                }
                *zi = -h;
            }
            break;
        }
        if let Some((_, v)) = best {
            let ratio = Rat::new(((k - s) * i_set.len()).into(), (r * (m + n - j_set.len())).into());
            let log_c = product_constant(&l, m, &v, &ratio)?;
            return Ok(Witness {
                v,
                kind: WitnessKind::Box { c0: fmt_rat(&c0) },
                selected: sel,
                k,
                r,
                s,
                bounds,
                ratio: Some(ratio),
                log_c,
                points_searched: searched,
            });
        }
        c0 = c0 * int(2);
    }
}

fn in_box(forms: &Mat, v: &[BigInt], bounds: &[Rat]) -> Result<bool, ExponentError> {
    let vals = forms.mul_int_vec(v)?;
    Ok(vals.iter().zip(bounds).all(|(x, b)| x.abs().cmp_real(&Scalar::Rat(b.clone())) != std::cmp::Ordering::Greater))
}

fn ln_abs(x: &Scalar) -> Option<f64> {
    if x.is_zero() {
        return None;
    }
    let mut bits = 64;
    loop {
        let iv = x.real_value(bits).abs();
        if iv.lo.is_positive() {
            return Some(0.5 * (ln_rat(&iv.lo) + ln_rat(&iv.hi)));
        }
        bits *= 2;
    }
}

fn product_constant(l: &Mat, m: usize, v: &[BigInt], ratio: &Rat) -> Result<Option<f64>, ExponentError> {
    let vals = l.mul_int_vec(v)?;
    let rf = crate::exact::rat::rat_to_f64(ratio);
    let mut acc = 0.0;
    for (i, x) in vals.iter().enumerate() {
        match ln_abs(x) {
            None => return Ok(None),
            Some(lx) => acc += if i < m { lx } else { rf * lx },
        }
    }
    Ok(Some(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::NumberField;
    use num_traits::Zero;

    #[test]
    fn sqrt2_box() {
        let k = NumberField::sqrt(2, "t").unwrap();
        let y = Mat::from_rows(vec![vec![Scalar::generator(&k)]]).unwrap();
        let wit = dirichlet_witness(&y, &Subspace::full(2), &[0], &[0], &int(10)).unwrap();
        assert_eq!(wit.v, vec![BigInt::from(7), BigInt::from(5)]);
        assert_eq!((wit.k, wit.r, wit.s), (2, 1, 1));
        assert!(matches!(wit.kind, WitnessKind::Box { .. }));
    }

    #[test]
    fn kernel_branch() {
        let y = Mat::from_i64(&[&[0]]);
        let wit = dirichlet_witness(&y, &Subspace::coordinate(2, &[1]), &[0], &[0], &int(10)).unwrap();
        assert!(matches!(wit.kind, WitnessKind::Kernel));
        assert_eq!(wit.v, vec![BigInt::zero(), BigInt::from(1)]);
    }

    #[test]
    fn unit_box() {
        let k = NumberField::sqrt(2, "t").unwrap();
        let y = Mat::from_rows(vec![vec![Scalar::generator(&k)]]).unwrap();
        let wit = dirichlet_witness(&y, &Subspace::full(2), &[0], &[0], &int(1)).unwrap();
        assert!(wit.v.iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn rejects_trivial_and_bad_sets() {
        let y = Mat::from_i64(&[&[3]]);
        // W a line with L_1 ≠ 0 on it: s = 1 = k
        let w = Subspace::from_int_rows(2, &[vec![1, 1]]);
        assert!(matches!(dirichlet_witness(&y, &w, &[0], &[0], &int(2)), Err(ExponentError::Trivial { .. })));
        assert!(dirichlet_witness(&y, &Subspace::full(2), &[], &[0], &int(2)).is_err());
        assert!(dirichlet_witness(&y, &Subspace::full(2), &[0], &[0, 1], &int(2)).is_err());
    }

    #[test]
    fn saturated_basis() {
        // ⟨(2, 4, 0), (0, 0, 3)⟩ ∩ ℤ³ has basis (1, 2, 0), (0, 0, 1)
        let w = Subspace::from_int_rows(3, &[vec![2, 4, 0], vec![0, 0, 3]]);
        let b = lattice_basis(&w).unwrap();
        assert_eq!(b.len(), 2);
        let bs = Subspace::from_bigint_rows(3, &b).unwrap();
        assert_eq!(bs, w);
        // covolume check: the Gram determinant equals that of the primitive basis
        let gram = |r: &[Vec<BigInt>]| {
            let g = |a: &[BigInt], c: &[BigInt]| a.iter().zip(c).map(|(x, y)| x * y).sum::<BigInt>();
            g(&r[0], &r[0]) * g(&r[1], &r[1]) - g(&r[0], &r[1]) * g(&r[0], &r[1])
        };
        let prim = vec![vec![1.into(), 2.into(), 0.into()], vec![0.into(), 0.into(), 1.into()]];
        assert_eq!(gram(&b), gram(&prim));
    }
}
