//! Scan for integer solutions of the product inequality, in order of
//! increasing sup-norm.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use super::ScanError;
use crate::exact::rat::ln_rat;
use crate::exact::{Mat, Rat, Scalar, Subspace};

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub l: Mat,
    pub epsilon: Rat,
    pub height_bound: u64,
    pub include_zero_products: bool,
}

impl ScanConfig {
    pub fn new(l: Mat, epsilon: Rat, height_bound: u64) -> Result<ScanConfig, ScanError> {
        let cfg = ScanConfig { l, epsilon, height_bound, include_zero_products: true };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if !self.l.is_square() || self.l.det()?.is_zero() {
            return Err(ScanError::Config("L must be square and invertible".into()));
        }
        if !self.epsilon.is_positive() {
            return Err(ScanError::Config("epsilon must be positive".into()));
        }
        if self.height_bound < 1 {
            return Err(ScanError::Config("height bound must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    #[serde(serialize_with = "crate::exact::rat::ser_ints")]
    pub x: Vec<BigInt>,
    /// Euclidean norm.
    pub norm: f64,
    /// Enclosure of ln ∏|L_i(x)|; `None` when the product is exactly zero.
    pub product_log: Option<(f64, f64)>,
    pub assigned_subspace: Option<usize>,
}

impl Solution {
    pub fn is_zero_product(&self) -> bool {
        self.product_log.is_none()
    }

    pub fn x_i64(&self) -> Vec<i64> {
        self.x.iter().map(|v| i64::try_from(v).expect("scan coordinates fit i64")).collect()
    }
}

/// ∏ L_i(x) exactly.
pub fn form_product(l: &Mat, x: &[i64]) -> Scalar {
    let xs: Vec<BigInt> = x.iter().map(|&v| v.into()).collect();
    let lx = l.mul_int_vec(&xs).expect("dimension checked");
    lx.iter().fold(Scalar::one(), |acc, v| &acc * v)
}

/// Exact test of P·‖x‖^ε ≤ 1 with ε = p/q: sign of P^{2q}·S^p − 1.
pub fn satisfies_exact(prod: &Scalar, norm2: &BigInt, eps: &Rat) -> bool {
    if prod.is_zero() {
        return true;
    }
    let (p, q) = (eps.numer(), eps.denom());
    let q2 = u32::try_from(q * 2).expect("ε denominator too large");
    let p = u32::try_from(p).expect("ε numerator too large");
    let lhs = &prod.pow(q2) * &Scalar::from_bigint(norm2.pow(p));
    lhs.cmp_real(&Scalar::one()) != std::cmp::Ordering::Greater
}

/// Enclosure of ln|P| for nonzero P.
pub fn product_log(prod: &Scalar, bits: u32) -> Option<(f64, f64)> {
    if prod.is_zero() {
        return None;
    }
    let mut b = bits;
    loop {
        let iv = prod.real_value(b).abs();
        if iv.lo.is_positive() {
            return Some((ln_rat(&iv.lo), ln_rat(&iv.hi)));
        }
        b *= 2;
    }
}

struct F64Forms {
    rows: Vec<Vec<f64>>,
    abs_rows: Vec<Vec<f64>>,
}

impl F64Forms {
    fn new(l: &Mat) -> F64Forms {
        let rows: Vec<Vec<f64>> = (0..l.rows()).map(|i| l.row(i).iter().map(Scalar::to_f64).collect()).collect();
        let abs_rows = rows.iter().map(|r| r.iter().map(|v| v.abs()).collect()).collect();
        F64Forms { rows, abs_rows }
    }

    /// Lower bound for ln∏|L_i(x)|, −∞ if some factor may vanish.
    fn log_lower(&self, x: &[i64]) -> f64 {
        let mut acc = 0.0;
        for (r, a) in self.rows.iter().zip(&self.abs_rows) {
            let v: f64 = r.iter().zip(x).map(|(c, &xi)| c * xi as f64).sum();
            let mag: f64 = a.iter().zip(x).map(|(c, &xi)| c * (xi as f64).abs()).sum();
            let lo = v.abs() - mag * 1e-13 - 1e-300;
            if lo <= 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += lo.ln();
        }
        acc
    }
}

fn is_canonical(x: &[i64]) -> bool {
    x.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0)
}

/// Canonical nonzero x in [−n, n]^d with |L_i(x)| ≤ 1 for some i, ordered by
/// (sup-norm, x). A product ≤ ‖x‖^{−ε} ≤ 1 forces a factor ≤ 1, so this
/// covers every solution; for each form the pivot coordinate is solved for
/// instead of enumerated.
fn slab_candidates(forms: &F64Forms, n: i64) -> Vec<Vec<i64>> {
    let d = forms.rows.len();
    let mut out: Vec<Vec<i64>> = Vec::new();
    for row in &forms.rows {
        let j = (0..d).max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs())).expect("d ≥ 1");
        let c = row[j];
        let free: Vec<usize> = (0..d).filter(|&k| k != j).collect();
        let firsts: Vec<i64> = if free.is_empty() { vec![0] } else { (-n..=n).collect() };
        let part: Vec<Vec<i64>> = firsts
            .into_par_iter()
            .flat_map_iter(|x0| {
                let mut found = Vec::new();
                let mut x = vec![0i64; d];
                if let Some(&k) = free.first() {
                    x[k] = x0;
                }
                for &k in free.iter().skip(1) {
                    x[k] = -n;
                }
                loop {
                    let rest: f64 = free.iter().map(|&k| row[k] * x[k] as f64).sum();
                    let (a, b) = ((-rest - 1.0) / c, (-rest + 1.0) / c);
                    let lo = (a.min(b).floor() as i64 - 1).max(-n);
                    let hi = (a.max(b).ceil() as i64 + 1).min(n);
                    for v in lo..=hi {
                        x[j] = v;
                        if is_canonical(&x) {
                            found.push(x.clone());
                        }
                    }
                    // odometer over the remaining free coordinates
                    let mut pos = free.len();
                    loop {
                        if pos <= 1 {
                            return found;
                        }
                        pos -= 1;
                        let k = free[pos];
                        if x[k] < n {
                            x[k] += 1;
                            break;
                        }
                        x[k] = -n;
                    }
                }
            })
            .collect();
        out.extend(part);
    }
    out.sort_by(|a, b| {
        let sup = |x: &[i64]| x.iter().map(|v| v.abs()).max();
        sup(a).cmp(&sup(b)).then_with(|| a.cmp(b))
    });
    out.dedup();
    out
}

pub fn scan_solutions(cfg: &ScanConfig) -> Result<Vec<Solution>, ScanError> {
    cfg.validate()?;
    let forms = F64Forms::new(&cfg.l);
    let eps_f = crate::exact::rat::rat_to_f64(&cfg.epsilon);
    let n = i64::try_from(cfg.height_bound).map_err(|_| ScanError::Config("height bound too large".into()))?;
    let found: Vec<Option<Solution>> = slab_candidates(&forms, n)
        .into_par_iter()
        .map(|x| {
            let norm2: i128 = x.iter().map(|&v| (v as i128) * (v as i128)).sum();
            let thr = -0.5 * eps_f * (norm2 as f64).ln();
            if forms.log_lower(&x) > thr + 1e-9 {
                return None;
            }
            if x.iter().fold(0i64, |g, &v| g.gcd(&v)) != 1 {
                return None;
            }
            let prod = form_product(&cfg.l, &x);
            if prod.is_zero() && !cfg.include_zero_products {
                return None;
            }
            let n2 = BigInt::from(norm2);
            satisfies_exact(&prod, &n2, &cfg.epsilon).then(|| Solution {
                x: x.iter().map(|&v| v.into()).collect(),
                norm: (norm2 as f64).sqrt(),
                product_log: product_log(&prod, 64),
                assigned_subspace: None,
            })
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    /// Solution indices per subspace, in subspace order.
    pub groups: Vec<Vec<usize>>,
    /// (solution index, norm) for solutions in no subspace.
    pub outliers: Vec<(usize, f64)>,
    pub max_outlier_norm: Option<f64>,
}

/// Assigns each solution to the first subspace containing it.
pub fn classify(solutions: &mut [Solution], subspaces: &[Subspace]) -> Result<Classification, ScanError> {
    if let Some(v) = subspaces.iter().find(|v| v.is_full()) {
        return Err(ScanError::Config(format!("subspace {v:?} is not proper")));
    }
    let mut groups = vec![Vec::new(); subspaces.len()];
    let mut outliers = Vec::new();
    for (i, s) in solutions.iter_mut().enumerate() {
        s.assigned_subspace = None;
        for (j, v) in subspaces.iter().enumerate() {
            if v.contains(&s.x)? {
                s.assigned_subspace = Some(j);
                groups[j].push(i);
                break;
            }
        }
        if s.assigned_subspace.is_none() {
            outliers.push((i, s.norm));
        }
    }
    let max_outlier_norm = outliers.iter().map(|o| o.1).reduce(f64::max);
    Ok(Classification { groups, outliers, max_outlier_norm })
}
