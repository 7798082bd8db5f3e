//! From a solution x to an integer flow n with ‖a_t L x‖ small, and the
//! exceptional subspaces predicted by a flow catalog.

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use super::ScanError;
use crate::exact::rat::{ceil_rat, ln_rat, rat_from_f64, rat_to_f64};
use crate::exact::{Mat, Rat, Scalar, Subspace};
use crate::slopes::sweep::{hn_for_flow, CandidateRecipe};
use crate::slopes::{Flow, MatrixFamily};

/// Integer C ≥ 1 with ‖Lv‖ ≤ C‖v‖, from the Frobenius norm rounded up.
pub fn operator_bound(l: &Mat) -> Rat {
    let fro2: Scalar = l.entries().iter().fold(Scalar::zero(), |acc, v| &acc + &(v * v));
    let iv = fro2.real_value(32);
    // smallest integer whose square dominates the upper enclosure
    let mut c = ceil_rat(&rat_from_f64(rat_to_f64(&iv.hi).sqrt())).max(BigInt::from(1));
    let sq = |c: &BigInt| Rat::from_integer(c * c);
    while sq(&c) < iv.hi {
        c += 1;
    }
    while c > BigInt::from(1) && sq(&(&c - 1)) >= iv.hi {
        c -= 1;
    }
    Rat::from_integer(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct AasVerdict {
    /// Enclosure of ln‖a_t L x‖.
    pub log_norm: (f64, f64),
    /// ln(d·e^{−t}).
    pub log_bound: f64,
    /// `None` when the enclosure straddles the bound.
    pub holds: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionFlow {
    pub t: i64,
    pub n: Vec<i64>,
    pub b: Vec<f64>,
    pub clamped: Vec<bool>,
    pub big_d: f64,
    pub aas: AasVerdict,
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Rounds r to integers with zero sum and |r_i − n_i| ≤ 3/2.
pub fn round_zero_sum(r: &[f64]) -> Vec<i64> {
    let mut n: Vec<i64> = r.iter().map(|v| v.round() as i64).collect();
    let mut s: i64 = n.iter().sum();
    while s != 0 {
        let slack = |i: usize| n[i] as f64 - r[i];
        let idx = 0..n.len();
        let i = if s > 0 {
            idx.max_by(|&a, &b| slack(a).total_cmp(&slack(b)).then(b.cmp(&a))).unwrap()
        } else {
            idx.min_by(|&a, &b| slack(a).total_cmp(&slack(b)).then(a.cmp(&b))).unwrap()
        };
        n[i] -= s.signum();
        s -= s.signum();
    }
    n
}

pub fn solution_to_flow(x: &[i64], l: &Mat, eps: &Rat, c: &Rat) -> Result<SolutionFlow, ScanError> {
    let d = l.rows();
    if x.len() != d {
        return Err(crate::exact::ExactError::DimensionMismatch { expected: d, got: x.len() }.into());
    }
    let xs: Vec<BigInt> = x.iter().map(|&v| v.into()).collect();
    let lx = l.mul_int_vec(&xs)?;
    if let Some(i) = lx.iter().position(Scalar::is_zero) {
        return Err(ScanError::ZeroForm(i));
    }
    let df = d as f64;
    let eps_f = rat_to_f64(eps);
    let norm2: f64 = x.iter().map(|&v| (v as f64) * (v as f64)).sum();
    let t = ((eps_f / (4.0 * df)) * 0.5 * norm2.ln()).floor() as i64;
    if t < 1 {
        return Err(ScanError::TooSmall(t));
    }
    let tf = t as f64;
    // ln|L_i(x)| enclosures
    let logs: Vec<(f64, f64)> = lx
        .iter()
        .map(|v| {
            let mut bits = 64;
            loop {
                let iv = v.real_value(bits).abs();
                if iv.lo.is_positive() {
                    return (ln_rat(&iv.lo), ln_rat(&iv.hi));
                }
                bits *= 2;
            }
        })
        .collect();
    let big_d = 5.0 * df * (rat_to_f64(c).ln() + 8.0 * df / eps_f);
    let ell: Vec<f64> = logs.iter().map(|(a, b)| 0.5 * (a + b)).collect();
    let clamped: Vec<bool> = ell.iter().map(|&v| v < -big_d * tf).collect();
    let ellp: Vec<f64> = ell.iter().map(|&v| v.max(-big_d * tf)).collect();
    let mean = ellp.iter().sum::<f64>() / df;
    let b: Vec<f64> = ellp.iter().map(|v| mean - v).collect();
    let r: Vec<f64> = b.iter().map(|v| v / tf).collect();
    let n = round_zero_sum(&r);

    let lo: Vec<f64> = n.iter().zip(&logs).map(|(&ni, (a, _))| 2.0 * (ni as f64 * tf + a)).collect();
    let hi: Vec<f64> = n.iter().zip(&logs).map(|(&ni, (_, b))| 2.0 * (ni as f64 * tf + b)).collect();
    let log_norm = (0.5 * log_sum_exp(&lo) - 1e-12, 0.5 * log_sum_exp(&hi) + 1e-12);
    let log_bound = df.ln() - tf;
    let holds = if log_norm.1 <= log_bound {
        Some(true)
    } else if log_norm.0 > log_bound {
        Some(false)
    } else {
        None
    };
    Ok(SolutionFlow { t, n, b, clamped, big_d, aas: AasVerdict { log_norm, log_bound, holds } })
}

/// Next-to-top HN terms over a catalog of unimodular flows, deduplicated in
/// catalog order. Trivial filtrations contribute nothing.
pub fn exceptional_subspaces(
    fam: &MatrixFamily,
    eps: &Rat,
    catalog: &[Flow],
    recipe: &CandidateRecipe,
) -> Result<Vec<Subspace>, ScanError> {
    if !eps.is_positive() {
        return Err(ScanError::Config("epsilon must be positive".into()));
    }
    if let Some(a) = catalog.iter().find(|a| !a.is_unimodular()) {
        return Err(ScanError::Config(format!("flow {a:?} does not sum to zero")));
    }
    let terms: Vec<Subspace> = catalog
        .par_iter()
        .map(|a| hn_for_flow(fam, a, recipe).map(|h| h.next_to_top().clone()))
        .collect::<Result<_, _>>()?;
    let mut out: Vec<Subspace> = Vec::new();
    for v in terms {
        if !v.is_zero() && !out.contains(&v) {
            out.push(v);
        }
    }
    Ok(out)
}
