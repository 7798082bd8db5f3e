//! Multiplicative approximation fixture: hits of
//! |p + q·y|·Π₊(q) ≤ Π₊(q)^{−ε}, Π₊(q) = ∏ max(1, |q_i|).

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::rat::{floor_rat, rat, round_rat};
use crate::exact::{Rat, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VwmaHit {
    pub p: i64,
    pub q: Vec<i64>,
    pub zero: bool,
}

/// Nearest integer to s, ties up.
fn nearest(s: &Scalar) -> BigInt {
    if let Some(r) = s.as_rat() {
        return round_rat(r);
    }
    let mut bits = 32;
    loop {
        let iv = s.real_value(bits);
        let (a, b) = (floor_rat(&(&iv.lo + rat(1, 2))), floor_rat(&(&iv.hi + rat(1, 2))));
        if a == b {
            return a;
        }
        bits *= 2;
    }
}

fn q_vectors(n: usize, bound: i64) -> Vec<Vec<i64>> {
    // canonical: first nonzero entry positive
    let mut out = Vec::new();
    let mut q = vec![0i64; n];
    fn rec(i: usize, leading: bool, bound: i64, q: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == q.len() {
            if !leading {
                out.push(q.clone());
            }
            return;
        }
        let lo = if leading { 0 } else { -bound };
        for v in lo..=bound {
            q[i] = v;
            rec(i + 1, leading && v == 0, bound, q, out);
        }
        q[i] = 0;
    }
    rec(0, true, bound, &mut q, &mut out);
    out
}

/// All canonical hits with 1 ≤ ‖q‖∞ ≤ n; p is the nearest integer to −q·y.
pub fn vwma_test(y: &[Scalar], eps: &Rat, n: u64) -> Vec<VwmaHit> {
    assert!(eps.is_positive(), "ε must be positive");
    let bound = i64::try_from(n).expect("bound fits i64");
    let (ep, eq) = (u32::try_from(eps.numer()).expect("ε numerator"), u32::try_from(eps.denom()).expect("ε denominator"));
    let yf: Vec<f64> = y.iter().map(Scalar::to_f64).collect();
    let epsf = crate::exact::rat::rat_to_f64(eps);
    q_vectors(y.len(), bound)
        .into_par_iter()
        .filter_map(|q| {
            let pi: i64 = q.iter().map(|v| v.abs().max(1)).product();
            // cheap rejection: |p + q·y| ≥ dist(q·y, ℤ) − rounding error
            let s_f: f64 = q.iter().zip(&yf).map(|(a, b)| *a as f64 * b).sum();
            let mag: f64 = q.iter().zip(&yf).map(|(a, b)| (*a as f64 * b).abs()).sum();
            let dist = (s_f - s_f.round()).abs() - mag * 1e-13;
            if dist > 0.0 && dist.ln() + (1.0 + epsf) * (pi as f64).ln() > 1e-9 {
                return None;
            }
            let s = q.iter().zip(y).fold(Scalar::zero(), |acc, (a, b)| &acc + &(&Scalar::from_i64(*a) * b));
            let p = -nearest(&s);
            let r = &Scalar::from_bigint(p.clone()) + &s;
            let zero = r.is_zero();
            // |r|·Π^{1+ε} ≤ 1  ⇔  r^{2eq}·Π^{2(eq+ep)} ≤ 1
            let hit = zero || {
                let lhs = &r.pow(2 * eq) * &Scalar::from_bigint(BigInt::from(pi).pow(2 * (eq + ep)));
                lhs.cmp_real(&Scalar::one()) != std::cmp::Ordering::Greater
            };
            hit.then(|| VwmaHit { p: i64::try_from(p).expect("p fits i64"), q, zero })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;
    use crate::exact::NumberField;

    #[test]
    fn zero_vector_hits_everywhere() {
        let hits = vwma_test(&[Scalar::zero()], &rat(1, 5), 20);
        assert_eq!(hits.len(), 20);
        assert!(hits.iter().all(|h| h.p == 0 && h.zero));
    }

    #[test]
    fn rational_point() {
        let hits = vwma_test(&[Scalar::Rat(rat(1, 3))], &int(1), 10);
        assert!(hits.contains(&VwmaHit { p: -1, q: vec![3], zero: true }));
    }

    #[test]
    fn sqrt2_hits() {
        let k = NumberField::sqrt(2, "t").unwrap();
        let hits = vwma_test(&[Scalar::generator(&k)], &rat(1, 5), 100);
        let qs: Vec<i64> = hits.iter().map(|h| h.q[0]).collect();
        // convergent denominators plus the intermediate fraction 4/3
        assert_eq!(qs, vec![1, 2, 3, 5, 12, 29, 70]);
        assert!(hits.iter().all(|h| !h.zero));
    }
}
