//! Integer lattice tools: integral LLL, unimodular basis completion and
//! exact shortest-vector enumeration.
//!
//! Bases are lists of column vectors in ℤ^n. Every routine keeps a
//! unimodular transform so results map back to the input basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type IVec = Vec<BigInt>;
type Q = BigRational;

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [BigInt], q: &BigInt, x: &[BigInt]) {
    // y ← y − q·x
    for (a, b) in y.iter_mut().zip(x) {
        *a -= q * b;
    }
}

fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    // nearest integer to n/d, d > 0, ties up
    (n * BigInt::from(2) + d).div_floor(&(d * BigInt::from(2)))
}

/// Basis plus the transform U with basis = input · U (columns).
#[derive(Clone, Debug)]
pub struct Reduced {
    pub basis: Vec<IVec>,
    /// u[j] holds the input-basis coefficients of basis[j].
    pub u: Vec<IVec>,
}

/// Integral LLL (Cohen, Alg. 2.6.7) with δ = num/den. Vectors with index
/// < `fixed` are never swapped out of the prefix; later vectors are still
/// size-reduced against them.
pub fn lll(basis: Vec<IVec>, u: Vec<IVec>, fixed: usize, num: i64, den: i64) -> Reduced {
    let n = basis.len();
    let mut b = basis;
    let mut h = u;
    if n == 0 {
        return Reduced { basis: b, u: h };
    }
    // d[i] stands for d_i (d[0] = 1); lam[k][j] for λ_{k,j}, 1-based
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n + 1]; n + 1];
    d[0] = BigInt::one();
    let (num, den) = (BigInt::from(num), BigInt::from(den));

    let gs_row = |k: usize, b: &Vec<IVec>, d: &Vec<BigInt>, lam: &mut Vec<Vec<BigInt>>| -> BigInt {
        let mut dk = BigInt::zero();
        for j in 1..=k {
            let mut u = dot(&b[k - 1], &b[j - 1]);
            for i in 1..j {
                u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
            }
            if j < k {
                lam[k][j] = u;
            } else {
                dk = u;
            }
        }
        dk
    };

    d[1] = dot(&b[0], &b[0]);
    let mut kmax = 1;
    for k in 2..=fixed.max(1).min(n) {
        d[k] = gs_row(k, &b, &d, &mut lam);
        kmax = k;
    }
    let start = (fixed + 1).max(2);
    let mut k = start;
    while k <= n {
        if k > kmax {
            kmax = k;
            d[k] = gs_row(k, &b, &d, &mut lam);
            assert!(!d[k].is_zero(), "basis vectors are linearly dependent");
        }
        red(k, k - 1, &mut b, &mut h, &d, &mut lam);
        let lhs = &den * &d[k] * &d[k - 2];
        let rhs = &num * &d[k - 1] * &d[k - 1] - &den * &lam[k][k - 1] * &lam[k][k - 1];
        if k >= fixed + 2 && lhs < rhs {
            swap(k, kmax, &mut b, &mut h, &mut d, &mut lam);
            k = (k - 1).max(start);
            continue;
        }
        for l in (1..k - 1).rev() {
            red(k, l, &mut b, &mut h, &d, &mut lam);
        }
        k += 1;
    }
    Reduced { basis: b, u: h }
}

fn red(k: usize, l: usize, b: &mut [IVec], h: &mut [IVec], d: &[BigInt], lam: &mut [Vec<BigInt>]) {
    if (&lam[k][l] * BigInt::from(2)).abs() > d[l] {
        let q = round_div(&lam[k][l], &d[l]);
        let bl = b[l - 1].clone();
        axpy(&mut b[k - 1], &q, &bl);
        let hl = h[l - 1].clone();
        axpy(&mut h[k - 1], &q, &hl);
        lam[k][l] -= &q * &d[l];
        for i in 1..l {
            let t = &q * &lam[l][i];
            lam[k][i] -= t;
        }
    }
}

fn swap(k: usize, kmax: usize, b: &mut [IVec], h: &mut [IVec], d: &mut [BigInt], lam: &mut [Vec<BigInt>]) {
    b.swap(k - 1, k - 2);
    h.swap(k - 1, k - 2);
    for j in 1..k - 1 {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let bb = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
    for i in k + 1..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
        lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k];
    }
    d[k - 1] = bb;
}

/// Exact Gram–Schmidt data: squared norms B_i and coefficients μ_{ij}.
pub fn gram_schmidt(b: &[IVec]) -> (Vec<Q>, Vec<Vec<Q>>) {
    let n = b.len();
    let mut bstar: Vec<Vec<Q>> = Vec::with_capacity(n);
    let mut bn = Vec::with_capacity(n);
    let mut mu = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        let mut v: Vec<Q> = b[i].iter().cloned().map(Q::from_integer).collect();
        for j in 0..i {
            let num: Q = b[i].iter().zip(&bstar[j]).map(|(x, y)| Q::from_integer(x.clone()) * y).sum();
            let m = num / &bn[j];
            for (a, s) in v.iter_mut().zip(&bstar[j]) {
                *a -= &m * s;
            }
            mu[i][j] = m;
        }
        let norm: Q = v.iter().map(|x| x * x).sum();
        bn.push(norm);
        bstar.push(v);
    }
    (bn, mu)
}

/// Shortest vector Σ x_i b_i with (x_outer, …, x_n) ≠ 0, by exact
/// Schnorr–Euchner enumeration. Returns the coefficients and squared norm.
pub fn shortest_outside_prefix(b: &[IVec], outer: usize) -> (Vec<BigInt>, BigInt) {
    let n = b.len();
    let (bn, mu) = gram_schmidt(b);
    // start from the shortest admissible basis vector
    let (mut best_x, mut best) = (vec![BigInt::zero(); n], None::<BigInt>);
    for (i, v) in b.iter().enumerate().skip(outer) {
        let nv = dot(v, v);
        if best.as_ref().map_or(true, |bv| nv < *bv) {
            best = Some(nv);
            best_x = vec![BigInt::zero(); n];
            best_x[i] = BigInt::one();
        }
    }
    let mut best = Q::from_integer(best.expect("prefix leaves no outer vector"));
    let mut x = vec![BigInt::zero(); n];
    enumerate(n, n, outer, &bn, &mu, &mut x, Q::zero(), &mut best, &mut best_x);
    let v = combine(b, &best_x);
    let nv = dot(&v, &v);
    (best_x, nv)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(level: usize, n: usize, outer: usize, bn: &[Q], mu: &[Vec<Q>], x: &mut Vec<BigInt>, partial: Q, best: &mut Q, best_x: &mut Vec<BigInt>) {
    if level == 0 {
        if partial < *best && !partial.is_zero() {
            *best = partial;
            best_x.clone_from(x);
        }
        return;
    }
    let i = level - 1;
    if i + 1 == outer && x[outer..].iter().all(Zero::is_zero) {
        return;
    }
    let mut c = Q::zero();
    for j in i + 1..n {
        if !x[j].is_zero() {
            c -= Q::from_integer(x[j].clone()) * &mu[j][i];
        }
    }
    let r0 = round_div(c.numer(), c.denom());
    for dir in [1i32, -1] {
        let mut xi = if dir == 1 { r0.clone() } else { &r0 - 1 };
        loop {
            let diff = Q::from_integer(xi.clone()) - &c;
            let p = &partial + &diff * &diff * &bn[i];
            if p >= *best {
                break;
            }
            x[i] = xi.clone();
            enumerate(level - 1, n, outer, bn, mu, x, p, best, best_x);
            xi += dir;
        }
    }
    x[i] = BigInt::zero();
}

pub fn combine(b: &[IVec], x: &[BigInt]) -> IVec {
    let m = b[0].len();
    let mut v = vec![BigInt::zero(); m];
    for (bi, xi) in b.iter().zip(x) {
        if !xi.is_zero() {
            for (a, c) in v.iter_mut().zip(bi) {
                *a += xi * c;
            }
        }
    }
    v
}

/// Unimodular V (rows) with V·M = [H; 0], M given by its columns. Returns
/// (V, V⁻¹) as row lists.
pub fn row_echelon_transform(cols: &[IVec], n: usize) -> (Vec<IVec>, Vec<IVec>) {
    let ident = |n: usize| -> Vec<IVec> { (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect()).collect() };
    // work on rows of M (n rows, cols.len() columns)
    let mut m: Vec<IVec> = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let mut v = ident(n);
    let mut vinv = ident(n);
    let mut r = 0;
    for c in 0..cols.len() {
        loop {
            // smallest nonzero |m[i][c]| for i ≥ r
            let piv = (r..n).filter(|&i| !m[i][c].is_zero()).min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs()));
            let Some(p) = piv else { break };
            m.swap(r, p);
            v.swap(r, p);
            // V⁻¹ column swap mirrors the row swap
            for row in vinv.iter_mut() {
                row.swap(r, p);
            }
            let mut done = true;
            for i in r + 1..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                let mr = m[r].clone();
                axpy(&mut m[i], &q, &mr);
                let vr = v[r].clone();
                axpy(&mut v[i], &q, &vr);
                // row_i ← row_i − q row_r  ⇒  col_r of V⁻¹ += q col_i
                for row in vinv.iter_mut() {
                    let t = &q * &row[i];
                    row[r] += t;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if (r..n).any(|i| !m[i][c].is_zero()) {
            r += 1;
        }
    }
    (v, vinv)
}
