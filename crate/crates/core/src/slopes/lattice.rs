//! Finite candidate lattices of subspaces closed under sum and intersection.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;

use crate::exact::{ExactError, Mat, Subspace};

use super::flow::{Flow, MatrixFamily};

#[derive(Clone, Debug)]
pub struct CandidateLattice {
    ambient: usize,
    members: Vec<Subspace>,
    saturated: bool,
    // n×n meet/join indices, present only when saturated
    meet: Vec<u32>,
    join: Vec<u32>,
}

impl CandidateLattice {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Members sorted by dimension, then by representation.
    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn index_of(&self, v: &Subspace) -> Option<usize> {
        self.members.iter().position(|m| m == v)
    }

    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        self.meet.get(i * self.members.len() + j).map(|&x| x as usize)
    }

    pub fn join(&self, i: usize, j: usize) -> Option<usize> {
        self.join.get(i * self.members.len() + j).map(|&x| x as usize)
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.members.len() - 1
    }
}

fn meet_join(a: &Subspace, b: &Subspace) -> Result<(Subspace, Subspace), ExactError> {
    if a == b || a.is_zero() || b.is_full() {
        return Ok((a.clone(), b.clone()));
    }
    if b.is_zero() || a.is_full() {
        return Ok((b.clone(), a.clone()));
    }
    if a.dim() == 1 && b.dim() == 1 {
        return Ok((Subspace::zero(a.ambient()), a.sum(b)?));
    }
    Ok((a.intersect(b)?, a.sum(b)?))
}

/// Adds 0 and the full space to `generators`, then closes under pairwise
/// sums and intersections for at most `max_rounds` rounds.
pub fn close_lattice(ambient: usize, generators: &[Subspace], max_rounds: usize) -> Result<CandidateLattice, ExactError> {
    if let Some(g) = generators.iter().find(|g| g.ambient() != ambient) {
        return Err(ExactError::DimensionMismatch { expected: ambient, got: g.ambient() });
    }
    let mut members: Vec<Subspace> = Vec::new();
    let mut index: HashMap<Subspace, usize> = HashMap::new();
    let mut add = |s: Subspace, members: &mut Vec<Subspace>| {
        if !index.contains_key(&s) {
            index.insert(s.clone(), members.len());
            members.push(s);
        }
    };
    add(Subspace::zero(ambient), &mut members);
    for g in generators {
        add(g.clone(), &mut members);
    }
    add(Subspace::full(ambient), &mut members);

    let mut pairs: HashMap<(usize, usize), (Subspace, Subspace)> = HashMap::new();
    let mut done = 0;
    let mut saturated = false;
    for round in 0..=max_rounds {
        let n = members.len();
        let todo: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j.min(n)).map(move |i| (i, j))).filter(|&(_, j)| j >= done).collect();
        let results: Vec<((usize, usize), (Subspace, Subspace))> = todo
            .par_iter()
            .map(|&(i, j)| meet_join(&members[i], &members[j]).map(|r| ((i, j), r)))
            .collect::<Result<_, _>>()?;
        done = n;
        let mut fresh = Vec::new();
        for (key, (m, j)) in results {
            for s in [&m, &j] {
                if !index.contains_key(s) && !fresh.contains(s) {
                    fresh.push(s.clone());
                }
            }
            pairs.insert(key, (m, j));
        }
        if fresh.is_empty() {
            saturated = true;
            break;
        }
        if round == max_rounds {
            break;
        }
        for s in fresh {
            index.insert(s.clone(), members.len());
            members.push(s);
        }
    }

    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&i, &j| members[i].repr_cmp(&members[j]));
    let mut rank = vec![0usize; members.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos;
    }
    let n = members.len();
    let (mut meet, mut join) = (Vec::new(), Vec::new());
    if saturated {
        meet = vec![0u32; n * n];
        join = vec![0u32; n * n];
        for i in 0..n {
            meet[rank[i] * n + rank[i]] = rank[i] as u32;
            join[rank[i] * n + rank[i]] = rank[i] as u32;
        }
        for ((i, j), (m, jn)) in &pairs {
            let (ri, rj) = (rank[*i], rank[*j]);
            let (rm, rjn) = (rank[index[m]] as u32, rank[index[jn]] as u32);
            meet[ri * n + rj] = rm;
            meet[rj * n + ri] = rm;
            join[ri * n + rj] = rjn;
            join[rj * n + ri] = rjn;
        }
    }
    let members = order.into_iter().map(|i| members[i].clone()).collect();
    Ok(CandidateLattice { ambient, members, saturated, meet, join })
}

/// The flag {L⁻¹⟨e_σ(i), …, e_σ(d)⟩ : 1 < i ≤ d}, σ the descending-weight order.
pub fn flag_generators(l: &Mat, a: &Flow) -> Result<Vec<Subspace>, ExactError> {
    let d = a.dim();
    let inv = l.inverse()?;
    let sigma = a.descending_order();
    (1..d).map(|i| Subspace::coordinate(d, &sigma[i..]).image(&inv)).collect()
}

/// Union of the sample flags; irrational members dropped when `rational_only`.
pub fn family_generators(fam: &MatrixFamily, a: &Flow, rational_only: bool) -> Result<Vec<Subspace>, ExactError> {
    let mut out: Vec<Subspace> = Vec::new();
    for l in fam.samples() {
        for s in flag_generators(l, a)? {
            if (!rational_only || s.is_rational()) && !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// Lines spanned by primitive integer vectors with entries in [−h, h], one
/// per sign class.
pub fn lines_of_height(d: usize, h: i64) -> Vec<Subspace> {
    let mut out = Vec::new();
    let side = (2 * h + 1) as usize;
    let total = side.pow(d as u32);
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..d)
            .map(|_| {
                let x = (c % side) as i64 - h;
                c /= side;
                x
            })
            .collect();
        let Some(first) = v.iter().find(|&&x| x != 0) else { continue };
        if *first < 0 {
            continue;
        }
        let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g != 1 {
            continue;
        }
        let row: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        out.push(Subspace::from_bigint_rows(d, &[row]).expect("integer row"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line_closure() {
        let lat = close_lattice(2, &[Subspace::coordinate(2, &[0])], 5).unwrap();
        assert_eq!(lat.len(), 3);
        assert!(lat.saturated());
        assert_eq!(lat.members()[0], Subspace::zero(2));
        assert_eq!(lat.members()[2], Subspace::full(2));
    }

    #[test]
    fn two_coordinate_flags() {
        let f1 = [Subspace::coordinate(3, &[0]), Subspace::coordinate(3, &[0, 1])];
        let f2 = [Subspace::coordinate(3, &[2]), Subspace::coordinate(3, &[1, 2])];
        let gens: Vec<Subspace> = f1.iter().chain(&f2).cloned().collect();
        let lat = close_lattice(3, &gens, 10).unwrap();
        assert!(lat.saturated());
        // 0, e1, e2, e3, e1e2, e2e3, full; e1+e3 needs a sum of two lines: also present
        let e13 = Subspace::coordinate(3, &[0, 2]);
        assert!(lat.index_of(&e13).is_some());
        assert_eq!(lat.len(), 8);
        let i = lat.index_of(&f1[1]).unwrap();
        let j = lat.index_of(&f2[1]).unwrap();
        assert_eq!(lat.members()[lat.meet(i, j).unwrap()], Subspace::coordinate(3, &[1]));
        assert_eq!(lat.members()[lat.join(i, j).unwrap()], Subspace::full(3));
    }

    #[test]
    fn round_cap_flags_unsaturated() {
        let gens: Vec<Subspace> = [vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 1, 1, 1]]
            .into_iter()
            .map(|r| Subspace::from_int_rows(4, &[r]))
            .collect();
        let lat = close_lattice(4, &gens, 1).unwrap();
        assert!(!lat.saturated());
        assert!(lat.meet(0, 1).is_none());
    }

    #[test]
    fn height_lines() {
        // primitive vectors in [−1,1]² up to sign
        assert_eq!(lines_of_height(2, 1).len(), 4);
        assert_eq!(lines_of_height(3, 1).len(), 13);
    }
}
