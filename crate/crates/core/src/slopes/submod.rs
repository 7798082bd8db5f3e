//! Exact checks of φ(U) + φ(V) ≥ φ(U∩V) + φ(U+V).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::rat::fmt_rat;
use crate::exact::{Rat, Scalar, Subspace};

use super::lattice::CandidateLattice;
use super::oracle::SubmodularOracle;
use super::SlopeError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub u: Subspace,
    pub v: Subspace,
    /// φ(U) + φ(V)
    pub lhs: Rat,
    /// φ(U∩V) + φ(U+V)
    pub rhs: Rat,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "U={:?} V={:?}: {} < {}", self.u, self.v, fmt_rat(&self.lhs), fmt_rat(&self.rhs))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubmodReport {
    pub pairs_checked: usize,
    #[serde(serialize_with = "ser_violations")]
    pub violations: Vec<Violation>,
}

fn ser_violations<S: serde::Serializer>(v: &[Violation], s: S) -> Result<S::Ok, S::Error> {
    let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    strs.serialize(s)
}

/// Violations among all member pairs of a saturated lattice, given φ per member.
pub fn lattice_violations(lattice: &CandidateLattice, values: &[Rat]) -> Vec<Violation> {
    let n = lattice.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (m, s) = (lattice.meet(i, j).unwrap(), lattice.join(i, j).unwrap());
            let lhs = &values[i] + &values[j];
            let rhs = &values[m] + &values[s];
            if lhs < rhs {
                let ms = lattice.members();
                out.push(Violation { u: ms[i].clone(), v: ms[j].clone(), lhs, rhs });
            }
        }
    }
    out
}

pub enum PairSource<'a> {
    /// Every member pair when `trials` covers them, else `trials` seeded draws.
    Lattice(&'a CandidateLattice),
    /// Seeded random rational subspace pairs sharing a random common part.
    Random { ambient: usize, entry_bound: i64 },
}

pub fn check_pair(oracle: &dyn SubmodularOracle, u: &Subspace, v: &Subspace) -> Result<Option<Violation>, SlopeError> {
    let lhs = oracle.eval(u)? + oracle.eval(v)?;
    let rhs = oracle.eval(&u.intersect(v)?)? + oracle.eval(&u.sum(v)?)?;
    Ok((lhs < rhs).then(|| Violation { u: u.clone(), v: v.clone(), lhs, rhs }))
}

pub fn submodularity_check(oracle: &dyn SubmodularOracle, source: PairSource<'_>, trials: usize, seed: u64) -> Result<SubmodReport, SlopeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Subspace, Subspace)> = match source {
        PairSource::Lattice(lat) => {
            let n = lat.len();
            let ms = lat.members();
            if trials >= n * (n.saturating_sub(1)) / 2 {
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (ms[i].clone(), ms[j].clone()))).collect()
            } else {
                (0..trials).map(|_| (ms[rng.gen_range(0..n)].clone(), ms[rng.gen_range(0..n)].clone())).collect()
            }
        }
        PairSource::Random { ambient, entry_bound } => {
            (0..trials).map(|_| random_pair(&mut rng, ambient, entry_bound)).collect()
        }
    };
    let found: Vec<Option<Violation>> = pairs.par_iter().map(|(u, v)| check_pair(oracle, u, v)).collect::<Result<_, _>>()?;
    Ok(SubmodReport { pairs_checked: pairs.len(), violations: found.into_iter().flatten().collect() })
}

pub fn random_vector(rng: &mut impl Rng, d: usize, bound: i64) -> Vec<Scalar> {
    (0..d).map(|_| Scalar::from_i64(rng.gen_range(-bound..=bound))).collect()
}

/// Random pair U = S + A, V = S + B with a shared random part S.
pub fn random_pair(rng: &mut impl Rng, d: usize, bound: i64) -> (Subspace, Subspace) {
    let shared = rng.gen_range(0..d);
    let ku = rng.gen_range(0..=d - shared);
    let kv = rng.gen_range(0..=d - shared);
    let s: Vec<Vec<Scalar>> = (0..shared).map(|_| random_vector(rng, d, bound)).collect();
    let mk = |rng: &mut dyn rand::RngCore, k: usize| {
        let mut rows = s.clone();
        rows.extend((0..k).map(|_| (0..d).map(|_| Scalar::from_i64(rng.gen_range(-bound..=bound))).collect::<Vec<_>>()));
        Subspace::from_rows(d, rows).expect("rational rows")
    };
    let u = mk(rng, ku);
    let v = mk(rng, kv);
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;
    use crate::exact::Mat;
    use crate::slopes::flow::{Flow, MatrixFamily};
    use crate::slopes::oracle::{TableOracle, TauOracle};

    #[test]
    fn zero_function_never_violates() {
        let o = TableOracle::constant_slope(4, int(0));
        let r = submodularity_check(&o, PairSource::Random { ambient: 4, entry_bound: 3 }, 100, 1).unwrap();
        assert_eq!(r.pairs_checked, 100);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn permuted_pair_violates() {
        // both samples agree on ⟨e1,e2⟩ but maximize ⟨e1⟩ and ⟨e1,e2,e4⟩ differently
        let swap = Mat::from_i64(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
        let fam = MatrixFamily::new(vec![Mat::identity(4), swap], "swap pair").unwrap();
        let o = TauOracle::new(fam, Flow::from_i64(&[3, 1, -1, -3])).unwrap();
        let u = Subspace::coordinate(4, &[0, 1]);
        let v = Subspace::coordinate(4, &[0, 3]);
        let viol = check_pair(&o, &u, &v).unwrap().unwrap();
        assert_eq!((viol.lhs, viol.rhs), (int(4), int(6)));
    }
}
