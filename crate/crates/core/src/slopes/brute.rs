//! Independent polygon verification for rational families in d ≤ 3.
//!
//! Subspaces are enumerated from primitive integer vectors of bounded
//! height. τ is evaluated with integer arithmetic only: a line through v
//! has nonzero coordinates supp(Lv), and a plane with normal m has Plücker
//! support complementary to supp(adj(L)ᵀ m).

use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::exact::rat::lcm_of_denominators;
use crate::exact::{Rat, Subspace};

use super::flow::{Flow, MatrixFamily};
use super::polygon::GraysonPolygon;
use super::sweep::{hn_for_flow, CandidateRecipe};
use super::SlopeError;

type IVec = Vec<i128>;

/// Proper nonzero subspaces of ℚ^d (d ≤ 3) with a primitive integer basis of
/// entry magnitude ≤ h: lines by direction, planes by primitive normal.
#[derive(Clone, Debug)]
pub struct HeightCensus {
    pub d: usize,
    pub height: i64,
    pub lines: Vec<IVec>,
    pub plane_normals: Vec<IVec>,
}

fn primitive(mut v: IVec) -> Option<IVec> {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g == 0 {
        return None;
    }
    let lead_neg = v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0);
    let g = if lead_neg { -g } else { g };
    for x in &mut v {
        *x /= g;
    }
    Some(v)
}

fn cross(u: &[i128], v: &[i128]) -> IVec {
    vec![u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

impl HeightCensus {
    pub fn new(d: usize, height: i64) -> HeightCensus {
        assert!((1..=3).contains(&d), "census supports d ≤ 3");
        let h = height as i128;
        let mut lines: Vec<IVec> = Vec::new();
        let side = 2 * h + 1;
        for code in 0..side.pow(d as u32) {
            let mut c = code;
            let v: IVec = (0..d)
                .map(|_| {
                    let x = c % side - h;
                    c /= side;
                    x
                })
                .collect();
            if let Some(p) = primitive(v.clone()) {
                if p == v {
                    lines.push(p);
                }
            }
        }
        let mut plane_normals = Vec::new();
        if d == 3 {
            let mut seen = HashSet::new();
            for i in 0..lines.len() {
                for j in i + 1..lines.len() {
                    let n = primitive(cross(&lines[i], &lines[j])).expect("distinct primitive lines");
                    if seen.insert(n.clone()) {
                        plane_normals.push(n);
                    }
                }
            }
        }
        if d == 1 {
            lines.clear();
        }
        HeightCensus { d, height, lines, plane_normals }
    }

    pub fn len(&self) -> usize {
        self.lines.len() + self.plane_normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Samples scaled to integer matrices, with their integer adjugates.
struct IntFamily {
    mats: Vec<Vec<IVec>>,
    adjs: Vec<Vec<IVec>>,
}

impl IntFamily {
    fn new(fam: &MatrixFamily) -> Option<IntFamily> {
        let d = fam.dim();
        let mut mats = Vec::new();
        for m in fam.samples() {
            let rats: Vec<&Rat> = m.entries().iter().map(|s| s.as_rat()).collect::<Option<_>>()?;
            let den = lcm_of_denominators(rats.iter().copied());
            let ints: Vec<i128> = rats.iter().map(|r| (*r * Rat::from_integer(den.clone())).to_integer().to_i128()).collect::<Option<_>>()?;
            mats.push((0..d).map(|i| ints[i * d..(i + 1) * d].to_vec()).collect::<Vec<IVec>>());
        }
        let adjs = mats.iter().map(|m| adjugate(m)).collect();
        Some(IntFamily { mats, adjs })
    }
}

fn adjugate(m: &[IVec]) -> Vec<IVec> {
    let d = m.len();
    match d {
        1 => vec![vec![1]],
        2 => vec![vec![m[1][1], -m[0][1]], vec![-m[1][0], m[0][0]]],
        _ => {
            // adj = transpose of the cofactor matrix
            let mut adj = vec![vec![0i128; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
                    let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
                    let minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]];
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    adj[j][i] = sign * minor;
                }
            }
            adj
        }
    }
}

fn apply(m: &[IVec], v: &[i128]) -> IVec {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn apply_transpose(m: &[IVec], v: &[i128]) -> IVec {
    (0..v.len()).map(|j| (0..v.len()).map(|i| m[i][j] * v[i]).sum()).collect()
}

fn line_tau(fam: &IntFamily, a: &Flow, v: &[i128]) -> Rat {
    fam.mats
        .iter()
        .map(|m| {
            let w = apply(m, v);
            (0..w.len()).filter(|&i| w[i] != 0).map(|i| a.weight(i).clone()).max().unwrap()
        })
        .max()
        .unwrap()
}

fn plane_tau(fam: &IntFamily, a: &Flow, normal: &[i128]) -> Rat {
    // (L P)^⊥ is spanned by L^{-T} n ∝ adj(L)^T n
    fam.adjs
        .iter()
        .map(|adj| {
            let n = apply_transpose(adj, normal);
            let drop = (0..n.len()).filter(|&i| n[i] != 0).map(|i| a.weight(i).clone()).min().unwrap();
            a.total() - drop
        })
        .max()
        .unwrap()
}

/// Integer-only τ_M of an arbitrary rational subspace, d ≤ 3.
fn subspace_tau(fam: &IntFamily, a: &Flow, v: &Subspace) -> Option<Rat> {
    let rows = v.integer_rows()?;
    let rows: Vec<IVec> = rows.iter().map(|r| r.iter().map(|x| x.to_i128()).collect::<Option<_>>()).collect::<Option<_>>()?;
    Some(match (v.dim(), v.ambient()) {
        (0, _) => Rat::zero(),
        (k, d) if k == d => a.total(),
        (1, _) => line_tau(fam, a, &rows[0]),
        (2, 3) => plane_tau(fam, a, &primitive(cross(&rows[0], &rows[1]))?),
        _ => return None,
    })
}

/// Checks that no census point lies below `polygon` and that every vertex is
/// attained by a census member or one of `attainers`.
pub fn verify_polygon(fam: &MatrixFamily, a: &Flow, polygon: &GraysonPolygon, attainers: &[Subspace], census: &HeightCensus) -> bool {
    let Some(ifam) = IntFamily::new(fam) else { return false };
    let d = fam.dim();
    if census.d != d || polygon.ambient() != d {
        return false;
    }
    let mut best: Vec<Option<Rat>> = vec![None; d + 1];
    let mut note = |k: usize, t: Rat| {
        if best[k].as_ref().map_or(true, |b| t < *b) {
            best[k] = Some(t);
        }
    };
    note(0, Rat::zero());
    note(d, a.total());
    for v in &census.lines {
        note(1, line_tau(&ifam, a, v));
    }
    for n in &census.plane_normals {
        note(2, plane_tau(&ifam, a, n));
    }
    // no point below
    for (k, b) in best.iter().enumerate() {
        if let Some(b) = b {
            if *b < polygon.value_at(k) {
                return false;
            }
        }
    }
    // vertices attained
    let mut attained: Vec<(usize, Rat)> = best.iter().enumerate().filter_map(|(k, b)| b.clone().map(|b| (k, b))).collect();
    for s in attainers {
        match subspace_tau(&ifam, a, s) {
            Some(t) => attained.push((s.dim(), t)),
            None => return false,
        }
    }
    polygon.vertices().iter().all(|v| attained.contains(v))
}

/// Computes the filtration with the default recipe and verifies its polygon
/// by enumeration at the given height.
pub fn verify_hn_bruteforce(fam: &MatrixFamily, a: &Flow, census: &HeightCensus) -> Result<bool, SlopeError> {
    let hn = hn_for_flow(fam, a, &CandidateRecipe::default())?;
    let chain: Vec<Subspace> = hn.chain.iter().map(|c| c.0.clone()).collect();
    Ok(verify_polygon(fam, a, &hn.polygon, &chain, census))
}
