//! Grayson polygons and Harder–Narasimhan filtrations over a candidate lattice.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::rat::fmt_rat;
use crate::exact::{Rat, Subspace};

use super::lattice::CandidateLattice;
use super::oracle::SubmodularOracle;
use super::submod::lattice_violations;
use super::SlopeError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraysonPolygon {
    vertices: Vec<(usize, Rat)>,
}

impl GraysonPolygon {
    /// Validates strict convexity; vertices must start at (0, 0).
    pub fn new(vertices: Vec<(usize, Rat)>) -> Result<GraysonPolygon, SlopeError> {
        let p = GraysonPolygon { vertices };
        if p.vertices.first() != Some(&(0, Rat::zero())) || p.vertices.len() < 2 {
            return Err(SlopeError::InvalidPolygon("must start at (0, 0) and have two vertices".into()));
        }
        if p.vertices.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(SlopeError::InvalidPolygon("dims must increase strictly".into()));
        }
        let s = p.slopes();
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SlopeError::InvalidPolygon("slopes must increase strictly".into()));
        }
        Ok(p)
    }

    /// Builds a polygon without the convexity check, for falsification tests.
    pub fn unchecked(vertices: Vec<(usize, Rat)>) -> GraysonPolygon {
        GraysonPolygon { vertices }
    }

    pub fn vertices(&self) -> &[(usize, Rat)] {
        &self.vertices
    }

    pub fn ambient(&self) -> usize {
        self.vertices.last().unwrap().0
    }

    pub fn slopes(&self) -> Vec<Rat> {
        self.vertices
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / Rat::from_integer((w[1].0 - w[0].0).into()))
            .collect()
    }

    /// Piecewise-linear value at integer abscissa k ∈ [0, d].
    pub fn value_at(&self, k: usize) -> Rat {
        for w in self.vertices.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if k >= *x0 && k <= *x1 {
                let s = (y1 - y0) / Rat::from_integer((x1 - x0).into());
                return y0 + s * Rat::from_integer((k - x0).into());
            }
        }
        panic!("abscissa {k} outside polygon");
    }

    pub fn is_single_segment(&self) -> bool {
        self.vertices.len() == 2
    }
}

impl Serialize for GraysonPolygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<(usize, String)> = self.vertices.iter().map(|(k, x)| (*k, fmt_rat(x))).collect();
        v.serialize(s)
    }
}

/// φ on every lattice member, in member order.
pub fn evaluate(oracle: &dyn SubmodularOracle, lattice: &CandidateLattice) -> Result<Vec<Rat>, SlopeError> {
    lattice.members().par_iter().map(|m| oracle.eval(m)).collect()
}

/// Lower convex hull of (dim, value) points including (0, 0); collinear
/// points are dropped.
pub fn lower_hull(points: &[(usize, Rat)]) -> Vec<(usize, Rat)> {
    let d = points.iter().map(|p| p.0).max().unwrap_or(0);
    let mut best: Vec<Option<Rat>> = vec![None; d + 1];
    best[0] = Some(Rat::zero());
    for (k, v) in points {
        if best[*k].as_ref().map_or(true, |b| v < b) {
            best[*k] = Some(v.clone());
        }
    }
    let pts: Vec<(usize, Rat)> = best.into_iter().enumerate().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
    let mut hull: Vec<(usize, Rat)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            // drop b unless it lies strictly below segment a→p
            let lhs = (&b.1 - &a.1) * Rat::from_integer((p.0 - a.0).into());
            let rhs = (&p.1 - &a.1) * Rat::from_integer((b.0 - a.0).into());
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

pub fn grayson_polygon(oracle: &dyn SubmodularOracle, lattice: &CandidateLattice) -> Result<GraysonPolygon, SlopeError> {
    let values = evaluate(oracle, lattice)?;
    polygon_from_values(lattice, &values)
}

fn polygon_from_values(lattice: &CandidateLattice, values: &[Rat]) -> Result<GraysonPolygon, SlopeError> {
    let pts: Vec<(usize, Rat)> = lattice.members().iter().zip(values).map(|(m, v)| (m.dim(), v.clone())).collect();
    if !pts.iter().any(|p| p.0 == lattice.ambient()) {
        return Err(SlopeError::InvalidPolygon("lattice lacks the full space".into()));
    }
    GraysonPolygon::new(lower_hull(&pts))
}

#[derive(Clone, Debug)]
pub struct HnFiltration {
    pub chain: Vec<(Subspace, Rat)>,
    pub slopes: Vec<Rat>,
    pub polygon: GraysonPolygon,
}

impl HnFiltration {
    pub fn length(&self) -> usize {
        self.chain.len() - 1
    }

    /// V_{h−1}, the last proper term (zero for a trivial chain).
    pub fn next_to_top(&self) -> &Subspace {
        &self.chain[self.chain.len() - 2].0
    }

    /// Terms strictly between 0 and the full space.
    pub fn interior(&self) -> &[(Subspace, Rat)] {
        &self.chain[1..self.chain.len() - 1]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.chain.iter().map(|(s, _)| s.dim()).collect()
    }
}

pub fn hn_filtration(oracle: &dyn SubmodularOracle, lattice: &CandidateLattice) -> Result<HnFiltration, SlopeError> {
    hn_above(oracle, lattice, 0)
}

/// Filtration of φ_V(W) = φ(W) − φ(V) on the members W ≥ V, V = members[base].
pub fn hn_filtration_above(oracle: &dyn SubmodularOracle, lattice: &CandidateLattice, base: &Subspace) -> Result<HnFiltration, SlopeError> {
    let b = lattice.index_of(base).ok_or_else(|| SlopeError::MissingMember(format!("{base:?}")))?;
    hn_above(oracle, lattice, b)
}

fn hn_above(oracle: &dyn SubmodularOracle, lattice: &CandidateLattice, base: usize) -> Result<HnFiltration, SlopeError> {
    if !lattice.saturated() {
        return Err(SlopeError::Unsaturated);
    }
    let raw = evaluate(oracle, lattice)?;
    if let Some(v) = lattice_violations(lattice, &raw).into_iter().next() {
        return Err(SlopeError::NotSubmodular(Box::new(v)));
    }
    let members = lattice.members();
    let top = lattice.top();
    let base_dim = members[base].dim();
    let base_val = raw[base].clone();
    // above[i]: members[i] ≥ members[base]
    let above: Vec<bool> = (0..members.len()).map(|i| lattice.join(i, base) == Some(i)).collect();
    let values: Vec<Rat> = raw.iter().map(|v| v - &base_val).collect();

    let pts: Vec<(usize, Rat)> =
        (0..members.len()).filter(|&i| above[i]).map(|i| (members[i].dim() - base_dim, values[i].clone())).collect();
    let polygon = GraysonPolygon::new(lower_hull(&pts))?;

    let mut chain = vec![base];
    let mut cur = base;
    while cur != top {
        let cd = members[cur].dim();
        let slope = |i: usize| (&values[i] - &values[cur]) / Rat::from_integer((members[i].dim() - cd).into());
        let cands: Vec<usize> = (0..members.len()).filter(|&i| above[i] && i != cur && lattice.join(i, cur) == Some(i)).collect();
        let best = cands.iter().map(|&i| slope(i)).min().unwrap();
        let mut next = cur;
        for &i in &cands {
            if slope(i) == best {
                next = lattice.join(next, i).unwrap();
            }
        }
        if slope(next) != best {
            return Err(SlopeError::Incoherent(format!("sum of minimizers {:?} is not a minimizer", members[next])));
        }
        chain.push(next);
        cur = next;
    }

    let got: Vec<(usize, Rat)> = chain.iter().map(|&i| (members[i].dim() - base_dim, values[i].clone())).collect();
    if got != polygon.vertices() {
        return Err(SlopeError::Incoherent(format!("chain {got:?} vs polygon {:?}", polygon.vertices())));
    }
    for &c in &chain {
        let (dim, val) = (members[c].dim(), &values[c]);
        if let Some(o) = (0..members.len()).find(|&i| i != c && above[i] && members[i].dim() == dim && values[i] == *val) {
            return Err(SlopeError::NonUnique(format!("{:?}", members[c]), format!("{:?}", members[o])));
        }
    }
    let slopes = polygon.slopes();
    let chain = chain.into_iter().map(|i| (members[i].clone(), values[i].clone())).collect();
    Ok(HnFiltration { chain, slopes, polygon })
}

pub fn is_semistable(oracle: &dyn SubmodularOracle, lattice: &CandidateLattice) -> Result<bool, SlopeError> {
    Ok(hn_filtration(oracle, lattice)?.length() == 1)
}

/// Λ_k = slope of the polygon segment covering (k−1, k].
pub fn slopes_to_lambda(p: &GraysonPolygon) -> Vec<Rat> {
    let s = p.slopes();
    let mut out = Vec::new();
    for (w, sl) in p.vertices().windows(2).zip(s) {
        for _ in w[0].0..w[1].0 {
            out.push(sl.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;
    use crate::exact::{Mat, NumberField, Scalar};
    use crate::slopes::flow::{Flow, MatrixFamily};
    use crate::slopes::lattice::{close_lattice, flag_generators, lines_of_height};
    use crate::slopes::oracle::{TableOracle, TauOracle};

    fn identity_oracle(w: &[i64]) -> (TauOracle, CandidateLattice) {
        let d = w.len();
        let a = Flow::from_i64(w);
        let gens = flag_generators(&Mat::identity(d), &a).unwrap();
        let lat = close_lattice(d, &gens, 4).unwrap();
        (TauOracle::new(MatrixFamily::singleton(Mat::identity(d)).unwrap(), a).unwrap(), lat)
    }

    #[test]
    fn identity_three() {
        let (o, lat) = identity_oracle(&[1, 0, -1]);
        let p = grayson_polygon(&o, &lat).unwrap();
        assert_eq!(p.vertices(), &[(0, int(0)), (1, int(-1)), (2, int(-1)), (3, int(0))]);
        assert_eq!(p.slopes(), vec![int(-1), int(0), int(1)]);
        let hn = hn_filtration(&o, &lat).unwrap();
        let subs: Vec<Subspace> = hn.chain.iter().map(|c| c.0.clone()).collect();
        assert_eq!(subs, vec![Subspace::zero(3), Subspace::coordinate(3, &[2]), Subspace::coordinate(3, &[1, 2]), Subspace::full(3)]);
        assert_eq!(slopes_to_lambda(&p), vec![int(-1), int(0), int(1)]);
    }

    #[test]
    fn identity_two() {
        let (o, lat) = identity_oracle(&[1, -1]);
        let hn = hn_filtration(&o, &lat).unwrap();
        assert_eq!(hn.chain[1].0, Subspace::coordinate(2, &[1]));
        assert_eq!(hn.slopes, vec![int(-1), int(1)]);
        assert!(!is_semistable(&o, &lat).unwrap());
    }

    #[test]
    fn sqrt2_semistable() {
        let k = NumberField::sqrt(2, "t").unwrap();
        let s = Scalar::generator(&k);
        let l = Mat::from_rows(vec![vec![Scalar::one(), s], vec![Scalar::zero(), Scalar::one()]]).unwrap();
        let o = TauOracle::new(MatrixFamily::singleton(l).unwrap(), Flow::from_i64(&[1, -1])).unwrap();
        let lat = close_lattice(2, &lines_of_height(2, 10), 2).unwrap();
        let p = grayson_polygon(&o, &lat).unwrap();
        assert_eq!(p.vertices(), &[(0, int(0)), (2, int(0))]);
        assert!(is_semistable(&o, &lat).unwrap());
        assert_eq!(slopes_to_lambda(&p), vec![int(0), int(0)]);
    }

    #[test]
    fn zero_table() {
        let o = TableOracle::constant_slope(3, int(0));
        let lat = close_lattice(3, &lines_of_height(3, 1), 1).unwrap();
        let p = grayson_polygon(&o, &lat).unwrap();
        assert_eq!(p.vertices(), &[(0, int(0)), (3, int(0))]);
    }

    #[test]
    fn constant_weights_semistable() {
        let (o, lat) = identity_oracle(&[2, 2, 2]);
        assert!(is_semistable(&o, &lat).unwrap());
        assert_eq!(slopes_to_lambda(&grayson_polygon(&o, &lat).unwrap()), vec![int(2); 3]);
    }

    #[test]
    fn unsaturated_rejected() {
        let gens: Vec<Subspace> = lines_of_height(4, 1).into_iter().take(6).collect();
        let lat = close_lattice(4, &gens, 0).unwrap();
        let o = TableOracle::constant_slope(4, int(0));
        assert!(matches!(hn_filtration(&o, &lat), Err(SlopeError::Unsaturated)));
    }

    #[test]
    fn quotient_tail() {
        let (o, lat) = identity_oracle(&[3, 1, -4]);
        let hn = hn_filtration(&o, &lat).unwrap();
        let v1 = hn.chain[1].0.clone();
        let q = hn_filtration_above(&o, &lat, &v1).unwrap();
        let tail: Vec<Subspace> = hn.chain[1..].iter().map(|c| c.0.clone()).collect();
        let qs: Vec<Subspace> = q.chain.iter().map(|c| c.0.clone()).collect();
        assert_eq!(qs, tail);
        assert_eq!(q.slopes, hn.slopes[1..].to_vec());
    }

    #[test]
    fn corrupt_polygon_rejected() {
        assert!(GraysonPolygon::new(vec![(0, int(0)), (1, int(1)), (2, int(0))]).is_err());
        assert!(GraysonPolygon::new(vec![(0, int(0)), (1, int(-1)), (2, int(-2))]).is_err());
    }
}
