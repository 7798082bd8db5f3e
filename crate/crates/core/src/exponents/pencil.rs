//! Pencil exponents: β from image ranks, ω from multiplicative pencils, and
//! the polygon bridge.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::{ExponentError, ExtRat};
use crate::exact::rat::int;
use crate::exact::{ExactError, Mat, Rat, Scalar, Subspace};
use crate::slopes::lattice::lines_of_height;
use crate::slopes::GraysonPolygon;

/// Nonempty family of m×d matrices over one field context.
#[derive(Clone, Debug)]
pub struct HomFamily {
    samples: Vec<Mat>,
    label: String,
}

impl HomFamily {
    pub fn new(samples: Vec<Mat>, label: &str) -> Result<HomFamily, ExponentError> {
        let first = samples.first().ok_or_else(|| ExponentError::Shape("empty family".into()))?;
        let (m, d) = (first.rows(), first.cols());
        if let Some(s) = samples.iter().find(|s| s.rows() != m || s.cols() != d) {
            return Err(ExponentError::Shape(format!("{}×{} sample in a {m}×{d} family", s.rows(), s.cols())));
        }
        let mut field = None;
        for s in &samples {
            if let Some(f) = s.field() {
                match field {
                    None => field = Some(f.clone()),
                    Some(ref g) if !crate::exact::scalar::same_field(f, g) => return Err(ExactError::FieldMismatch.into()),
                    _ => {}
                }
            }
        }
        Ok(HomFamily { samples, label: label.to_string() })
    }

    pub fn samples(&self) -> &[Mat] {
        &self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn target_dim(&self) -> usize {
        self.samples[0].rows()
    }

    pub fn source_dim(&self) -> usize {
        self.samples[0].cols()
    }
}

/// Rank of the forms (rows of `forms`) restricted to W.
pub(crate) fn restricted_rank(forms: &Mat, w: &Subspace) -> Result<usize, ExponentError> {
    if forms.cols() != w.ambient() {
        return Err(ExponentError::Shape(format!("forms on K^{}, subspace in K^{}", forms.cols(), w.ambient())));
    }
    if w.is_zero() || forms.rows() == 0 {
        return Ok(0);
    }
    Ok(forms.mul(&w.basis().transpose())?.rank())
}

/// r(W): the largest rank of x|_W over the samples.
pub fn rank_image(fam: &HomFamily, w: &Subspace) -> Result<usize, ExponentError> {
    fam.samples.iter().map(|x| restricted_rank(x, w)).try_fold(0, |a, r| r.map(|r| a.max(r)))
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaReport {
    pub value: ExtRat,
    /// Index of the maximizing candidate.
    pub argmax: usize,
    pub dim: usize,
    pub rank: usize,
}

fn require_full(candidates: &[Subspace], d: usize) -> Result<(), ExponentError> {
    if candidates.iter().any(|w| w.ambient() != d) {
        return Err(ExponentError::Shape(format!("candidates must live in K^{d}")));
    }
    if !candidates.iter().any(Subspace::is_full) {
        return Err(ExponentError::MissingFull);
    }
    Ok(())
}

/// max over nonzero candidates W of dim W / r(W) − 1.
pub fn beta_formula(fam: &HomFamily, candidates: &[Subspace]) -> Result<BetaReport, ExponentError> {
    require_full(candidates, fam.source_dim())?;
    let vals: Vec<Option<(ExtRat, usize, usize)>> = candidates
        .par_iter()
        .map(|w| {
            if w.is_zero() {
                return Ok(None);
            }
            let r = rank_image(fam, w)?;
            let v = if r == 0 { ExtRat::Infinite } else { ExtRat::Finite(Rat::new(w.dim().into(), r.into()) - int(1)) };
            Ok(Some((v, w.dim(), r)))
        })
        .collect::<Result<_, ExponentError>>()?;
    let (argmax, best) = first_max(&vals);
    let (value, dim, rank) = best;
    Ok(BetaReport { value, argmax, dim, rank })
}

/// First index attaining the maximum, for deterministic certificates.
fn first_max<T: Clone>(vals: &[Option<(ExtRat, T, T)>]) -> (usize, (ExtRat, T, T)) {
    let mut best: Option<(usize, &(ExtRat, T, T))> = None;
    for (i, v) in vals.iter().enumerate() {
        if let Some(v) = v {
            if best.map_or(true, |(_, b)| v.0 > b.0) {
                best = Some((i, v));
            }
        }
    }
    let (i, v) = best.expect("full space is a nonzero candidate");
    (i, v.clone())
}

/// Forms L_Y on K^{m+n} = {(p, q)}: L_i = Y_i·q − p_i for i < m, L_{m+j} = q_j.
pub fn l_y(y: &Mat) -> Mat {
    let (m, n) = (y.rows(), y.cols());
    let mut rows = Vec::with_capacity(m + n);
    for i in 0..m {
        let mut r = vec![Scalar::zero(); m + n];
        r[i] = Scalar::from_i64(-1);
        r[m..].clone_from_slice(y.row(i));
        rows.push(r);
    }
    for j in 0..n {
        let mut r = vec![Scalar::zero(); m + n];
        r[m + j] = Scalar::one();
        rows.push(r);
    }
    Mat::from_rows(rows).expect("single field context")
}

/// s_{I,W} = rank (L_i|_W)_{i∈I}, indices 0-based.
pub fn s_rank(y: &Mat, idx: &[usize], w: &Subspace) -> Result<usize, ExponentError> {
    let l = l_y(y);
    if let Some(&i) = idx.iter().find(|&&i| i >= l.rows()) {
        return Err(ExponentError::Indices(format!("index {i} outside 0..{}", l.rows())));
    }
    restricted_rank(&l.select_rows(idx), w)
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaCertificate {
    /// Index of W in the candidate list.
    pub w: usize,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub r: usize,
    pub s: usize,
    pub ratio: ExtRat,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    pub value: ExtRat,
    pub certificate: OmegaCertificate,
    pub certificates_checked: usize,
}

/// All (I, J) with ∅ ≠ I ⊆ {0..m−1} ⊆ J ⊊ {0..m+n−1}.
fn index_pairs(m: usize, n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let is: Vec<Vec<usize>> = (1..=m).flat_map(|k| (0..m).combinations(k)).collect();
    let js: Vec<Vec<usize>> =
        (0..n).flat_map(|k| (m..m + n).combinations(k)).map(|extra| (0..m).chain(extra).collect()).collect();
    is.iter().cartesian_product(js.iter()).map(|(i, j)| (i.clone(), j.clone())).collect()
}

/// max over candidates W and index pairs of (dim W − s)|I| / (r(m+n−|J|)),
/// r and s maximized over the samples; r = 0 gives +∞.
pub fn omega_formula(samples: &[Mat], candidates: &[Subspace]) -> Result<OmegaReport, ExponentError> {
    let first = samples.first().ok_or_else(|| ExponentError::Shape("empty family".into()))?;
    let (m, n) = (first.rows(), first.cols());
    if samples.iter().any(|y| y.rows() != m || y.cols() != n) {
        return Err(ExponentError::Shape("samples differ in shape".into()));
    }
    require_full(candidates, m + n)?;
    let forms: Vec<Mat> = samples.iter().map(l_y).collect();
    let pairs = index_pairs(m, n);
    let certs: Vec<OmegaCertificate> = candidates
        .par_iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(wi, w)| {
            pairs
                .iter()
                .map(|(i, j)| {
                    let r = forms.iter().map(|l| restricted_rank(&l.select_rows(i), w)).try_fold(0, |a, x| x.map(|x| a.max(x)))?;
                    let s = forms.iter().map(|l| restricted_rank(&l.select_rows(j), w)).try_fold(0, |a, x| x.map(|x| a.max(x)))?;
                    let ratio = if r == 0 {
                        ExtRat::Infinite
                    } else {
                        let num = (w.dim() - s) * i.len();
                        ExtRat::Finite(Rat::new(num.into(), (r * (m + n - j.len())).into()))
                    };
                    Ok(OmegaCertificate { w: wi, i: i.clone(), j: j.clone(), r, s, ratio })
                })
                .collect::<Result<Vec<_>, ExponentError>>()
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut best = &certs[0];
    for c in &certs {
        if c.ratio > best.ratio {
            best = c;
        }
    }
    Ok(OmegaReport { value: best.ratio.clone(), certificate: best.clone(), certificates_checked: certs.len() })
}

/// Re-checks that every sample lies in the pencil of the certificate:
/// s_{I,W} ≤ r and s_{J,W} ≤ s.
pub fn certificate_holds(samples: &[Mat], candidates: &[Subspace], c: &OmegaCertificate) -> Result<bool, ExponentError> {
    let w = &candidates[c.w];
    for y in samples {
        if s_rank(y, &c.i, w)? > c.r || s_rank(y, &c.j, w)? > c.s {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Zero, every rational line of height ≤ h, every hyperplane with a normal
/// of height ≤ h, and the full space; for d ≥ 4 also planes spanned by two
/// such lines. Deduplicated, sorted canonically.
pub fn height_candidates(d: usize, h: i64) -> Vec<Subspace> {
    let mut out = vec![Subspace::zero(d), Subspace::full(d)];
    let lines = lines_of_height(d, h);
    if d >= 3 {
        for n in &lines {
            out.push(n.annihilator());
        }
    }
    if d >= 4 {
        for (a, b) in lines.iter().tuple_combinations() {
            out.push(a.sum(b).expect("same ambient"));
        }
    }
    out.extend(lines);
    out.sort_by(|a, b| a.repr_cmp(b));
    out.dedup();
    out
}

/// β = (n+m)/(γ+m) − 1 with γ the smallest polygon slope.
pub fn gamma_bridge(polygon: &GraysonPolygon, n: usize, m: usize) -> Result<Rat, ExponentError> {
    if polygon.ambient() != n + m {
        return Err(ExponentError::Shape(format!("polygon over K^{}, expected n + m = {}", polygon.ambient(), n + m)));
    }
    let gamma = polygon.slopes().into_iter().min().expect("nonempty polygon");
    let den = &gamma + Rat::from_integer(m.into());
    if den <= int(0) {
        return Err(ExponentError::Degenerate(crate::exact::rat::fmt_rat(&den)));
    }
    Ok(Rat::from_integer((n + m).into()) / den - int(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::NumberField;

    fn root2_row() -> HomFamily {
        let k = NumberField::sqrt(2, "t").unwrap();
        HomFamily::new(vec![Mat::from_rows(vec![vec![Scalar::one(), Scalar::generator(&k)]]).unwrap()], "root2").unwrap()
    }

    #[test]
    fn image_ranks() {
        let f = root2_row();
        assert_eq!(rank_image(&f, &Subspace::zero(2)).unwrap(), 0);
        assert_eq!(rank_image(&f, &Subspace::full(2)).unwrap(), 1);
        assert_eq!(rank_image(&f, &Subspace::from_int_rows(2, &[vec![-1, 1]])).unwrap(), 1);
    }

    #[test]
    fn roth_beta() {
        let b = beta_formula(&root2_row(), &height_candidates(2, 5)).unwrap();
        assert_eq!(b.value, ExtRat::Finite(int(1)));
        let f = HomFamily::new(vec![Mat::from_i64(&[&[0, 1]])], "e2").unwrap();
        assert_eq!(beta_formula(&f, &height_candidates(2, 1)).unwrap().value, ExtRat::Infinite);
        assert!(matches!(beta_formula(&f, &[Subspace::zero(2)]), Err(ExponentError::MissingFull)));
    }

    #[test]
    fn generic_full_rank() {
        // two independent forms on K^3, full rank on every plane
        let f = HomFamily::new(vec![Mat::from_i64(&[&[1, 0, 0], &[0, 1, 0]])], "proj").unwrap();
        let b = beta_formula(&f, &[Subspace::full(3)]).unwrap();
        assert_eq!(b.value, ExtRat::Finite(Rat::new(1.into(), 2.into())));
    }

    #[test]
    fn s_ranks() {
        let k = NumberField::sqrt(2, "t").unwrap();
        let y = Mat::from_rows(vec![vec![Scalar::generator(&k)]]).unwrap();
        assert_eq!(s_rank(&y, &[0], &Subspace::full(2)).unwrap(), 1);
        let y0 = Mat::from_i64(&[&[0, 0], &[0, 0]]);
        // W = {p = 0} inside K^{2+2}
        let w = Subspace::coordinate(4, &[2, 3]);
        assert_eq!(s_rank(&y0, &[0, 1], &w).unwrap(), 0);
        assert_eq!(s_rank(&y0, &[0, 1], &Subspace::full(4)).unwrap(), 2);
        assert!(s_rank(&y0, &[4], &w).is_err());
    }

    #[test]
    fn omega_cases() {
        let k = NumberField::sqrt(2, "t").unwrap();
        let y = Mat::from_rows(vec![vec![Scalar::generator(&k)]]).unwrap();
        let c = height_candidates(2, 8);
        let o = omega_formula(std::slice::from_ref(&y), &c).unwrap();
        assert_eq!(o.value, ExtRat::Finite(int(1)));
        assert!(certificate_holds(&[y], &c, &o.certificate).unwrap());

        let y0 = Mat::from_i64(&[&[0]]);
        let o = omega_formula(&[y0.clone()], &c).unwrap();
        assert_eq!(o.value, ExtRat::Infinite);
        assert_eq!(c[o.certificate.w], Subspace::coordinate(2, &[1]));
        assert_eq!(o.certificate.r, 0);
        assert!(certificate_holds(&[y0], &c, &o.certificate).unwrap());
    }

    #[test]
    fn index_pair_count() {
        // (2^m − 1)·2^n pairs
        assert_eq!(index_pairs(1, 1).len(), 1);
        assert_eq!(index_pairs(2, 1).len(), 3);
        assert_eq!(index_pairs(1, 2).len(), 3);
        assert_eq!(index_pairs(2, 2).len(), 9);
    }

    #[test]
    fn candidate_sets() {
        let c = height_candidates(3, 1);
        // 0, full, 13 lines, 13 planes
        assert_eq!(c.len(), 28);
        assert!(c.iter().all(|w| w.ambient() == 3));
    }

    #[test]
    fn bridge() {
        for (n, m) in [(1usize, 1usize), (2, 1), (1, 3)] {
            let p = GraysonPolygon::new(vec![(0, int(0)), (n + m, int(0))]).unwrap();
            assert_eq!(gamma_bridge(&p, n, m).unwrap(), Rat::new(n.into(), m.into()));
        }
        let p = GraysonPolygon::new(vec![(0, int(0)), (2, int(-2))]).unwrap();
        assert!(gamma_bridge(&p, 1, 1).is_err());
    }
}
