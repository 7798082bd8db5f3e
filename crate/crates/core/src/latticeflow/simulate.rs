//! Time-grid simulation of a_t·L·ℤ^d.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::minima::{round_interval, successive_minima, FixedBasis, Minima};
use super::LatticeError;
use crate::exact::exp::exp_interval;
use crate::exact::rat::{fmt_rat, pow2_rat, rat_to_f64};
use crate::exact::{Mat, Rat, RealInterval, Subspace};
use crate::slopes::{slopes_to_lambda, Flow, HnFiltration};

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub l: Mat,
    pub flow: Flow,
    pub t_grid: Vec<Rat>,
    pub precision_margin_bits: u32,
    /// Accepted for compatibility; enumeration starts from the shortest
    /// admissible basis vector, so any factor ≥ 1 gives the same minima.
    pub enumeration_bound_factor: Rat,
}

impl SimConfig {
    pub fn new(l: Mat, flow: Flow, t_grid: Vec<Rat>) -> Result<SimConfig, LatticeError> {
        let cfg = SimConfig { l, flow, t_grid, precision_margin_bits: 64, enumeration_bound_factor: Rat::from_integer(1.into()) };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let d = self.flow.dim();
        if !self.l.is_square() || self.l.rows() != d {
            return Err(LatticeError::Config(format!("L is {}×{}, flow has {d} weights", self.l.rows(), self.l.cols())));
        }
        if self.l.det()?.is_zero() {
            return Err(LatticeError::Singular);
        }
        if self.t_grid.is_empty() || !self.t_grid[0].is_positive() || self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LatticeError::Config("t grid must be positive and strictly increasing".into()));
        }
        if self.enumeration_bound_factor < Rat::from_integer(1.into()) {
            return Err(LatticeError::Config("enumeration bound factor below 1".into()));
        }
        Ok(())
    }

    /// Integer grid {from, …, to}.
    pub fn int_grid(from: i64, to: i64) -> Vec<Rat> {
        (from..=to).map(|t| Rat::from_integer(t.into())).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    #[serde(serialize_with = "crate::exact::rat::ser_rat")]
    pub t: Rat,
    pub prec: u32,
    pub minima: Minima,
    /// ln λ_k(a_t L ℤ^d).
    pub log_minima: Vec<f64>,
    pub log_minima_over_t: Vec<f64>,
    /// ln covol(a_t L ℤ^d).
    pub covol_log: f64,
    /// Per interior term V_ℓ: whether the first d_ℓ minimizers lie in V_ℓ.
    pub in_v: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SnapshotSeries {
    pub snapshots: Vec<Snapshot>,
    /// Dimensions d_ℓ of the predicted interior terms.
    pub predicted_dims: Vec<usize>,
    /// t*_ℓ per interior term; `None` if membership fails at the last grid point.
    #[serde(serialize_with = "ser_opt_rats")]
    pub capture_times: Vec<Option<Rat>>,
}

fn ser_opt_rats<S: serde::Serializer>(v: &[Option<Rat>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.as_ref().map(fmt_rat))?;
    }
    seq.end()
}

/// Bits for time t: ceil(t·max|A_i|·log₂e) + margin.
pub fn working_precision(flow: &Flow, t: &Rat, margin: u32) -> u32 {
    let amax = flow.weights().iter().map(|a| a.abs()).max().unwrap_or_default();
    (rat_to_f64(&(t * amax)) * std::f64::consts::LOG2_E).ceil().max(0.0) as u32 + margin
}

/// Fixed-point basis of diag(e^{(A_i−A_min)t})·L at `prec` bits.
fn scaled_basis(l: &Mat, flow: &Flow, t: &Rat, prec: u32) -> FixedBasis {
    let d = flow.dim();
    let amin = flow.min_weight();
    let scale = pow2_rat(prec as i64);
    let mut cols = vec![vec![BigInt::zero(); d]; d];
    let mut radius = BigInt::zero();
    for i in 0..d {
        let q = (flow.weight(i) - amin) * t;
        let growth = (rat_to_f64(&q) * std::f64::consts::LOG2_E).ceil() as u32 + 4;
        let e = exp_interval(&q, prec + 8 + entry_bits(l));
        for (j, col) in cols.iter_mut().enumerate() {
            let v = l.get(i, j).real_value(prec + growth + 4);
            let iv: RealInterval = e.mul(&v);
            let (c, r) = round_interval(&iv, &scale);
            col[i] = c;
            radius = radius.max(r);
        }
    }
    FixedBasis { prec, cols, radius }
}

fn entry_bits(l: &Mat) -> u32 {
    let m = l.entries().iter().map(|s| s.to_f64().abs()).fold(1.0f64, f64::max);
    m.log2().ceil() as u32 + 1
}

fn snapshot_at(cfg: &SimConfig, t: &Rat, terms: &[Subspace], log_det: f64) -> Result<Snapshot, LatticeError> {
    let mut prec = working_precision(&cfg.flow, t, cfg.precision_margin_bits);
    let minima = match successive_minima(&scaled_basis(&cfg.l, &cfg.flow, t, prec)) {
        Ok(m) => m,
        Err(LatticeError::PrecisionExhausted { .. }) => {
            prec *= 2;
            successive_minima(&scaled_basis(&cfg.l, &cfg.flow, t, prec))?
        }
        Err(e) => return Err(e),
    };
    let tf = rat_to_f64(t);
    let shift = rat_to_f64(cfg.flow.min_weight()) * tf;
    let log_minima: Vec<f64> = minima.logs().iter().map(|v| v + shift).collect();
    let log_minima_over_t = log_minima.iter().map(|v| v / tf).collect();
    let xs = minima.minimizers();
    let in_v = terms
        .iter()
        .map(|v| xs[..v.dim()].iter().all(|x| v.contains(x).expect("ambient length")))
        .collect();
    Ok(Snapshot {
        t: t.clone(),
        prec,
        minima,
        log_minima,
        log_minima_over_t,
        covol_log: rat_to_f64(&cfg.flow.total()) * tf + log_det,
        in_v,
    })
}

pub fn simulate(cfg: &SimConfig, predicted: &HnFiltration) -> Result<SnapshotSeries, LatticeError> {
    cfg.validate()?;
    let d = cfg.flow.dim();
    if predicted.polygon.ambient() != d {
        return Err(LatticeError::Config(format!("prediction is for d = {}", predicted.polygon.ambient())));
    }
    let terms: Vec<Subspace> = predicted.interior().iter().map(|(v, _)| v.clone()).collect();
    let log_det = cfg.l.det()?.to_f64().abs().ln();
    let snapshots = cfg
        .t_grid
        .par_iter()
        .map(|t| snapshot_at(cfg, t, &terms, log_det))
        .collect::<Result<Vec<_>, _>>()?;
    let capture_times = (0..terms.len())
        .map(|l| {
            let mut first = None;
            for s in snapshots.iter().rev() {
                if !s.in_v[l] {
                    break;
                }
                first = Some(s.t.clone());
            }
            first
        })
        .collect();
    Ok(SnapshotSeries { snapshots, predicted_dims: terms.iter().map(Subspace::dim).collect(), capture_times })
}

/// Least-squares slope of ln λ_k against t over the last `window` snapshots.
pub fn estimate_slopes(series: &SnapshotSeries, window: usize) -> Result<Vec<f64>, LatticeError> {
    let n = series.snapshots.len();
    if window < 2 || window > n {
        return Err(LatticeError::Config(format!("window {window} outside 2..={n}")));
    }
    let snaps = &series.snapshots[n - window..];
    let ts: Vec<f64> = snaps.iter().map(|s| rat_to_f64(&s.t)).collect();
    let tbar = ts.iter().sum::<f64>() / window as f64;
    let stt: f64 = ts.iter().map(|t| (t - tbar).powi(2)).sum();
    let d = snaps[0].log_minima.len();
    Ok((0..d)
        .map(|k| {
            let ybar = snaps.iter().map(|s| s.log_minima[k]).sum::<f64>() / window as f64;
            let sty: f64 = snaps.iter().zip(&ts).map(|(s, t)| (t - tbar) * (s.log_minima[k] - ybar)).sum();
            sty / stt
        })
        .collect())
}

/// C_d = d·ln 2 + ln d! + |ln ω_d|, ω_d the volume of the unit d-ball.
pub fn minkowski_bound(d: usize) -> f64 {
    let df = d as f64;
    let ln_fact: f64 = (1..=d).map(|k| (k as f64).ln()).sum();
    // ω_d = π^{d/2} / Γ(d/2 + 1)
    let ln_gamma = if d % 2 == 0 {
        (1..=d / 2).map(|k| (k as f64).ln()).sum::<f64>()
    } else {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let n = (d + 1) / 2;
        let l2n: f64 = (1..=2 * n).map(|k| (k as f64).ln()).sum();
        let ln_n: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
        l2n + 0.5 * std::f64::consts::PI.ln() - (n as f64) * 4f64.ln() - ln_n
    };
    let ln_omega = 0.5 * df * std::f64::consts::PI.ln() - ln_gamma;
    df * std::f64::consts::LN_2 + ln_fact + ln_omega.abs()
}

#[derive(Clone, Debug, Serialize)]
pub struct MinkowskiResidual {
    pub residual: f64,
    pub bound: f64,
}

impl MinkowskiResidual {
    pub fn ok(&self) -> bool {
        self.residual <= self.bound
    }
}

/// |Σ ln λ_k − (t·ΣA + ln|det L|)| against C_d.
pub fn minkowski_check(snapshot: &Snapshot, l: &Mat, flow: &Flow, t: &Rat) -> MinkowskiResidual {
    let covol = rat_to_f64(&flow.total()) * rat_to_f64(t) + l.det().expect("square").to_f64().abs().ln();
    let sum: f64 = snapshot.log_minima.iter().sum();
    MinkowskiResidual { residual: (sum - covol).abs(), bound: minkowski_bound(flow.dim()) }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaptureVerdict {
    /// Segment index ℓ ≥ 1 of the predicted polygon.
    pub ell: usize,
    #[serde(serialize_with = "crate::exact::rat::ser_rat")]
    pub lambda: Rat,
    /// Grid point from which V_{ℓ−1} is checked: t*_{ℓ−1}, or the first
    /// grid point for ℓ = 1. `None` when capture never happens.
    #[serde(serialize_with = "crate::exact::rat::ser_opt_rat")]
    pub checked_from: Option<Rat>,
    /// Earliest (t, minimizer) breaking the implication anywhere on the grid.
    #[serde(serialize_with = "ser_opt_violation")]
    pub first_violation: Option<(Rat, Vec<BigInt>)>,
    /// Earliest grid point with no violation there or later.
    #[serde(serialize_with = "crate::exact::rat::ser_opt_rat")]
    pub passes_from: Option<Rat>,
    pub passed: bool,
}

fn ser_opt_violation<S: serde::Serializer>(v: &Option<(Rat, Vec<BigInt>)>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some((t, x)) => s.serialize_some(&(fmt_rat(t), x.iter().map(ToString::to_string).collect::<Vec<_>>())),
        None => s.serialize_none(),
    }
}

/// Checks ‖a_t L x‖ ≤ e^{t(Λ_{d_ℓ}−ε)} ⇒ x ∈ V_{ℓ−1} for every recorded
/// minimizer x. Violations are findings, not errors.
pub fn capture_report(series: &SnapshotSeries, predicted: &HnFiltration, eps: &Rat) -> Vec<CaptureVerdict> {
    assert!(eps.is_positive(), "ε must be positive");
    let lambda = slopes_to_lambda(&predicted.polygon);
    let chain = &predicted.chain;
    let interior_times = &series.capture_times;
    (1..chain.len())
        .map(|ell| {
            let d_ell = chain[ell].0.dim();
            let lam = lambda[d_ell - 1].clone();
            let below = &chain[ell - 1].0;
            let checked_from = if ell == 1 {
                series.snapshots.first().map(|s| s.t.clone())
            } else {
                interior_times.get(ell - 2).cloned().flatten()
            };
            let bad_at: Vec<Option<Vec<BigInt>>> = series
                .snapshots
                .iter()
                .map(|s| {
                    let thr = rat_to_f64(&((&lam - eps) * &s.t));
                    s.minima
                        .minima
                        .iter()
                        .zip(&s.log_minima)
                        .find(|(m, &lg)| lg <= thr && !below.contains(&m.coeffs).expect("ambient length"))
                        .map(|(m, _)| m.coeffs.clone())
                })
                .collect();
            let first_violation =
                series.snapshots.iter().zip(&bad_at).find_map(|(s, b)| b.as_ref().map(|x| (s.t.clone(), x.clone())));
            let mut passes_from = None;
            for (s, b) in series.snapshots.iter().zip(&bad_at).rev() {
                if b.is_some() {
                    break;
                }
                passes_from = Some(s.t.clone());
            }
            let passed = match (&checked_from, &passes_from) {
                (Some(c), Some(p)) => p <= c,
                _ => false,
            };
            CaptureVerdict { ell, lambda: lam, checked_from, first_violation, passes_from, passed }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::int;
    use crate::slopes::polygon::hn_filtration;
    use crate::slopes::{close_lattice, MatrixFamily, TauOracle};

    fn predict(l: &Mat, flow: &Flow) -> HnFiltration {
        let fam = MatrixFamily::singleton(l.clone()).unwrap();
        let gens = crate::slopes::lattice::family_generators(&fam, flow, true).unwrap();
        let lat = close_lattice(flow.dim(), &gens, 8).unwrap();
        hn_filtration(&TauOracle::new(fam, flow.clone()).unwrap(), &lat).unwrap()
    }

    #[test]
    fn diagonal_identity() {
        let l = Mat::identity(3);
        let flow = Flow::from_i64(&[1, 0, -1]);
        let cfg = SimConfig::new(l.clone(), flow.clone(), SimConfig::int_grid(1, 6)).unwrap();
        let p = predict(&l, &flow);
        assert_eq!(p.dims(), vec![0, 1, 2, 3]);
        let s = simulate(&cfg, &p).unwrap();
        for snap in &s.snapshots {
            for (v, e) in snap.log_minima_over_t.iter().zip([-1.0, 0.0, 1.0]) {
                assert!((v - e).abs() < 1e-12);
            }
            assert!(minkowski_check(snap, &l, &flow, &snap.t).ok());
        }
        assert_eq!(s.capture_times, vec![Some(int(1)), Some(int(1))]);
        assert!(capture_report(&s, &p, &Rat::new(1.into(), 2.into())).iter().all(|v| v.passed));
    }

    #[test]
    fn minkowski_constants() {
        assert!((minkowski_bound(2) - (2.0 * 2f64.ln() + 2f64.ln() + std::f64::consts::PI.ln())).abs() < 1e-12);
        // ω_3 = 4π/3
        let c3 = 3.0 * 2f64.ln() + 6f64.ln() + (4.0 * std::f64::consts::PI / 3.0).ln();
        assert!((minkowski_bound(3) - c3).abs() < 1e-12);
        // ω_1 = 2
        assert!((minkowski_bound(1) - (2f64.ln() + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn slopes_from_window() {
        let l = Mat::identity(2);
        let flow = Flow::from_i64(&[1, -1]);
        let cfg = SimConfig::new(l.clone(), flow.clone(), SimConfig::int_grid(1, 5)).unwrap();
        let s = simulate(&cfg, &predict(&l, &flow)).unwrap();
        let e = estimate_slopes(&s, 3).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
        assert!(estimate_slopes(&s, 1).is_err());
        assert!(estimate_slopes(&s, 6).is_err());
    }

    #[test]
    fn bad_grid_rejected() {
        let l = Mat::identity(2);
        let flow = Flow::from_i64(&[1, -1]);
        assert!(SimConfig::new(l.clone(), flow.clone(), vec![int(2), int(1)]).is_err());
        assert!(SimConfig::new(l, flow, vec![int(0)]).is_err());
    }
}
