//! The acceptance suite: ten seeded end-to-end checks with wall-time
//! budgets, shared by the `acceptance` test target and `diagflow verify`.

use std::error::Error;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact::rat::{fmt_rat, int, rat};
use crate::exact::{Mat, NumberField, Rat, Scalar, Subspace};
use crate::exponents::{certificate_holds, dirichlet_witness, gamma_bridge, height_candidates, omega_formula, ExtRat, HomFamily, WitnessKind};
use crate::latticeflow::{
    capture_report, estimate_slopes, minkowski_check, simulate, successive_minima, FixedBasis, SimConfig,
};
use crate::scanner::{operator_bound, scan_solutions, solution_to_flow, ScanConfig, ScanError};
use crate::slopes::brute::{verify_hn_bruteforce, HeightCensus};
use crate::slopes::lattice::{family_generators, lines_of_height};
use crate::slopes::polygon::hn_filtration;
use crate::slopes::submod::{submodularity_check, PairSource};
use crate::slopes::sweep::{flow_sweep, ordered_bell, CandidateRecipe};
use crate::slopes::{close_lattice, is_semistable, tau_pivot, tau_single, Flow, GraysonPolygon, HnFiltration, MatrixFamily, TauOracle};

type Outcome = Result<(bool, String), Box<dyn Error>>;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {:>2} {:<28} {:>8.2}s / {:>4.0}s  {}", self.id, self.name, self.seconds, self.budget_seconds, self.detail)
    }
}

fn run(id: u8, name: &'static str, budget_seconds: f64, f: impl FnOnce() -> Outcome) -> CriterionResult {
    let start = Instant::now();
    let outcome = f();
    let seconds = start.elapsed().as_secs_f64();
    let (ok, mut detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if seconds > budget_seconds {
        detail.push_str(" (over budget)");
    }
    CriterionResult { id, name, passed: ok && seconds <= budget_seconds, detail, seconds, budget_seconds }
}

fn random_rat(rng: &mut ChaCha8Rng, bound: i64, max_den: i64) -> Rat {
    let den = rng.gen_range(1..=max_den);
    rat(rng.gen_range(-bound * den..=bound * den), den)
}

fn random_invertible(rng: &mut ChaCha8Rng, d: usize, bound: i64, max_den: i64) -> Mat {
    loop {
        let rows: Vec<Vec<Rat>> = (0..d).map(|_| (0..d).map(|_| random_rat(rng, bound, max_den)).collect()).collect();
        let m = Mat::from_rats(&rows);
        if m.rank() == d {
            return m;
        }
    }
}

fn random_flow(rng: &mut ChaCha8Rng, d: usize) -> Flow {
    Flow::new((0..d).map(|_| random_rat(rng, 5, 4)).collect()).expect("rational weights")
}

fn random_unimodular_flow(rng: &mut ChaCha8Rng, d: usize) -> Flow {
    let w: Vec<Rat> = (0..d).map(|_| int(rng.gen_range(-5..=5))).collect();
    let mean = w.iter().sum::<Rat>() / int(d as i64);
    Flow::new(w.into_iter().map(|x| x - &mean).collect()).expect("rational weights")
}

fn random_subspace(rng: &mut ChaCha8Rng, d: usize) -> Subspace {
    let k = rng.gen_range(1..=d);
    let rows: Vec<Vec<i64>> = (0..k).map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    Subspace::from_int_rows(d, &rows)
}

fn sqrt2_shear() -> Mat {
    let k = NumberField::sqrt(2, "t").expect("x^2 - 2 is irreducible");
    Mat::from_rows(vec![vec![Scalar::one(), Scalar::generator(&k)], vec![Scalar::zero(), Scalar::one()]]).expect("square")
}

fn predicted_filtration(l: &Mat, flow: &Flow) -> Result<HnFiltration, Box<dyn Error>> {
    let fam = MatrixFamily::singleton(l.clone())?;
    let gens = family_generators(&fam, flow, true)?;
    let lat = close_lattice(flow.dim(), &gens, 8)?;
    Ok(hn_filtration(&TauOracle::new(fam, flow.clone())?, &lat)?)
}

pub fn criterion_1(seed: u64) -> CriterionResult {
    run(1, "tau formula agreement", 10.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x01);
        let mut mismatches = 0;
        for i in 0..500 {
            let d = 1 + i % 5;
            let l = random_invertible(&mut rng, d, 5, 3);
            let v = random_subspace(&mut rng, d);
            let a = random_flow(&mut rng, d);
            if tau_single(&l, &v, &a)? != tau_pivot(&l, &v, &a)? {
                mismatches += 1;
            }
        }
        Ok((mismatches == 0, format!("500 instances, {mismatches} mismatches")))
    })
}

pub fn criterion_2(seed: u64) -> CriterionResult {
    run(2, "submodularity", 30.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
        let (mut pairs, mut violations) = (0, 0);
        for f in 0..10u64 {
            let d = 2 + (f as usize) % 4;
            let fam = MatrixFamily::singleton(random_invertible(&mut rng, d, 5, 3))?;
            let oracle = TauOracle::new(fam, random_flow(&mut rng, d))?;
            let r = submodularity_check(&oracle, PairSource::Random { ambient: d, entry_bound: 3 }, 500, rng.gen())?;
            pairs += r.pairs_checked;
            violations += r.violations.len();
        }
        Ok((violations == 0, format!("{pairs} pairs over 10 families, {violations} violations")))
    })
}

pub fn criterion_3(seed: u64) -> CriterionResult {
    run(3, "HN polygon brute force", 300.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x03);
        let censuses: Vec<HeightCensus> = (1..=3).map(|d| HeightCensus::new(d, 4)).collect();
        let mut failures = Vec::new();
        for i in 0..50 {
            let d = 2 + i % 2;
            let fam = MatrixFamily::singleton(random_invertible(&mut rng, d, 5, 2))?;
            for j in 0..10 {
                let a = random_flow(&mut rng, d);
                if !verify_hn_bruteforce(&fam, &a, &censuses[d - 1])? {
                    failures.push((i, j));
                }
            }
        }
        Ok((failures.is_empty(), format!("500 (L, flow) pairs at height 4, failures {failures:?}")))
    })
}

pub fn criterion_4(_seed: u64) -> CriterionResult {
    run(4, "rational flag dynamics", 10.0, || {
        let l = Mat::identity(3);
        let flow = Flow::from_i64(&[1, 0, -1]);
        let p = predicted_filtration(&l, &flow)?;
        let cfg = SimConfig::new(l.clone(), flow.clone(), SimConfig::int_grid(1, 30))?;
        let s = simulate(&cfg, &p)?;
        let mut worst: f64 = 0.0;
        let mut residual_ok = true;
        for snap in &s.snapshots {
            for (v, e) in snap.log_minima_over_t.iter().zip([-1.0, 0.0, 1.0]) {
                worst = worst.max((v - e).abs());
            }
            residual_ok &= minkowski_check(snap, &l, &flow, &snap.t).ok();
        }
        let captured = s.capture_times == vec![Some(int(1)), Some(int(1))];
        let terms_ok = p.dims() == vec![0, 1, 2, 3]
            && p.chain[1].0 == Subspace::coordinate(3, &[2])
            && p.chain[2].0 == Subspace::coordinate(3, &[1, 2]);
        let ok = worst <= 1e-9 && residual_ok && captured && terms_ok;
        let times: Vec<String> = s.capture_times.iter().map(|t| t.as_ref().map_or("never".into(), fmt_rat)).collect();
        Ok((ok, format!("max |log/t − Λ| {worst:.1e}, capture times {times:?}, Minkowski ok {residual_ok}")))
    })
}

pub fn criterion_5(_seed: u64) -> CriterionResult {
    run(5, "semistable irrational case", 60.0, || {
        let l = sqrt2_shear();
        let flow = Flow::from_i64(&[1, -1]);
        let fam = MatrixFamily::singleton(l.clone())?;
        let lat = close_lattice(2, &lines_of_height(2, 10), 2)?;
        let semistable = is_semistable(&TauOracle::new(fam, flow.clone())?, &lat)?;
        let trivial = {
            let polygon = GraysonPolygon::new(vec![(0, int(0)), (2, int(0))])?;
            HnFiltration { chain: vec![(Subspace::zero(2), int(0)), (Subspace::full(2), int(0))], slopes: polygon.slopes(), polygon }
        };
        let cfg = SimConfig::new(l, flow, SimConfig::int_grid(25, 40))?;
        let s = simulate(&cfg, &trivial)?;
        let band = s.snapshots.iter().map(|x| x.log_minima_over_t[0].abs()).fold(0.0, f64::max);
        let slope = estimate_slopes(&s, s.snapshots.len())?;
        let ok = semistable && band <= 0.08 && slope.iter().all(|v| v.abs() <= 0.05);
        Ok((ok, format!("semistable {semistable}, max |log λ_1/t| {band:.4}, slopes {:?}", slope.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>())))
    })
}

pub fn criterion_6(_seed: u64) -> CriterionResult {
    run(6, "flag capture", 10.0, || {
        let l = Mat::from_i64(&[&[1, 1], &[0, 1]]);
        let flow = Flow::from_i64(&[1, -1]);
        let p = predicted_filtration(&l, &flow)?;
        let v1_ok = p.chain.len() == 3 && p.chain[1].0 == Subspace::from_int_rows(2, &[vec![-1, 1]]);
        let cfg = SimConfig::new(l, flow, SimConfig::int_grid(1, 12))?;
        let half = rat(1, 2);
        let s = simulate(&cfg, &p)?;
        let good = capture_report(&s, &p, &half).iter().all(|c| c.passed && c.passes_from.as_ref().is_some_and(|t| *t <= int(2)));
        let mut bad = p.clone();
        if bad.chain.len() == 3 {
            bad.chain[1].0 = Subspace::coordinate(2, &[0]);
        }
        let s = simulate(&cfg, &bad)?;
        let falsified = capture_report(&s, &bad, &half).iter().any(|c| !c.passed);
        Ok((v1_ok && good && falsified, format!("V_1 = <(-1,1)> {v1_ok}, capture from t ≤ 2 {good}, corrupted V_1 fails {falsified}")))
    })
}

pub fn criterion_7(_seed: u64) -> CriterionResult {
    run(7, "scanner and reduction", 120.0, || {
        let l = sqrt2_shear();
        let eps = int(4);
        let cfg = ScanConfig::new(l.clone(), eps.clone(), 10_000)?;
        let sols = scan_solutions(&cfg)?;
        let c = operator_bound(&l);
        let (mut reduced, mut failed) = (0usize, 0usize);
        let mut flows: Vec<Vec<i64>> = Vec::new();
        let mut big_d: f64 = 0.0;
        for s in &sols {
            match solution_to_flow(&s.x_i64(), &l, &eps, &c) {
                Ok(f) => {
                    reduced += 1;
                    if f.aas.holds != Some(true) {
                        failed += 1;
                    }
                    big_d = big_d.max(f.big_d);
                    if !flows.contains(&f.n) {
                        flows.push(f.n);
                    }
                }
                Err(ScanError::TooSmall(_) | ScanError::ZeroForm(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        let bound = (6.0 * big_d).powi(l.rows() as i32);
        let ok = failed == 0 && flows.len() as f64 <= bound;
        Ok((ok, format!("{} solutions, {reduced} with t ≥ 1, {failed} aas failures, {} flows", sols.len(), flows.len())))
    })
}

pub fn criterion_8(_seed: u64) -> CriterionResult {
    run(8, "exponent formulas", 30.0, || {
        let k = NumberField::sqrt(2, "t")?;
        let row = Mat::from_rows(vec![vec![Scalar::one(), Scalar::generator(&k)]])?;
        let beta = crate::exponents::beta_formula(&HomFamily::new(vec![row], "root2")?, &height_candidates(2, 8))?;
        let beta_ok = beta.value == ExtRat::Finite(int(1));

        let cands = height_candidates(2, 8);
        let y = Mat::from_rows(vec![vec![Scalar::generator(&k)]])?;
        let omega = omega_formula(std::slice::from_ref(&y), &cands)?;
        let omega_ok = omega.value == ExtRat::Finite(int(1)) && certificate_holds(&[y], &cands, &omega.certificate)?;

        let y0 = Mat::from_i64(&[&[0]]);
        let o0 = omega_formula(std::slice::from_ref(&y0), &cands)?;
        let c0 = &o0.certificate;
        let w = &cands[c0.w];
        let wit = dirichlet_witness(&y0, w, &c0.i, &c0.j, &int(10))?;
        let kernel_ok = o0.value == ExtRat::Infinite
            && c0.r == 0
            && w.is_rational()
            && certificate_holds(&[y0], &cands, c0)?
            && matches!(wit.kind, WitnessKind::Kernel);

        let mut bridge_ok = true;
        for (n, m) in [(1usize, 1usize), (2, 1), (1, 3)] {
            let p = GraysonPolygon::new(vec![(0, int(0)), (n + m, int(0))])?;
            bridge_ok &= gamma_bridge(&p, n, m)? == Rat::new(BigInt::from(n), BigInt::from(m));
        }
        let ok = beta_ok && omega_ok && kernel_ok && bridge_ok;
        Ok((ok, format!("beta {}, omega {}, Y=0 {} (kernel {kernel_ok}), bridge {bridge_ok}", beta.value, omega.value, o0.value)))
    })
}

pub fn criterion_9(seed: u64) -> CriterionResult {
    run(9, "census bound", 60.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x09);
        let bell_ok = ordered_bell(2) == BigUint::from(3u32) && ordered_bell(3) == BigUint::from(13u32);
        let mut ok = bell_ok;
        let mut sizes = Vec::new();
        for d in [2usize, 3] {
            let fam = MatrixFamily::singleton(Mat::identity(d))?;
            let flows: Vec<Flow> = (0..200).map(|_| random_unimodular_flow(&mut rng, d)).collect();
            let c = flow_sweep(&fam, &flows, &CandidateRecipe::default())?;
            ok &= BigUint::from(c.subspaces.len()) <= ordered_bell(1 << d);
            sizes.push(format!("d={d}: {} ≤ {}", c.subspaces.len(), c.bound));
        }
        Ok((ok, format!("b(2)=3, b(3)=13 {bell_ok}; {}", sizes.join(", "))))
    })
}

/// Successive minima of the columns of `b` by greedy selection over the
/// coefficient box |c_i| ≤ h.
fn brute_minima(b: &[Vec<f64>], h: i64) -> Vec<f64> {
    let d = b.len();
    let side = (2 * h + 1) as usize;
    let mut pts: Vec<(f64, Vec<i64>)> = Vec::new();
    for code in 1..side.pow(d as u32) {
        let mut c = code;
        let x: Vec<i64> = (0..d)
            .map(|_| {
                let v = (c % side) as i64 - h;
                c /= side;
                v
            })
            .collect();
        if x.iter().all(|&v| v == 0) {
            continue;
        }
        let n2: f64 = (0..d).map(|i| (0..d).map(|j| b[i][j] * x[j] as f64).sum::<f64>().powi(2)).sum();
        pts.push((n2, x));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    let mut out = Vec::new();
    for (n2, x) in pts {
        let mut rows = chosen.clone();
        rows.push(x.clone());
        if Subspace::from_int_rows(d, &rows).dim() == rows.len() {
            chosen.push(x);
            out.push(n2.sqrt());
            if out.len() == d {
                break;
            }
        }
    }
    out
}

/// Random basis whose minimizers provably lie in the box |c_i| ≤ h:
/// |c_i| ≤ ‖B⁻¹‖_F·λ_d and λ_d ≤ the longest column.
fn well_conditioned_basis(rng: &mut ChaCha8Rng, d: usize, h: i64) -> Vec<Vec<f64>> {
    loop {
        let rows: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-(1i64 << 20)..=(1i64 << 20)) as f64 / (1u64 << 20) as f64).collect()).collect();
        let rats: Vec<Vec<Rat>> = rows.iter().map(|r| r.iter().map(|&x| crate::exact::rat::rat_from_f64(x)).collect()).collect();
        let m = Mat::from_rats(&rats);
        let Ok(inv) = m.inverse() else { continue };
        let inv_f: f64 = inv.to_f64_rows().iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        let longest = (0..d).map(|j| (0..d).map(|i| rows[i][j].powi(2)).sum::<f64>().sqrt()).fold(0.0, f64::max);
        if inv_f * longest * (1.0 + 1e-9) <= h as f64 {
            return rows;
        }
    }
}

pub fn criterion_10(seed: u64) -> CriterionResult {
    run(10, "successive minima oracle", 60.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0a);
        let mut worst: f64 = 0.0;
        for i in 0..100 {
            let d = 2 + i % 2;
            let rows = well_conditioned_basis(&mut rng, d, 10);
            let cert = successive_minima(&FixedBasis::from_f64_rows(&rows, 60))?.values();
            let brute = brute_minima(&rows, 10);
            for (a, b) in cert.iter().zip(&brute) {
                worst = worst.max(((a - b) / b).abs());
            }
            if brute.len() != d {
                return Ok((false, format!("basis {i}: box holds only {} independent vectors", brute.len())));
            }
        }
        Ok((worst <= 1e-10, format!("100 bases, max relative error {worst:.2e}")))
    })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    let all: [fn(u64) -> CriterionResult; 10] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10];
    all.iter().map(|f| f(seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn brute_minima_of_identity() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(brute_minima(&id, 3), vec![1.0, 1.0]);
        let sheared = vec![vec![1.0, 5.0], vec![0.0, 1.0]];
        assert_eq!(brute_minima(&sheared, 10), vec![1.0, 1.0]);
    }

    #[test]
    fn random_flows_are_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..5 {
            assert!(random_unimodular_flow(&mut rng, d).total().is_zero());
        }
    }
}
