//! One function per subcommand. Each returns its results as JSON plus the
//! verdicts it evaluated; nothing here writes output.

use std::time::Instant;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use diagflow::exact::rat::fmt_rat;
use diagflow::exact::{Rat, Subspace};
use diagflow::exponents::{
    beta_alpha_formula, beta_formula, certificate_holds, dirichlet_witness, gamma_bridge, height_candidates, omega_formula,
    HomFamily, QuasiNorm,
};
use diagflow::latticeflow::{capture_report, estimate_slopes, minkowski_check, simulate, SimConfig};
use diagflow::scanner::{classify, exceptional_subspaces, operator_bound, scan_solutions, solution_to_flow, ScanConfig, ScanError};
use diagflow::slopes::lattice::family_generators;
use diagflow::slopes::sweep::flow_sweep;
use diagflow::slopes::{
    close_lattice, grayson_polygon, hn_filtration, is_semistable, slopes_to_lambda, tau_family, tau_pivot, tau_single,
    CandidateLattice, Flow, GraysonPolygon, HnFiltration, MatrixFamily, SlopeError, TauOracle,
};

use crate::config::{missing, ConfigError, Setup};
use crate::report::Verdict;

pub const COMMANDS: [&str; 8] = ["tau", "polygon", "hn", "sweep", "simulate", "scan", "exponents", "verify"];

/// Default working-precision margin for simulations, in bits.
pub const DEFAULT_MARGIN: u32 = 64;

#[derive(Clone, Copy, Debug)]
pub struct Ctx {
    pub seed: u64,
    pub precision_margin: Option<u32>,
}

pub type Outcome = (Value, Vec<Verdict>);

pub fn run(command: &str, setup: &Setup, ctx: &Ctx) -> Result<Outcome> {
    match command {
        "tau" => cmd_tau(setup),
        "polygon" => cmd_polygon(setup),
        "hn" => cmd_hn(setup),
        "sweep" => cmd_sweep(setup, ctx),
        "simulate" => cmd_simulate(setup, ctx),
        "scan" => cmd_scan(setup),
        "exponents" => cmd_exponents(setup),
        "verify" => cmd_verify(setup, ctx),
        other => Err(ConfigError::Invalid(format!("unknown command {other}")).into()),
    }
}

fn subspace_json(v: &Subspace) -> Value {
    json!(v.rows_literal())
}

fn rats_json(v: &[Rat]) -> Value {
    json!(v.iter().map(fmt_rat).collect::<Vec<_>>())
}

fn lattice_for(setup: &Setup, fam: &MatrixFamily, a: &Flow) -> Result<CandidateLattice> {
    let mut gens = family_generators(fam, a, setup.recipe.rational_only)?;
    for e in &setup.recipe.extra {
        if !gens.contains(e) {
            gens.push(e.clone());
        }
    }
    Ok(close_lattice(fam.dim(), &gens, setup.recipe.rounds)?)
}

fn hn_json(hn: &HnFiltration) -> Value {
    json!({
        "chain": hn.chain.iter().map(|(v, phi)| json!({"dim": v.dim(), "basis": subspace_json(v), "value": fmt_rat(phi)})).collect::<Vec<_>>(),
        "slopes": rats_json(&hn.slopes),
        "lambda": rats_json(&slopes_to_lambda(&hn.polygon)),
        "polygon": hn.polygon,
    })
}

pub fn cmd_tau(setup: &Setup) -> Result<Outcome> {
    if setup.raw.tau.is_none() {
        return Err(missing("tau").into());
    }
    let fam = setup.family()?;
    let flows = setup.require_flows()?;
    let mut rows = Vec::new();
    let mut disagreements = 0usize;
    let mut mismatches = Vec::new();
    for (fi, a) in flows.iter().enumerate() {
        for (si, v) in setup.tau_subspaces.iter().enumerate() {
            let mut per_matrix = Vec::new();
            for l in &setup.matrices {
                let (single, pivot) = (tau_single(l, v, a)?, tau_pivot(l, v, a)?);
                disagreements += usize::from(single != pivot);
                per_matrix.push(json!({"single": fmt_rat(&single), "pivot": fmt_rat(&pivot), "agree": single == pivot}));
            }
            let family = tau_family(&fam, v, a)?;
            if let Some(e) = &setup.tau_expect {
                let want = &e[fi * setup.tau_subspaces.len() + si];
                if *want != family {
                    mismatches.push(format!("flow {fi} subspace {si}: {} ≠ {}", fmt_rat(&family), fmt_rat(want)));
                }
            }
            rows.push(json!({"flow": fi, "subspace": si, "family": fmt_rat(&family), "per_matrix": per_matrix}));
        }
    }
    let mut verdicts = vec![Verdict::new("formulas agree", disagreements == 0, format!("{disagreements} disagreements"))];
    if setup.tau_expect.is_some() {
        verdicts.push(Verdict::new("expected values", mismatches.is_empty(), mismatches.join("; ")));
    }
    Ok((json!({"values": rows}), verdicts))
}

fn polygons(setup: &Setup) -> Result<Vec<(CandidateLattice, TauOracle)>> {
    let fam = setup.family()?;
    setup
        .require_flows()?
        .iter()
        .map(|a| Ok((lattice_for(setup, &fam, a)?, TauOracle::new(fam.clone(), a.clone())?)))
        .collect()
}

pub fn cmd_polygon(setup: &Setup) -> Result<Outcome> {
    let mut out = Vec::new();
    let mut mismatches = Vec::new();
    for (fi, (lat, oracle)) in polygons(setup)?.iter().enumerate() {
        let p = grayson_polygon(oracle, lat)?;
        if let Some(e) = &setup.polygon_expect {
            if p.slopes() != e[fi] {
                mismatches.push(format!("flow {fi}"));
            }
        }
        out.push(json!({
            "flow": setup.flows[fi],
            "lattice_size": lat.len(),
            "polygon": p,
            "slopes": rats_json(&p.slopes()),
            "lambda": rats_json(&slopes_to_lambda(&p)),
        }));
    }
    let mut verdicts = Vec::new();
    if setup.polygon_expect.is_some() {
        verdicts.push(Verdict::new("expected slopes", mismatches.is_empty(), mismatches.join("; ")));
    }
    Ok((json!({"polygons": out}), verdicts))
}

fn is_nested(hn: &HnFiltration) -> Result<bool> {
    for w in hn.chain.windows(2) {
        if w[0].0.dim() >= w[1].0.dim() || !w[0].0.is_subspace_of(&w[1].0)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn cmd_hn(setup: &Setup) -> Result<Outcome> {
    let spec = setup.raw.hn.clone().unwrap_or_default();
    let mut out = Vec::new();
    let mut verdicts = Vec::new();
    for (fi, (lat, oracle)) in polygons(setup)?.iter().enumerate() {
        let hn = hn_filtration(oracle, lat)?;
        let semistable = is_semistable(oracle, lat)?;
        let nested = is_nested(&hn)?;
        verdicts.push(Verdict::new(format!("flow {fi} chain nested"), nested, format!("dims {:?}", hn.dims())));
        if let Some(e) = &spec.expect_semistable {
            verdicts.push(Verdict::new(format!("flow {fi} semistable"), e[fi] == semistable, format!("got {semistable}")));
        }
        if let Some(e) = &spec.expect_dims {
            verdicts.push(Verdict::new(format!("flow {fi} dims"), e[fi] == hn.dims(), format!("got {:?}", hn.dims())));
        }
        out.push(json!({
            "flow": setup.flows[fi],
            "lattice_size": lat.len(),
            "semistable": semistable,
            "filtration": hn_json(&hn),
        }));
    }
    Ok((json!({"filtrations": out}), verdicts))
}

/// Unimodular integer flows with entries in [−w, w], the last weight fixing
/// the sum.
fn random_flows(d: usize, count: usize, w: i64, seed: u64) -> Vec<Flow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut ws: Vec<i64> = (0..d - 1).map(|_| rng.gen_range(-w..=w)).collect();
            ws.push(-ws.iter().sum::<i64>());
            Flow::from_i64(&ws)
        })
        .collect()
}

pub fn cmd_sweep(setup: &Setup, ctx: &Ctx) -> Result<Outcome> {
    let spec = setup.raw.sweep.clone().unwrap_or_default();
    let fam = setup.family()?;
    let mut flows = setup.flows.clone();
    flows.extend(random_flows(fam.dim(), spec.random_flows, spec.max_weight, ctx.seed));
    if flows.is_empty() {
        return Err(ConfigError::Invalid("sweep needs flows or sweep.random_flows".into()).into());
    }
    match flow_sweep(&fam, &flows, &setup.recipe) {
        Ok(c) => {
            let records: Vec<Value> = c
                .records
                .iter()
                .map(|r| json!({"flow": r.flow, "dims": r.dims, "slopes": rats_json(&r.slopes)}))
                .collect();
            let size = c.subspaces.len();
            let bound = c.bound.to_string();
            let results = json!({
                "census": c.subspaces.iter().map(subspace_json).collect::<Vec<_>>(),
                "census_size": size,
                "bound": bound,
                "records": records,
            });
            Ok((results, vec![Verdict::new("census within bound", true, format!("{size} ≤ {bound}"))]))
        }
        Err(SlopeError::CensusBound { size, bound }) => Ok((
            json!({"census_size": size, "bound": bound}),
            vec![Verdict::new("census within bound", false, format!("{size} > {bound}"))],
        )),
        Err(e) => Err(e.into()),
    }
}

fn with_chain(hn: &HnFiltration, interior: &[Subspace]) -> Result<HnFiltration> {
    let old = hn.interior();
    if old.len() != interior.len() || old.iter().zip(interior).any(|((v, _), w)| v.dim() != w.dim()) {
        return Err(ConfigError::Invalid(format!(
            "simulate.override_chain must match the predicted interior dims {:?}",
            old.iter().map(|(v, _)| v.dim()).collect::<Vec<_>>()
        ))
        .into());
    }
    let mut out = hn.clone();
    for (slot, w) in out.chain[1..].iter_mut().zip(interior) {
        slot.0 = w.clone();
    }
    Ok(out)
}

pub fn cmd_simulate(setup: &Setup, ctx: &Ctx) -> Result<Outcome> {
    let (spec, sim) = match (&setup.raw.simulate, &setup.sim) {
        (Some(s), Some(m)) => (s, m),
        _ => return Err(missing("simulate").into()),
    };
    let l = setup.single_matrix("simulate")?;
    let fam = MatrixFamily::singleton(l.clone())?;
    let margin = ctx.precision_margin.or(spec.precision_margin).unwrap_or(DEFAULT_MARGIN);
    let mut out = Vec::new();
    let mut verdicts = Vec::new();
    for (fi, a) in setup.require_flows()?.iter().enumerate() {
        let lat = lattice_for(setup, &fam, a)?;
        let mut predicted = hn_filtration(&TauOracle::new(fam.clone(), a.clone())?, &lat)?;
        if let Some(c) = &sim.override_chain {
            predicted = with_chain(&predicted, c)?;
        }
        let mut cfg = SimConfig::new(l.clone(), a.clone(), sim.grid.clone())?;
        cfg.precision_margin_bits = margin;
        let series = simulate(&cfg, &predicted)?;
        let lambda = slopes_to_lambda(&predicted.polygon);

        let residuals: Vec<_> = series.snapshots.iter().map(|s| minkowski_check(s, l, a, &s.t)).collect();
        let worst = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
        let bound = residuals.first().map_or(0.0, |r| r.bound);
        verdicts.push(Verdict::new(
            format!("flow {fi} minkowski"),
            residuals.iter().all(|r| r.ok()),
            format!("max residual {worst:.6} vs {bound:.6}"),
        ));

        let window = spec.window.unwrap_or(series.snapshots.len());
        let estimates = if window >= 2 { Some(estimate_slopes(&series, window)?) } else { None };
        if let (Some(tol), Some(est)) = (spec.slope_tolerance, &estimates) {
            let err = est.iter().zip(&lambda).map(|(e, l)| (e - diagflow::exact::rat::rat_to_f64(l)).abs()).fold(0.0, f64::max);
            verdicts.push(Verdict::new(format!("flow {fi} slopes"), err <= tol, format!("max deviation {err:.6} vs {tol}")));
        }

        let capture = sim.capture_epsilon.as_ref().map(|eps| capture_report(&series, &predicted, eps));
        if let Some(c) = &capture {
            for v in c {
                let detail = match &v.first_violation {
                    Some((t, x)) => format!("violated at t = {} by {:?}", fmt_rat(t), x.iter().map(ToString::to_string).collect::<Vec<_>>()),
                    None => "no violation".to_string(),
                };
                verdicts.push(Verdict::new(format!("flow {fi} capture ell={}", v.ell), v.passed, detail));
            }
        }

        let snapshots: Vec<Value> = series
            .snapshots
            .iter()
            .zip(&residuals)
            .map(|(s, r)| {
                json!({
                    "t": fmt_rat(&s.t),
                    "prec": s.prec,
                    "log_minima": s.log_minima,
                    "log_minima_over_t": s.log_minima_over_t,
                    "in_v": s.in_v,
                    "minkowski_residual": r.residual,
                })
            })
            .collect();
        out.push(json!({
            "flow": a,
            "predicted": hn_json(&predicted),
            "lambda": rats_json(&lambda),
            "capture_times": series.capture_times.iter().map(|t| t.as_ref().map(fmt_rat)).collect::<Vec<_>>(),
            "slope_estimates": estimates,
            "window": window,
            "capture": capture,
            "series": snapshots,
        }));
    }
    Ok((json!({"runs": out, "precision_margin": margin}), verdicts))
}

pub fn cmd_scan(setup: &Setup) -> Result<Outcome> {
    let (Some(spec), Some((eps, height))) = (&setup.raw.scan, &setup.scan) else {
        return Err(missing("scan").into());
    };
    let l = setup.single_matrix("scan")?;
    let fam = MatrixFamily::singleton(l.clone())?;
    if let Some(a) = setup.flows.iter().find(|a| !a.is_unimodular()) {
        return Err(ConfigError::Invalid(format!("scan catalog flow {a:?} does not sum to zero")).into());
    }
    let mut sols = scan_solutions(&ScanConfig::new(l.clone(), eps.clone(), *height)?)?;
    let c = operator_bound(l);
    let mut reductions = Vec::new();
    let mut induced: Vec<Vec<i64>> = Vec::new();
    let (mut failed, mut big_d) = (0usize, 0.0f64);
    for (i, s) in sols.iter().enumerate() {
        match solution_to_flow(&s.x_i64(), l, eps, &c) {
            Ok(f) => {
                if f.aas.holds != Some(true) {
                    failed += 1;
                }
                big_d = big_d.max(f.big_d);
                if !induced.contains(&f.n) {
                    induced.push(f.n.clone());
                }
                reductions.push(json!({"solution": i, "reduction": f}));
            }
            Err(ScanError::TooSmall(_) | ScanError::ZeroForm(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    let mut catalog = setup.flows.clone();
    for n in &induced {
        let a = Flow::from_i64(n);
        if !a.is_constant() && !catalog.contains(&a) {
            catalog.push(a);
        }
    }
    let exceptional = exceptional_subspaces(&fam, eps, &catalog, &setup.recipe)?;
    let class = classify(&mut sols, &exceptional)?;
    let d = l.rows() as i32;
    let bound = (6.0 * big_d).powi(d);
    let mut verdicts = vec![Verdict::new(
        "flow count bound",
        induced.len() as f64 <= bound,
        format!("{} distinct flows vs (6D)^d = {bound:.3}", induced.len()),
    )];
    if spec.require_aas {
        verdicts.push(Verdict::new("aas", failed == 0, format!("{failed} of {} reductions fail", reductions.len())));
    }
    let results = json!({
        "operator_bound": fmt_rat(&c),
        "solutions": sols,
        "reductions": reductions,
        "catalog": catalog,
        "exceptional": exceptional.iter().map(subspace_json).collect::<Vec<_>>(),
        "classification": class,
    });
    Ok((results, verdicts))
}

fn expect(verdicts: &mut Vec<Verdict>, name: &str, want: &Option<String>, got: &str) {
    if let Some(w) = want {
        verdicts.push(Verdict::new(name, w.trim() == got, format!("got {got}, expected {}", w.trim())));
    }
}

pub fn cmd_exponents(setup: &Setup) -> Result<Outcome> {
    let (Some(spec), Some(ex)) = (&setup.raw.exponents, &setup.exponents) else {
        return Err(missing("exponents").into());
    };
    let [m, n] = spec.shape;
    let h = spec.candidate_height;
    let mut verdicts = Vec::new();
    let mut results = serde_json::Map::new();

    let fam = HomFamily::new(ex.samples.clone(), "config")?;
    let cands = height_candidates(n, h);
    let beta = beta_formula(&fam, &cands)?;
    expect(&mut verdicts, "beta", &spec.expect_beta, &beta.value.to_string());
    results.insert(
        "beta".into(),
        json!({"value": beta.value, "argmax": subspace_json(&cands[beta.argmax]), "dim": beta.dim, "rank": beta.rank, "candidates": cands.len()}),
    );

    if let Some(alphas) = &ex.alphas {
        let qn = QuasiNorm::standard(alphas.clone())?;
        let ba = beta_alpha_formula(&fam, &cands, &qn)?;
        expect(&mut verdicts, "beta_alpha", &spec.expect_beta_alpha, &ba.value.to_string());
        results.insert("beta_alpha".into(), json!({"value": ba.value, "argmax": subspace_json(&cands[ba.argmax])}));
    }

    if spec.omega {
        let pc = height_candidates(m + n, h);
        let o = omega_formula(&ex.samples, &pc)?;
        let holds = certificate_holds(&ex.samples, &pc, &o.certificate)?;
        verdicts.push(Verdict::new("omega certificate", holds, format!("checked {} certificates", o.certificates_checked)));
        expect(&mut verdicts, "omega", &spec.expect_omega, &o.value.to_string());
        let w = &pc[o.certificate.w];
        let mut entry = json!({
            "value": o.value,
            "certificate": o.certificate,
            "w": subspace_json(w),
            "certificates_checked": o.certificates_checked,
        });
        if let Some(q) = &ex.witness_q {
            let c = &o.certificate;
            let wit = dirichlet_witness(&ex.samples[0], w, &c.i, &c.j, q)?;
            entry["witness"] = serde_json::to_value(wit)?;
        }
        results.insert("omega".into(), entry);
    }

    if let Some([bn, bm]) = spec.bridge {
        let fam = setup.family()?;
        let a = &setup.require_flows()?[0];
        let lat = lattice_for(setup, &fam, a)?;
        let p: GraysonPolygon = grayson_polygon(&TauOracle::new(fam.clone(), a.clone())?, &lat)?;
        let b = gamma_bridge(&p, bn, bm)?;
        expect(&mut verdicts, "bridge", &spec.expect_bridge, &fmt_rat(&b));
        results.insert("bridge".into(), json!({"n": bn, "m": bm, "polygon": p, "beta": fmt_rat(&b)}));
    }
    Ok((Value::Object(results), verdicts))
}

/// Acceptance suite (when enabled) followed by every command whose section
/// the config carries; verdicts are prefixed with their source.
pub fn cmd_verify(setup: &Setup, ctx: &Ctx) -> Result<Outcome> {
    let run_acceptance = setup.raw.verify.as_ref().is_some_and(|v| v.acceptance);
    let raw = &setup.raw;
    let present: Vec<&str> = [
        ("tau", raw.tau.is_some()),
        ("polygon", raw.polygon.is_some()),
        ("hn", raw.hn.is_some()),
        ("sweep", raw.sweep.is_some()),
        ("simulate", raw.simulate.is_some()),
        ("scan", raw.scan.is_some()),
        ("exponents", raw.exponents.is_some()),
    ]
    .into_iter()
    .filter_map(|(c, p)| p.then_some(c))
    .collect();
    if !run_acceptance && present.is_empty() {
        return Err(ConfigError::Invalid("nothing to verify: no command sections and acceptance disabled".into()).into());
    }
    let mut results = serde_json::Map::new();
    let mut verdicts = Vec::new();
    if run_acceptance {
        let rows = diagflow::acceptance::run_all(ctx.seed);
        for r in &rows {
            eprintln!("{r}");
            verdicts.push(Verdict::new(format!("acceptance/{} {}", r.id, r.name), r.passed, r.detail.clone()));
        }
        let table: Vec<Value> = rows.iter().map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed})).collect();
        results.insert("acceptance".into(), Value::Array(table));
    }
    for c in present {
        let start = Instant::now();
        let (res, vs) = run(c, setup, ctx).map_err(|e| e.context(format!("verify {c}")))?;
        for v in &vs {
            eprintln!("[{}] {c}/{}  {}", if v.passed { "PASS" } else { "FAIL" }, v.check, v.detail);
        }
        eprintln!("{c} finished in {:.2}s", start.elapsed().as_secs_f64());
        verdicts.extend(vs.into_iter().map(|v| Verdict { check: format!("{c}/{}", v.check), ..v }));
        results.insert(c.into(), res);
    }
    Ok((Value::Object(results), verdicts))
}
