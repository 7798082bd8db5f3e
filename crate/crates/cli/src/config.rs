//! TOML run configuration, parsed and validated into exact objects before
//! any command runs.

use std::path::PathBuf;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use diagflow::exact::literal::parse_scalar;
use diagflow::exact::rat::parse_rat;
use diagflow::exact::{Mat, NumberField, Rat, Scalar, Subspace};
use diagflow::slopes::sweep::CandidateRecipe;
use diagflow::slopes::{Flow, MatrixFamily};

/// Grid points allowed in one simulation.
pub const MAX_GRID_POINTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config")]
    Toml(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// A scalar literal: a TOML integer or a string such as "3/4" or "1 + s".
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Text(String),
}

impl Literal {
    pub fn text(&self) -> String {
        match self {
            Literal::Int(n) => n.to_string(),
            Literal::Text(s) => s.clone(),
        }
    }

    fn rat(&self, what: &str) -> Result<Rat, ConfigError> {
        parse_rat(self.text().trim()).map_err(|e| invalid(format!("{what}: {e}")))
    }

    fn scalar(&self, field: Option<&Arc<NumberField>>, what: &str) -> Result<Scalar, ConfigError> {
        parse_scalar(&self.text(), field).map_err(|e| invalid(format!("{what}: {e}")))
    }
}

pub type Rows = Vec<Vec<Literal>>;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub dimension: Option<usize>,
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub matrices: Vec<Rows>,
    #[serde(default)]
    pub flows: Vec<Vec<Literal>>,
    pub candidates: Option<CandidateSpec>,
    pub tau: Option<TauSpec>,
    pub polygon: Option<PolygonSpec>,
    pub hn: Option<HnSpec>,
    pub sweep: Option<SweepSpec>,
    pub simulate: Option<SimulateSpec>,
    pub scan: Option<ScanSpec>,
    pub exponents: Option<ExponentSpec>,
    pub verify: Option<VerifySpec>,
    pub output: Option<OutputSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// Monic minimal polynomial, constant term first.
    pub minpoly: Vec<Literal>,
    pub interval: [Literal; 2],
    pub symbol: String,
    #[serde(default)]
    pub irreducible: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSpec {
    #[serde(default)]
    pub generators: Vec<Rows>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "yes")]
    pub rational_only: bool,
}

fn default_rounds() -> usize {
    6
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauSpec {
    pub subspaces: Vec<Rows>,
    /// Family values, flow-major: one per (flow, subspace).
    pub expect: Option<Vec<Literal>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonSpec {
    /// Segment slopes, one list per flow.
    pub expect_slopes: Option<Vec<Vec<Literal>>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HnSpec {
    pub expect_semistable: Option<Vec<bool>>,
    /// Chain dimensions 0, …, d, one list per flow.
    pub expect_dims: Option<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Extra unimodular integer flows drawn from the seed.
    #[serde(default)]
    pub random_flows: usize,
    #[serde(default = "default_max_weight")]
    pub max_weight: i64,
}

fn default_max_weight() -> i64 {
    3
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: Literal,
    pub stop: Literal,
    pub step: Literal,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub t_grid: GridSpec,
    pub capture_epsilon: Option<Literal>,
    pub window: Option<usize>,
    pub precision_margin: Option<u32>,
    pub slope_tolerance: Option<f64>,
    /// Replaces the interior of the predicted chain, for falsification runs.
    pub override_chain: Option<Vec<Rows>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub epsilon: Literal,
    pub height: u64,
    #[serde(default = "yes")]
    pub require_aas: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    /// (m, n): samples are m×n.
    pub shape: [usize; 2],
    pub samples: Vec<Rows>,
    pub candidate_height: i64,
    #[serde(default)]
    pub omega: bool,
    pub alphas: Option<Vec<Literal>>,
    /// Q for a Dirichlet witness of the ω certificate.
    pub witness_q: Option<Literal>,
    /// (n, m) for the polygon bridge, using the first matrix and flow.
    pub bridge: Option<[usize; 2]>,
    pub expect_beta: Option<String>,
    pub expect_omega: Option<String>,
    pub expect_beta_alpha: Option<String>,
    pub expect_bridge: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    #[serde(default = "yes")]
    pub acceptance: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

/// Validated configuration with every literal parsed.
#[derive(Clone, Debug)]
pub struct Setup {
    pub raw: RunConfig,
    pub dim: Option<usize>,
    pub field: Option<Arc<NumberField>>,
    pub matrices: Vec<Mat>,
    pub flows: Vec<Flow>,
    pub recipe: CandidateRecipe,
    pub tau_subspaces: Vec<Subspace>,
    pub tau_expect: Option<Vec<Rat>>,
    pub polygon_expect: Option<Vec<Vec<Rat>>>,
    pub sim: Option<SimSetup>,
    pub scan: Option<(Rat, u64)>,
    pub exponents: Option<ExpSetup>,
}

#[derive(Clone, Debug)]
pub struct SimSetup {
    pub grid: Vec<Rat>,
    pub capture_epsilon: Option<Rat>,
    pub override_chain: Option<Vec<Subspace>>,
}

#[derive(Clone, Debug)]
pub struct ExpSetup {
    pub samples: Vec<Mat>,
    pub alphas: Option<Vec<Rat>>,
    pub witness_q: Option<Rat>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<(RunConfig, String), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Ok((RunConfig::parse(&text)?, text))
    }

    fn has_target(&self) -> bool {
        !self.matrices.is_empty()
            || !self.flows.is_empty()
            || self.tau.is_some()
            || self.polygon.is_some()
            || self.hn.is_some()
            || self.sweep.is_some()
            || self.simulate.is_some()
            || self.scan.is_some()
            || self.exponents.is_some()
            || self.verify.is_some()
    }
}

fn parse_field(spec: &FieldSpec) -> Result<Arc<NumberField>, ConfigError> {
    let coeffs = spec.minpoly.iter().map(|c| c.rat("field.minpoly")).collect::<Result<Vec<_>, _>>()?;
    let lo = spec.interval[0].rat("field.interval")?;
    let hi = spec.interval[1].rat("field.interval")?;
    NumberField::new(coeffs, lo, hi, &spec.symbol, spec.irreducible).map_err(|e| invalid(format!("field: {e}")))
}

fn parse_rows(rows: &Rows, field: Option<&Arc<NumberField>>, what: &str) -> Result<Vec<Vec<Scalar>>, ConfigError> {
    rows.iter().map(|r| r.iter().map(|x| x.scalar(field, what)).collect()).collect()
}

fn parse_matrix(rows: &Rows, field: Option<&Arc<NumberField>>, what: &str) -> Result<Mat, ConfigError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(invalid(format!("{what}: rows must be nonempty and of equal length")));
    }
    Mat::from_rows(parse_rows(rows, field, what)?).map_err(|e| invalid(format!("{what}: {e}")))
}

fn parse_subspace(rows: &Rows, d: usize, field: Option<&Arc<NumberField>>, what: &str) -> Result<Subspace, ConfigError> {
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(invalid(format!("{what}: row of length {} in dimension {d}", r.len())));
    }
    Subspace::from_rows(d, parse_rows(rows, field, what)?).map_err(|e| invalid(format!("{what}: {e}")))
}

fn parse_grid(g: &GridSpec) -> Result<Vec<Rat>, ConfigError> {
    let (start, stop, step) = (g.start.rat("t_grid.start")?, g.stop.rat("t_grid.stop")?, g.step.rat("t_grid.step")?);
    if step <= Rat::from_integer(0.into()) || stop < start {
        return Err(invalid("t_grid needs step > 0 and stop ≥ start"));
    }
    let mut out = Vec::new();
    let mut t = start;
    while t <= stop {
        if out.len() == MAX_GRID_POINTS {
            return Err(invalid(format!("t_grid exceeds {MAX_GRID_POINTS} points")));
        }
        out.push(t.clone());
        t += &step;
    }
    Ok(out)
}

impl Setup {
    pub fn from_config(raw: RunConfig) -> Result<Setup, ConfigError> {
        if !raw.has_target() {
            return Err(invalid("config names no matrices, flows or command sections"));
        }
        let field = raw.field.as_ref().map(parse_field).transpose()?;
        let f = field.as_ref();
        let matrices = raw
            .matrices
            .iter()
            .enumerate()
            .map(|(i, m)| parse_matrix(m, f, &format!("matrices[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let flows = raw
            .flows
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let ws = w.iter().map(|x| x.rat(&format!("flows[{i}]"))).collect::<Result<Vec<_>, _>>()?;
                Flow::new(ws).map_err(|e| invalid(format!("flows[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let dim = raw.dimension.or(matrices.first().map(Mat::rows)).or(flows.first().map(Flow::dim));
        if let Some(d) = dim {
            if d == 0 {
                return Err(invalid("dimension must be positive"));
            }
            for (i, m) in matrices.iter().enumerate() {
                if m.rows() != d || m.cols() != d {
                    return Err(invalid(format!("matrices[{i}] is {}×{}, dimension is {d}", m.rows(), m.cols())));
                }
                if m.det().map_err(|e| invalid(e.to_string()))?.is_zero() {
                    return Err(invalid(format!("matrices[{i}] is singular")));
                }
            }
            for (i, a) in flows.iter().enumerate() {
                if a.dim() != d {
                    return Err(invalid(format!("flows[{i}] has {} weights, dimension is {d}", a.dim())));
                }
            }
        }
        if !matrices.is_empty() {
            MatrixFamily::new(matrices.clone(), "config").map_err(|e| invalid(format!("matrices: {e}")))?;
        }
        let need_dim = |what: &str| dim.ok_or_else(|| invalid(format!("{what} needs a dimension, matrices or flows")));

        let mut recipe = CandidateRecipe::default();
        if let Some(c) = &raw.candidates {
            let d = need_dim("[candidates]")?;
            recipe.rounds = c.rounds;
            recipe.rational_only = c.rational_only;
            recipe.extra = c
                .generators
                .iter()
                .enumerate()
                .map(|(i, g)| parse_subspace(g, d, f, &format!("candidates.generators[{i}]")))
                .collect::<Result<_, _>>()?;
        }

        let (mut tau_subspaces, mut tau_expect) = (Vec::new(), None);
        if let Some(t) = &raw.tau {
            let d = need_dim("[tau]")?;
            tau_subspaces = t
                .subspaces
                .iter()
                .enumerate()
                .map(|(i, s)| parse_subspace(s, d, f, &format!("tau.subspaces[{i}]")))
                .collect::<Result<_, _>>()?;
            if let Some(e) = &t.expect {
                if e.len() != flows.len() * tau_subspaces.len() {
                    return Err(invalid(format!(
                        "tau.expect has {} values, expected {} flows × {} subspaces",
                        e.len(),
                        flows.len(),
                        tau_subspaces.len()
                    )));
                }
                tau_expect = Some(e.iter().map(|x| x.rat("tau.expect")).collect::<Result<_, _>>()?);
            }
        }

        let mut polygon_expect = None;
        if let Some(PolygonSpec { expect_slopes: Some(e) }) = &raw.polygon {
            if e.len() != flows.len() {
                return Err(invalid("polygon.expect_slopes needs one list per flow"));
            }
            polygon_expect = Some(
                e.iter().map(|s| s.iter().map(|x| x.rat("polygon.expect_slopes")).collect()).collect::<Result<_, _>>()?,
            );
        }
        if let Some(h) = &raw.hn {
            if h.expect_semistable.as_ref().is_some_and(|v| v.len() != flows.len())
                || h.expect_dims.as_ref().is_some_and(|v| v.len() != flows.len())
            {
                return Err(invalid("hn expectations need one entry per flow"));
            }
        }
        if let Some(s) = &raw.sweep {
            if s.max_weight < 1 {
                return Err(invalid("sweep.max_weight must be at least 1"));
            }
        }

        let sim = match &raw.simulate {
            None => None,
            Some(s) => {
                let d = need_dim("[simulate]")?;
                let grid = parse_grid(&s.t_grid)?;
                if grid[0] <= Rat::from_integer(0.into()) {
                    return Err(invalid("t_grid must start above 0"));
                }
                if let Some(w) = s.window {
                    if w < 2 || w > grid.len() {
                        return Err(invalid(format!("simulate.window {w} outside 2..={}", grid.len())));
                    }
                }
                let capture_epsilon = s.capture_epsilon.as_ref().map(|e| e.rat("simulate.capture_epsilon")).transpose()?;
                if capture_epsilon.as_ref().is_some_and(|e| *e <= Rat::from_integer(0.into())) {
                    return Err(invalid("simulate.capture_epsilon must be positive"));
                }
                let override_chain = s
                    .override_chain
                    .as_ref()
                    .map(|c| {
                        c.iter()
                            .enumerate()
                            .map(|(i, v)| parse_subspace(v, d, f, &format!("simulate.override_chain[{i}]")))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?;
                Some(SimSetup { grid, capture_epsilon, override_chain })
            }
        };

        let scan = match &raw.scan {
            None => None,
            Some(s) => {
                let eps = s.epsilon.rat("scan.epsilon")?;
                if eps <= Rat::from_integer(0.into()) {
                    return Err(invalid("scan.epsilon must be positive"));
                }
                if s.height == 0 {
                    return Err(invalid("scan.height must be positive"));
                }
                Some((eps, s.height))
            }
        };

        let exponents = match &raw.exponents {
            None => None,
            Some(e) => {
                let [m, n] = e.shape;
                if m == 0 || n == 0 || e.samples.is_empty() {
                    return Err(invalid("exponents needs a positive shape and at least one sample"));
                }
                if e.candidate_height < 1 {
                    return Err(invalid("exponents.candidate_height must be at least 1"));
                }
                let samples = e
                    .samples
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let y = parse_matrix(s, f, &format!("exponents.samples[{i}]"))?;
                        if (y.rows(), y.cols()) != (m, n) {
                            return Err(invalid(format!("exponents.samples[{i}] is {}×{}, shape is {m}×{n}", y.rows(), y.cols())));
                        }
                        Ok(y)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let alphas = e
                    .alphas
                    .as_ref()
                    .map(|a| {
                        if a.len() != n {
                            return Err(invalid(format!("exponents.alphas needs {n} values")));
                        }
                        a.iter().map(|x| x.rat("exponents.alphas")).collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?;
                let witness_q = e.witness_q.as_ref().map(|q| q.rat("exponents.witness_q")).transpose()?;
                if let Some([bn, bm]) = e.bridge {
                    if dim != Some(bn + bm) || matrices.is_empty() || flows.is_empty() {
                        return Err(invalid("exponents.bridge needs a matrix and a flow in dimension n + m"));
                    }
                }
                Some(ExpSetup { samples, alphas, witness_q })
            }
        };

        Ok(Setup {
            raw,
            dim,
            field,
            matrices,
            flows,
            recipe,
            tau_subspaces,
            tau_expect,
            polygon_expect,
            sim,
            scan,
            exponents,
        })
    }

    pub fn family(&self) -> Result<MatrixFamily, ConfigError> {
        if self.matrices.is_empty() {
            return Err(invalid("no matrices given"));
        }
        MatrixFamily::new(self.matrices.clone(), "config").map_err(|e| invalid(e.to_string()))
    }

    pub fn require_flows(&self) -> Result<&[Flow], ConfigError> {
        if self.flows.is_empty() {
            return Err(invalid("no flows given"));
        }
        Ok(&self.flows)
    }

    pub fn single_matrix(&self, what: &str) -> Result<&Mat, ConfigError> {
        match self.matrices.as_slice() {
            [l] => Ok(l),
            _ => Err(invalid(format!("{what} needs exactly one matrix, got {}", self.matrices.len()))),
        }
    }
}

pub fn missing(section: &str) -> ConfigError {
    invalid(format!("config has no [{section}] section"))
}
