use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};

use diagflow_cli::commands::{self, Ctx};
use diagflow_cli::config::{ConfigError, Format, RunConfig, Setup};
use diagflow_cli::report::{Inputs, Report};

/// Environment variable holding the default worker count.
const THREADS_ENV: &str = "DIAGFLOW_THREADS";

#[derive(Parser, Debug)]
#[command(name = "diagflow", version, about = "Slopes, HN filtrations and lattice flows from a run config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; overrides DIAGFLOW_THREADS.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    precision_margin: Option<u32>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// τ of the listed subspaces by both formulas
    Tau,
    /// Grayson polygon per flow
    Polygon,
    /// HN filtration, semistability and Λ per flow
    Hn,
    /// Census of HN subspaces over many flows
    Sweep,
    /// Successive minima along the flow, capture and Minkowski checks
    Simulate,
    /// Integer solutions of the product inequality and their flows
    Scan,
    /// β, ω and β_α with certificates
    Exponents,
    /// Acceptance suite plus every command the config carries
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Tau => "tau",
            Command::Polygon => "polygon",
            Command::Hn => "hn",
            Command::Sweep => "sweep",
            Command::Simulate => "simulate",
            Command::Scan => "scan",
            Command::Exponents => "exponents",
            Command::Verify => "verify",
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let path = cli.config.as_ref().ok_or_else(|| ConfigError::Invalid("--config is required".into()))?;
    let (raw, text) = RunConfig::load(path)?;
    let seed = cli.seed.or(raw.seed).unwrap_or(0);
    let output = raw.output.clone().unwrap_or_default();
    let format = cli.format.or(output.format).unwrap_or(Format::Json);
    let out = cli.out.clone().or(output.path);
    let setup = Setup::from_config(raw)?;

    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError::Invalid("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("thread pool")?;
    }

    let name = cli.command.name();
    let ctx = Ctx { seed, precision_margin: cli.precision_margin };
    let (results, verdicts) = commands::run(name, &setup, &ctx)?;
    let inputs = Inputs { config: text, seed, precision_margin: cli.precision_margin };
    let report = Report::new(name, inputs, results, verdicts);
    let rendered = report.render(format)?;
    match out {
        Some(p) => std::fs::write(&p, rendered).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{rendered}"),
    }
    for v in report.verdicts.iter().filter(|v| !v.passed) {
        eprintln!("FAIL {}: {}", v.check, v.detail);
    }
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    };
    eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
    code
}
