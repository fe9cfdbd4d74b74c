//! Command line surface of monocurv: scalar curvature reports, simplex
//! grids of `S¹`, conjecture scans and individual curvature quantities.
//!
//! Exit codes: 0 success, 2 invalid input, 3 failed cross-check, 4
//! conjecture violation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod input;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use monocurv_core::mcfun::MetricKind;
use monocurv_core::scalar::EvaluationPath;

use crate::commands::conjecture::conjecture_report;
use crate::commands::curvature::{curvature_values, Quantity};
use crate::commands::grid::{simplex_grid, write_csv};
use crate::commands::scalar::{render_text, scalar_report, ScalarInput};
use crate::config::{parse_metric, OutputFormat, RunConfig};
pub use crate::error::{Error, Result};
use crate::input::{parse_spectrum, read_state, read_vectors};

#[derive(Debug, Parser)]
#[command(
    name = "monocurv",
    version,
    about = "Scalar curvature of monotone metrics on quantum state spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar curvature S and S¹ at a state or spectrum.
    Scalar(ScalarArgs),
    /// CSV of S¹ over a barycentric grid of the 3-level simplex.
    SimplexGrid(GridArgs),
    /// Monotonicity and concavity scans for the Kubo-Mori metric.
    Conjecture(ConjectureArgs),
    /// Metric, Christoffel symbols, Riemann tensor or sectional curvature.
    Curvature(CurvatureArgs),
}

fn metric_arg(s: &str) -> std::result::Result<MetricKind, String> {
    parse_metric(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Theorem1,
    ClosedForm,
    Companion,
    Oracle,
}

impl From<PathArg> for EvaluationPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Theorem1 => EvaluationPath::Theorem1,
            PathArg::ClosedForm => EvaluationPath::ClosedForm,
            PathArg::Companion => EvaluationPath::Companion,
            PathArg::Oracle => EvaluationPath::Oracle,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScalarArgs {
    #[arg(long, value_parser = metric_arg, default_value = "kubo-mori")]
    pub metric: MetricKind,
    /// Comma separated eigenvalues; fractions such as 1/3 are exact.
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "state",
        required_unless_present = "state"
    )]
    pub spectrum: Option<String>,
    /// JSON file holding a density matrix or a spectrum array.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "theorem1")]
    pub path: PathArg,
    /// Relative tolerance of the cross-check.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_parser = metric_arg, default_value = "kubo-mori")]
    pub metric: MetricKind,
    #[arg(long, default_value_t = 100)]
    pub mesh: usize,
    /// Smallest coordinate kept on the grid.
    #[arg(long, default_value_t = 1e-3)]
    pub margin: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sets every sample count at once (concavity, derivative inequalities, paths, grid size).
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub concavity_trials: Option<u64>,
    #[arg(long)]
    pub lemma4_trials: Option<u64>,
    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
    /// Dimension of the monotonicity scan.
    #[arg(long)]
    pub dimension: Option<usize>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    /// Omit the wall time and timestamp so reruns are byte identical.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long, value_parser = metric_arg, default_value = "kubo-mori")]
    pub metric: MetricKind,
    #[arg(long)]
    pub state: PathBuf,
    /// JSON array of matrices; the string "rho" stands for the state.
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Use the curvature of the unit-trace submanifold.
    #[arg(long)]
    pub normalized: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl ConjectureArgs {
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        c.metric = MetricKind::KuboMori;
        if let Some(t) = self.trials {
            let side = usize::try_from(t)
                .map_err(|_| Error::Input(format!("trial count {t} too large")))?;
            c.trials.concavity = t;
            c.trials.lemma4 = t;
            c.trials.paths = t;
            c.trials.grid = side.min(c.trials.grid);
        }
        let t = &mut c.trials;
        t.concavity = self.concavity_trials.unwrap_or(t.concavity);
        t.lemma4 = self.lemma4_trials.unwrap_or(t.lemma4);
        t.paths = self.paths.unwrap_or(t.paths);
        t.steps = self.steps.unwrap_or(t.steps);
        t.grid = self.grid.unwrap_or(t.grid);
        c.seed = self.seed.unwrap_or(c.seed);
        c.dimension = self.dimension.unwrap_or(c.dimension);
        c.region.lo = self.lo.unwrap_or(c.region.lo);
        c.region.hi = self.hi.unwrap_or(c.region.hi);
        c.deterministic |= self.deterministic;
        if self.output.is_some() {
            c.output = self.output.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Caps the rayon pool at `MONOCURV_THREADS` workers when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("MONOCURV_THREADS") {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                Error::Input(format!(
                    "MONOCURV_THREADS must be a positive integer, got `{value}`"
                ))
            })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Input(e.to_string()))?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Scalar(a) => {
            let mut config = RunConfig {
                metric: a.metric,
                format: a.format,
                output: a.output.clone(),
                ..RunConfig::default()
            };
            if let Some(t) = a.tolerance {
                config.tolerances.cross_check = t;
                config.tolerances.oracle = t;
            }
            config.validate()?;
            let input = match (&a.spectrum, &a.state) {
                (Some(s), _) => ScalarInput::Spectrum(parse_spectrum(s)?),
                (None, Some(p)) => ScalarInput::State(read_state(p)?),
                (None, None) => return Err(Error::Input("give --spectrum or --state".into())),
            };
            let out = scalar_report(&config, &input, a.path.into())?;
            let text = match config.format {
                OutputFormat::Json => serde_json::to_string_pretty(&out)? + "\n",
                OutputFormat::Text => render_text(&out),
            };
            emit(config.output.as_deref(), &text)
        }
        Command::SimplexGrid(a) => {
            let rows = simplex_grid(a.metric, a.mesh, a.margin)?;
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            emit(
                a.output.as_deref(),
                &String::from_utf8(buf).expect("csv output is utf-8"),
            )
        }
        Command::Conjecture(a) => {
            let config = a.to_config()?;
            let report = conjecture_report(&config)?;
            emit(
                config.output.as_deref(),
                &(serde_json::to_string_pretty(&report)? + "\n"),
            )?;
            if report.violations.is_empty() {
                Ok(())
            } else {
                Err(Error::Violation(report.violations.join(", ")))
            }
        }
        Command::Curvature(a) => {
            let rho = read_state(&a.state)?;
            let vectors = read_vectors(&a.vectors, &rho)?;
            let out = curvature_values(a.metric, &rho, &vectors, a.quantity, a.normalized)?;
            emit(
                a.output.as_deref(),
                &(serde_json::to_string_pretty(&out)? + "\n"),
            )
        }
    }
}
