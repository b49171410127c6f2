//! The `run` subcommand: execute the sweep and write results.csv,
//! metrics.json and manifest.json atomically into the output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use ambisec_core::experiment::SweepPointReport;
use ambisec_core::{run_sweep, MetricsReport, PriorMode, SolverKind, SweepAxis};

use crate::config::{self, Manifest, ManifestOutputs};
use crate::{AppError, AppResult};

/// Newtype wrappers so clap can parse the core enums from flag text.
#[derive(Debug, Clone, Copy)]
pub struct SweepAxisArg(pub SweepAxis);

impl std::str::FromStr for SweepAxisArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        config::parse_axis(s).map(SweepAxisArg)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverArg(pub SolverKind);

impl std::str::FromStr for SolverArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolverKind::parse(s)
            .map(SolverArg)
            .ok_or_else(|| format!("unknown solver `{s}`"))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PriorModeArg(pub PriorMode);

impl std::str::FromStr for PriorModeArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        config::parse_prior_mode(s).map(PriorModeArg)
    }
}

#[derive(Args)]
pub struct RunArgs {
    /// Config file: flat `key = value` text, or a manifest.json from an
    /// earlier run. Flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of targets (one defender each).
    #[arg(long)]
    pub targets: Option<usize>,
    /// Total agent count; a comma list sweeps it.
    #[arg(long, value_delimiter = ',')]
    pub agents: Option<Vec<usize>>,
    /// Number of agent types; a comma list sweeps it.
    #[arg(long, value_delimiter = ',')]
    pub types: Option<Vec<usize>>,
    /// Number of tolerance thresholds in the strategy grid; a comma list
    /// sweeps it.
    #[arg(long, value_delimiter = ',')]
    pub strategies: Option<Vec<usize>>,
    /// Optimism weight in [0,1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Trials per sweep point.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Master seed; the whole result set is a pure function of it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sweep axis (agents, strategies, types); inferred when exactly one
    /// axis has a value list.
    #[arg(long)]
    pub sweep: Option<SweepAxisArg>,
    /// Solvers to run (ceu, dempster_shafer, uniform_random).
    #[arg(long, value_delimiter = ',')]
    pub solvers: Option<Vec<SolverArg>>,
    /// Prior mode: uniform, or point_mass:<type index>.
    #[arg(long)]
    pub prior_mode: Option<PriorModeArg>,
    /// Absolute tolerance for calling a detection true.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Per-unit-ability payoff.
    #[arg(long)]
    pub payoff_base: Option<f64>,
    /// Per-type payoff factors, comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    pub type_factors: Option<Vec<f64>>,
    /// Output directory (default `results`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_run(args: RunArgs) -> AppResult<()> {
    let plan = config::resolve(&args)?;
    let report = run_sweep(&plan.scenario, plan.axis, &plan.values)
        .map_err(|e| AppError::Usage(e.to_string()))?;

    std::fs::create_dir_all(&plan.out)
        .map_err(|e| AppError::io(&format!("creating {}", plan.out.display()), e))?;
    let results_csv = plan.out.join("results.csv");
    let metrics_json = plan.out.join("metrics.json");
    let manifest_json = plan.out.join("manifest.json");

    write_atomic(&results_csv, render_csv(&report, plan.axis).as_bytes())?;
    write_atomic(&metrics_json, &render_metrics(&report)?)?;
    let manifest = Manifest {
        tool: "ambisec".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        plan: plan.clone(),
        outputs: ManifestOutputs {
            results_csv: results_csv.clone(),
            metrics_json,
        },
    };
    let manifest_bytes = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| AppError::Io(format!("encoding manifest: {e}")))?;
    write_atomic(&manifest_json, &manifest_bytes)?;

    println!(
        "wrote {} rows ({} sweep over {:?}, {} runs, {} solvers) to {}",
        report.rows.len(),
        plan.axis,
        plan.values,
        plan.scenario.runs,
        plan.scenario.solvers.len(),
        plan.out.display()
    );
    Ok(())
}

/// Floats carry nine significant digits so a re-parse roundtrips exactly at
/// that precision; absent values are empty fields.
fn fmt_float(value: f64) -> String {
    format!("{value:.8e}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt_float).unwrap_or_default()
}

fn render_csv(report: &MetricsReport, axis: SweepAxis) -> String {
    let mut out = String::new();
    out.push_str("solver,sweep_axis,sweep_value,run,true_detections,sensitivity,nrmse,defender_payoff_mean\n");
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.solver,
            axis,
            row.sweep_value,
            row.run,
            row.true_detections,
            fmt_opt(row.sensitivity),
            fmt_opt(row.nrmse),
            fmt_float(row.defender_payoff_mean),
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// metrics.json holds the per-point aggregates; per-run data lives in the CSV.
#[derive(Serialize)]
struct MetricsDoc<'a> {
    axis: SweepAxis,
    points: &'a [SweepPointReport],
}

fn render_metrics(report: &MetricsReport) -> AppResult<Vec<u8>> {
    serde_json::to_vec_pretty(&MetricsDoc {
        axis: report.axis,
        points: &report.points,
    })
    .map_err(|e| AppError::Io(format!("encoding metrics: {e}")))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> AppResult<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| AppError::io(&format!("writing {}", tmp.display()), e))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| AppError::io(&format!("renaming into {}", path.display()), e))
}
