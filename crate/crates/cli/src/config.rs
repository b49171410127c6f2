//! Experiment configuration: defaults, then the config file (flat key=value
//! text or a previously written manifest.json), then command-line flags.
//! Later layers win per field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ambisec_core::{PriorMode, ScenarioConfig, SolverKind, SweepAxis};

use crate::run::RunArgs;
use crate::{AppError, AppResult};

/// A fully resolved run: the scenario template, the sweep, and where the
/// output goes. The sweep axis value inside `scenario` is a placeholder; it
/// is overridden per sweep point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunPlan {
    pub scenario: ScenarioConfig,
    pub axis: SweepAxis,
    pub values: Vec<usize>,
    pub out: PathBuf,
}

/// Manifest written next to every result set; feeding it back through
/// `--config` reproduces the run.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub created_unix: u64,
    pub plan: RunPlan,
    pub outputs: ManifestOutputs,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestOutputs {
    pub results_csv: PathBuf,
    pub metrics_json: PathBuf,
}

/// Accumulated settings before sweep inference.
#[derive(Debug, Default, Clone)]
struct Settings {
    targets: Option<usize>,
    agents: Option<Vec<usize>>,
    types: Option<Vec<usize>>,
    strategies: Option<Vec<usize>>,
    alpha: Option<f64>,
    runs: Option<usize>,
    seed: Option<u64>,
    sweep: Option<SweepAxis>,
    solvers: Option<Vec<SolverKind>>,
    prior_mode: Option<PriorMode>,
    epsilon: Option<f64>,
    payoff_base: Option<f64>,
    type_factors: Option<Vec<f64>>,
    out: Option<PathBuf>,
}

pub fn resolve(args: &RunArgs) -> AppResult<RunPlan> {
    let mut settings = Settings::default();
    if let Some(path) = &args.config {
        apply_config_file(&mut settings, path)?;
    }
    apply_flags(&mut settings, args);
    finalize(settings)
}

fn apply_flags(settings: &mut Settings, args: &RunArgs) {
    if let Some(v) = args.targets {
        settings.targets = Some(v);
    }
    if let Some(v) = &args.agents {
        settings.agents = Some(v.clone());
    }
    if let Some(v) = &args.types {
        settings.types = Some(v.clone());
    }
    if let Some(v) = &args.strategies {
        settings.strategies = Some(v.clone());
    }
    if let Some(v) = args.alpha {
        settings.alpha = Some(v);
    }
    if let Some(v) = args.runs {
        settings.runs = Some(v);
    }
    if let Some(v) = args.seed {
        settings.seed = Some(v);
    }
    if let Some(v) = args.sweep {
        settings.sweep = Some(v.0);
    }
    if let Some(v) = &args.solvers {
        settings.solvers = Some(v.iter().map(|s| s.0).collect());
    }
    if let Some(v) = &args.prior_mode {
        settings.prior_mode = Some(v.0);
    }
    if let Some(v) = args.epsilon {
        settings.epsilon = Some(v);
    }
    if let Some(v) = args.payoff_base {
        settings.payoff_base = Some(v);
    }
    if let Some(v) = &args.type_factors {
        settings.type_factors = Some(v.clone());
    }
    if let Some(v) = &args.out {
        settings.out = Some(v.clone());
    }
}

fn apply_config_file(settings: &mut Settings, path: &Path) -> AppResult<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?;
        apply_plan(settings, manifest.plan);
        return Ok(());
    }
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            AppError::Usage(format!(
                "{}:{line_no}: expected `key = value`, got `{line}`",
                path.display()
            ))
        })?;
        apply_key(settings, key.trim(), value.trim())
            .map_err(|msg| AppError::Usage(format!("{}:{line_no}: {msg}", path.display())))?;
    }
    Ok(())
}

fn apply_plan(settings: &mut Settings, plan: RunPlan) {
    let s = plan.scenario;
    settings.targets = Some(s.n_targets);
    settings.alpha = Some(s.alpha);
    settings.runs = Some(s.runs);
    settings.seed = Some(s.master_seed);
    settings.solvers = Some(s.solvers);
    settings.prior_mode = Some(s.prior_mode);
    settings.epsilon = Some(s.detection_tolerance);
    settings.payoff_base = s.payoff_base;
    settings.type_factors = s.type_factors;
    settings.agents = Some(vec![s.n_agents]);
    settings.types = Some(vec![s.n_types]);
    settings.strategies = Some(vec![s.n_strategies]);
    settings.sweep = Some(plan.axis);
    match plan.axis {
        SweepAxis::Agents => settings.agents = Some(plan.values.clone()),
        SweepAxis::Strategies => settings.strategies = Some(plan.values.clone()),
        SweepAxis::Types => settings.types = Some(plan.values.clone()),
    }
    settings.out = Some(plan.out);
}

fn apply_key(settings: &mut Settings, key: &str, value: &str) -> Result<(), String> {
    match key {
        "targets" => settings.targets = Some(parse_one(key, value)?),
        "agents" => settings.agents = Some(parse_list(key, value)?),
        "types" => settings.types = Some(parse_list(key, value)?),
        "strategies" => settings.strategies = Some(parse_list(key, value)?),
        "alpha" => settings.alpha = Some(parse_one(key, value)?),
        "runs" => settings.runs = Some(parse_one(key, value)?),
        "seed" => settings.seed = Some(parse_one(key, value)?),
        "sweep" => settings.sweep = Some(parse_axis(value)?),
        "solvers" => settings.solvers = Some(parse_solvers(value)?),
        "prior_mode" => settings.prior_mode = Some(parse_prior_mode(value)?),
        "epsilon" => settings.epsilon = Some(parse_one(key, value)?),
        "payoff_base" => settings.payoff_base = Some(parse_one(key, value)?),
        "type_factors" => {
            settings.type_factors = Some(
                value
                    .split(',')
                    .map(|v| parse_one::<f64>("type_factors", v.trim()))
                    .collect::<Result<_, _>>()?,
            )
        }
        "out" => settings.out = Some(PathBuf::from(value)),
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>, String> {
    let list: Vec<usize> = value
        .split(',')
        .map(|v| parse_one(key, v.trim()))
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err(format!("`{key}` needs at least one value"));
    }
    Ok(list)
}

pub(crate) fn parse_axis(value: &str) -> Result<SweepAxis, String> {
    SweepAxis::parse(value)
        .ok_or_else(|| format!("unknown sweep axis `{value}` (agents, strategies, types)"))
}

pub(crate) fn parse_solvers(value: &str) -> Result<Vec<SolverKind>, String> {
    let solvers: Vec<SolverKind> = value
        .split(',')
        .map(|v| {
            SolverKind::parse(v.trim())
                .ok_or_else(|| format!("unknown solver `{v}` (ceu, dempster_shafer, uniform_random)"))
        })
        .collect::<Result<_, _>>()?;
    if solvers.is_empty() {
        return Err("need at least one solver".to_string());
    }
    Ok(solvers)
}

pub(crate) fn parse_prior_mode(value: &str) -> Result<PriorMode, String> {
    if value == "uniform" {
        return Ok(PriorMode::Uniform);
    }
    if let Some(idx) = value.strip_prefix("point_mass:") {
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| format!("invalid point_mass index in `{value}`"))?;
        return Ok(PriorMode::PointMass(idx));
    }
    Err(format!(
        "unknown prior mode `{value}` (uniform, point_mass:<type index>)"
    ))
}

fn finalize(settings: Settings) -> AppResult<RunPlan> {
    let defaults = ScenarioConfig::default();
    let agents = settings.agents.unwrap_or(vec![defaults.n_agents]);
    let types = settings.types.unwrap_or(vec![defaults.n_types]);
    let strategies = settings.strategies.unwrap_or(vec![defaults.n_strategies]);

    let mut multi: Vec<SweepAxis> = Vec::new();
    if agents.len() > 1 {
        multi.push(SweepAxis::Agents);
    }
    if types.len() > 1 {
        multi.push(SweepAxis::Types);
    }
    if strategies.len() > 1 {
        multi.push(SweepAxis::Strategies);
    }
    let axis = match (settings.sweep, multi.as_slice()) {
        (Some(axis), _) => {
            if let Some(&other) = multi.iter().find(|&&a| a != axis) {
                return Err(AppError::Usage(format!(
                    "--{} has multiple values but the sweep axis is `{axis}`",
                    other
                )));
            }
            axis
        }
        (None, []) => SweepAxis::Agents,
        (None, [axis]) => *axis,
        (None, _) => {
            return Err(AppError::Usage(
                "multiple axes have value lists; pick one with --sweep".to_string(),
            ))
        }
    };
    let values = match axis {
        SweepAxis::Agents => agents.clone(),
        SweepAxis::Types => types.clone(),
        SweepAxis::Strategies => strategies.clone(),
    };

    let scenario = ScenarioConfig {
        n_targets: settings.targets.unwrap_or(defaults.n_targets),
        n_agents: agents[0],
        n_types: types[0],
        n_strategies: strategies[0],
        alpha: settings.alpha.unwrap_or(defaults.alpha),
        runs: settings.runs.unwrap_or(defaults.runs),
        master_seed: settings.seed.unwrap_or(defaults.master_seed),
        payoff_base: settings.payoff_base,
        type_factors: settings.type_factors,
        prior_mode: settings.prior_mode.unwrap_or(defaults.prior_mode),
        detection_tolerance: settings.epsilon.unwrap_or(defaults.detection_tolerance),
        solvers: settings.solvers.unwrap_or(defaults.solvers),
    };

    // Fail fast on invalid dimensions at every sweep point, before any
    // output is touched.
    for &value in &values {
        axis.apply(&scenario, value)
            .validate()
            .map_err(|e| AppError::Usage(e.to_string()))?;
    }

    Ok(RunPlan {
        scenario,
        axis,
        values,
        out: settings.out.unwrap_or_else(|| PathBuf::from("results")),
    })
}
