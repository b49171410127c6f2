//! The Monte-Carlo experiment harness: scenario generation, paired trial
//! execution for every solver, true-detection accounting, and the sweep
//! aggregates (mean true detections, sensitivity, normalized RMSE, and the
//! worst-penalty distance between the D-S and CEU solvers).
//!
//! Every trial is a pure function of `(ScenarioConfig, run_index)`: the
//! per-run seed is a stable hash of the master seed and the run index, and
//! all solvers see the identical game per run, so sweeps reproduce
//! bit-identically regardless of how trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{solve_baseline, BaselineKind};
use crate::error::{Error, Result};
use crate::game::{
    check_space_size, Agent, AgentId, AgentTypeId, Behavior, GameDefinition, PayoffModel, Role,
    StrategyGrid, TargetId,
};
use crate::capacity::TypeSpace;
use crate::solver::{solve_ceu, SolverResult};

/// Which solvers a trial runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Ceu,
    DempsterShafer,
    UniformRandom,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [
        SolverKind::Ceu,
        SolverKind::DempsterShafer,
        SolverKind::UniformRandom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Ceu => "ceu",
            SolverKind::DempsterShafer => "dempster_shafer",
            SolverKind::UniformRandom => "uniform_random",
        }
    }

    pub fn parse(s: &str) -> Option<SolverKind> {
        match s {
            "ceu" => Some(SolverKind::Ceu),
            "dempster_shafer" | "ds" => Some(SolverKind::DempsterShafer),
            "uniform_random" | "uniform" | "ur" => Some(SolverKind::UniformRandom),
            _ => None,
        }
    }
}

impl From<BaselineKind> for SolverKind {
    fn from(kind: BaselineKind) -> Self {
        match kind {
            BaselineKind::DempsterShafer => SolverKind::DempsterShafer,
            BaselineKind::UniformRandom => SolverKind::UniformRandom,
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How the shared prior over types is formed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "type_index")]
pub enum PriorMode {
    Uniform,
    /// All mass on one type index; mostly useful for diagnostics.
    PointMass(usize),
}

impl PriorMode {
    pub fn prior_vector(&self, k: usize) -> Result<Vec<f64>> {
        match *self {
            PriorMode::Uniform => Ok(vec![1.0 / k as f64; k]),
            PriorMode::PointMass(t) => {
                if t >= k {
                    return Err(Error::BadTypeIndex { got: t, n_types: k });
                }
                let mut v = vec![0.0; k];
                v[t] = 1.0;
                Ok(v)
            }
        }
    }
}

/// Full description of one experiment: dimensions, solver parameters, run
/// count, and the master seed everything derives from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_targets: usize,
    pub n_agents: usize,
    pub n_types: usize,
    pub n_strategies: usize,
    pub alpha: f64,
    pub runs: usize,
    pub master_seed: u64,
    /// Override of the per-unit-ability payoff; default 10.
    pub payoff_base: Option<f64>,
    /// Override of the per-type payoff factors; default per type count.
    pub type_factors: Option<Vec<f64>>,
    pub prior_mode: PriorMode,
    /// Absolute tolerance for calling a detection true.
    pub detection_tolerance: f64,
    pub solvers: Vec<SolverKind>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_targets: 5,
            n_agents: 40,
            n_types: 3,
            n_strategies: 8,
            alpha: 0.5,
            runs: 100,
            master_seed: 42,
            payoff_base: None,
            type_factors: None,
            prior_mode: PriorMode::Uniform,
            detection_tolerance: 1e-6,
            solvers: SolverKind::ALL.to_vec(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_targets < 1 {
            return Err(Error::BadScenario("need at least one target".into()));
        }
        if self.n_agents <= self.n_targets {
            return Err(Error::BadScenario(format!(
                "need more agents than targets ({} vs {})",
                self.n_agents, self.n_targets
            )));
        }
        if self.runs < 1 {
            return Err(Error::BadScenario("need at least one run".into()));
        }
        check_space_size(self.n_types)?;
        if self.n_strategies < 1 {
            return Err(Error::BadScenario("need at least one strategy".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::BadScenario(format!(
                "alpha must lie in [0,1], got {}",
                self.alpha
            )));
        }
        if !self.detection_tolerance.is_finite() || self.detection_tolerance < 0.0 {
            return Err(Error::BadScenario(
                "detection tolerance must be nonnegative".into(),
            ));
        }
        if self.solvers.is_empty() {
            return Err(Error::BadScenario("need at least one solver".into()));
        }
        self.payoff_model()?;
        Ok(())
    }

    pub fn payoff_model(&self) -> Result<PayoffModel> {
        let mut model = match &self.type_factors {
            Some(factors) => {
                PayoffModel::new(self.payoff_base.unwrap_or(PayoffModel::DEFAULT_BASE), factors.clone())?
            }
            None => PayoffModel::default_for(self.n_types)?,
        };
        if let (Some(base), None) = (self.payoff_base, &self.type_factors) {
            model = PayoffModel::new(base, model.type_factors().to_vec())?;
        }
        if model.n_types() != self.n_types {
            return Err(Error::BadScenario(format!(
                "{} type factors given for {} types",
                model.n_types(),
                self.n_types
            )));
        }
        Ok(model)
    }
}

/// Sweep axes supported by [`run_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Agents,
    Strategies,
    Types,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Agents => "agents",
            SweepAxis::Strategies => "strategies",
            SweepAxis::Types => "types",
        }
    }

    pub fn parse(s: &str) -> Option<SweepAxis> {
        match s {
            "agents" => Some(SweepAxis::Agents),
            "strategies" => Some(SweepAxis::Strategies),
            "types" => Some(SweepAxis::Types),
            _ => None,
        }
    }

    pub fn apply(&self, config: &ScenarioConfig, value: usize) -> ScenarioConfig {
        let mut point = config.clone();
        match self {
            SweepAxis::Agents => point.n_agents = value,
            SweepAxis::Strategies => point.n_strategies = value,
            SweepAxis::Types => point.n_types = value,
        }
        point
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

const RUN_STREAM_SALT: u64 = 0x616d_6269_7365_6300;
const UNIFORM_DRAW_SALT: u64 = 0x7572_616e_646f_6d00;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-run seed; identical across platforms and scheduling.
pub fn trial_seed(master_seed: u64, run_index: u64) -> u64 {
    splitmix64(splitmix64(master_seed ^ RUN_STREAM_SALT).wrapping_add(run_index))
}

fn uniform_draw_seed(master_seed: u64, run_index: u64) -> u64 {
    splitmix64(trial_seed(master_seed, run_index) ^ UNIFORM_DRAW_SALT)
}

/// Build the random game for one run: the first `n_targets` agents defend
/// one target each, the rest are potential assistants; types are uniform
/// over the space and behavior components i.i.d. uniform on [0,1). Defenders
/// start from `base · own ability`, assistants from zero.
pub fn generate_scenario(config: &ScenarioConfig, run_index: u64) -> Result<GameDefinition> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.master_seed, run_index));
    let space = TypeSpace::with_default_labels(config.n_types)?;
    let grid = StrategyGrid::uniform(config.n_strategies)?;
    let model = config.payoff_model()?;
    let priors = config.prior_mode.prior_vector(config.n_types)?;

    let mut agents = Vec::with_capacity(config.n_agents);
    for i in 0..config.n_agents {
        let true_type = AgentTypeId(rng.gen_range(0..config.n_types));
        let behavior: Vec<Behavior> = (0..config.n_targets)
            .map(|_| Behavior {
                ability: rng.gen::<f64>(),
                request: rng.gen::<f64>(),
            })
            .collect();
        let role = if i < config.n_targets {
            Role::Defender {
                target: TargetId(i),
            }
        } else {
            Role::Assistant
        };
        let prior_payoff = match role {
            Role::Defender { target } => model.base() * behavior[target.0].ability,
            Role::Assistant => 0.0,
        };
        agents.push(Agent {
            id: AgentId(i),
            role,
            true_type,
            behavior,
            prior_payoff,
        });
    }
    GameDefinition::build(space, config.n_targets, agents, grid, model, priors)
}

/// One cooperation as the defender saw it versus how it turned out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CooperationRecord {
    pub defender: AgentId,
    pub assistant: AgentId,
    pub expected: f64,
    pub realized: f64,
    pub detected: bool,
    pub partner_type: AgentTypeId,
}

/// Everything one solver produced in one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrial {
    pub solver: SolverKind,
    /// One result per defender, in target order.
    pub results: Vec<SolverResult>,
    pub cooperations: Vec<CooperationRecord>,
    pub true_positives: usize,
    pub false_negatives: usize,
    pub sensitivity: Option<f64>,
    pub nrmse: Option<f64>,
    pub defender_payoff_mean: f64,
}

/// Per-run record across all solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub run_index: u64,
    pub solvers: Vec<SolverTrial>,
}

/// True-detection rate over cooperations: `tp / (tp + fn)`, absent when
/// there were no cooperations at all.
pub fn sensitivity(true_positives: usize, false_negatives: usize) -> Option<f64> {
    let total = true_positives + false_negatives;
    if total == 0 {
        None
    } else {
        Some(true_positives as f64 / total as f64)
    }
}

/// Root-mean-square prediction error normalized by the realized-payoff range
/// of the trial. Zero range with zero error is a clean 0; zero range with
/// real error has no meaningful scale and is absent.
pub fn normalized_rmse(expected: &[f64], realized: &[f64]) -> Result<Option<f64>> {
    if expected.is_empty() || expected.len() != realized.len() {
        return Err(Error::BadErrorLists {
            expected: expected.len(),
            realized: realized.len(),
        });
    }
    let mse: f64 = expected
        .iter()
        .zip(realized)
        .map(|(e, r)| (e - r) * (e - r))
        .sum::<f64>()
        / expected.len() as f64;
    let rmse = mse.sqrt();
    let max = realized.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = realized.iter().copied().fold(f64::INFINITY, f64::min);
    let range = max - min;
    if range > 0.0 {
        Ok(Some(rmse / range))
    } else if rmse == 0.0 {
        Ok(Some(0.0))
    } else {
        Ok(None)
    }
}

/// Run every configured solver over every defender of one game, form the
/// cooperations, and score detections against the partners' true types.
pub fn run_trial(
    game: &GameDefinition,
    config: &ScenarioConfig,
    run_index: u64,
) -> Result<TrialOutcome> {
    let mut solvers = Vec::with_capacity(config.solvers.len());
    for &kind in &config.solvers {
        let mut uniform_rng =
            ChaCha8Rng::seed_from_u64(uniform_draw_seed(config.master_seed, run_index));
        let mut results = Vec::with_capacity(game.n_targets());
        for target in 0..game.n_targets() {
            let defender = game.defender_of(TargetId(target)).id;
            let result = match kind {
                SolverKind::Ceu => solve_ceu(game, defender, config.alpha)?,
                SolverKind::DempsterShafer => solve_baseline(
                    BaselineKind::DempsterShafer,
                    game,
                    defender,
                    config.alpha,
                    &mut uniform_rng,
                )?,
                SolverKind::UniformRandom => solve_baseline(
                    BaselineKind::UniformRandom,
                    game,
                    defender,
                    config.alpha,
                    &mut uniform_rng,
                )?,
            };
            results.push(result);
        }

        let mut cooperations = Vec::new();
        for (target, result) in results.iter().enumerate() {
            let defender = game.defender_of(TargetId(target));
            let d_ability = defender.behavior[target].ability;
            for (assessment, &expected) in result.willing.iter().zip(&result.defender_terms) {
                let partner = game.agent(assessment.assistant)?;
                let realized = game.payoff().realized(
                    partner.behavior[target].ability,
                    d_ability,
                    partner.true_type,
                );
                cooperations.push(CooperationRecord {
                    defender: defender.id,
                    assistant: partner.id,
                    expected,
                    realized,
                    detected: (expected - realized).abs() <= config.detection_tolerance,
                    partner_type: partner.true_type,
                });
            }
        }

        let true_positives = cooperations.iter().filter(|c| c.detected).count();
        let false_negatives = cooperations.len() - true_positives;
        let nrmse = if cooperations.is_empty() {
            None
        } else {
            let expected: Vec<f64> = cooperations.iter().map(|c| c.expected).collect();
            let realized: Vec<f64> = cooperations.iter().map(|c| c.realized).collect();
            normalized_rmse(&expected, &realized)?
        };
        let defender_payoff_mean = results.iter().map(|r| r.defender_total).sum::<f64>()
            / results.len() as f64;

        solvers.push(SolverTrial {
            solver: kind,
            results,
            cooperations,
            true_positives,
            false_negatives,
            sensitivity: sensitivity(true_positives, false_negatives),
            nrmse,
            defender_payoff_mean,
        });
    }
    Ok(TrialOutcome {
        run_index,
        solvers,
    })
}

/// Mean and sample standard deviation; the deviation needs two points.
fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        Some(var.sqrt())
    } else {
        None
    };
    (Some(mean), std)
}

/// Per-solver aggregates at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverAggregate {
    pub solver: SolverKind,
    pub runs: usize,
    pub true_detections_mean: f64,
    pub true_detections_std: Option<f64>,
    /// Over the runs where sensitivity was defined.
    pub sensitivity_mean: Option<f64>,
    pub sensitivity_std: Option<f64>,
    pub sensitivity_defined_runs: usize,
    /// Over the runs where the normalized RMSE was defined.
    pub nrmse_mean: Option<f64>,
    pub nrmse_std: Option<f64>,
    pub nrmse_defined_runs: usize,
    pub defender_payoff_mean: f64,
    pub defender_payoff_std: Option<f64>,
}

/// One sweep point: the axis value, per-solver aggregates, and the
/// worst-penalty distance (D-S mean nRMSE minus CEU mean nRMSE).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPointReport {
    pub value: usize,
    pub solvers: Vec<SolverAggregate>,
    pub worst_penalty_distance: Option<f64>,
}

/// One per-run data row, the unit the CSV output is written from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub solver: SolverKind,
    pub sweep_value: usize,
    pub run: u64,
    pub true_detections: usize,
    pub sensitivity: Option<f64>,
    pub nrmse: Option<f64>,
    pub defender_payoff_mean: f64,
}

/// Everything a sweep produced: aggregates per point plus the flat per-run
/// rows in solver-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub axis: SweepAxis,
    pub points: Vec<SweepPointReport>,
    pub rows: Vec<TrialRow>,
}

impl MetricsReport {
    pub fn aggregate(&self, value: usize, solver: SolverKind) -> Option<&SolverAggregate> {
        self.points
            .iter()
            .find(|p| p.value == value)
            .and_then(|p| p.solvers.iter().find(|s| s.solver == solver))
    }
}

/// Run `config.runs` trials at every sweep value and aggregate. Trials run
/// in parallel; per-run seeding keeps the report independent of scheduling.
pub fn run_sweep(config: &ScenarioConfig, axis: SweepAxis, values: &[usize]) -> Result<MetricsReport> {
    if values.is_empty() {
        return Err(Error::BadScenario("sweep needs at least one value".into()));
    }
    let mut points = Vec::with_capacity(values.len());
    let mut per_point_trials = Vec::with_capacity(values.len());
    for &value in values {
        let point_config = axis.apply(config, value);
        point_config.validate()?;
        let trials: Vec<TrialOutcome> = (0..point_config.runs as u64)
            .into_par_iter()
            .map(|run| {
                let game = generate_scenario(&point_config, run)?;
                run_trial(&game, &point_config, run)
            })
            .collect::<Result<_>>()?;

        let mut aggregates = Vec::with_capacity(config.solvers.len());
        for &kind in &config.solvers {
            let per_solver: Vec<&SolverTrial> = trials
                .iter()
                .map(|t| {
                    t.solvers
                        .iter()
                        .find(|s| s.solver == kind)
                        .expect("every trial runs every configured solver")
                })
                .collect();
            let tp: Vec<f64> = per_solver.iter().map(|s| s.true_positives as f64).collect();
            let sens: Vec<f64> = per_solver.iter().filter_map(|s| s.sensitivity).collect();
            let nrmse: Vec<f64> = per_solver.iter().filter_map(|s| s.nrmse).collect();
            let payoff: Vec<f64> = per_solver.iter().map(|s| s.defender_payoff_mean).collect();
            let (tp_mean, tp_std) = mean_std(&tp);
            let (sens_mean, sens_std) = mean_std(&sens);
            let (nrmse_mean, nrmse_std) = mean_std(&nrmse);
            let (payoff_mean, payoff_std) = mean_std(&payoff);
            aggregates.push(SolverAggregate {
                solver: kind,
                runs: per_solver.len(),
                true_detections_mean: tp_mean.unwrap_or(0.0),
                true_detections_std: tp_std,
                sensitivity_mean: sens_mean,
                sensitivity_std: sens_std,
                sensitivity_defined_runs: sens.len(),
                nrmse_mean,
                nrmse_std,
                nrmse_defined_runs: nrmse.len(),
                defender_payoff_mean: payoff_mean.unwrap_or(0.0),
                defender_payoff_std: payoff_std,
            });
        }
        let find_nrmse = |kind| {
            aggregates
                .iter()
                .find(|a: &&SolverAggregate| a.solver == kind)
                .and_then(|a| a.nrmse_mean)
        };
        let worst_penalty_distance = match (
            find_nrmse(SolverKind::DempsterShafer),
            find_nrmse(SolverKind::Ceu),
        ) {
            (Some(ds), Some(ceu)) => Some(ds - ceu),
            _ => None,
        };
        points.push(SweepPointReport {
            value,
            solvers: aggregates,
            worst_penalty_distance,
        });
        per_point_trials.push(trials);
    }

    let mut rows = Vec::new();
    for &kind in &config.solvers {
        for (point_idx, &value) in values.iter().enumerate() {
            for trial in &per_point_trials[point_idx] {
                let s = trial
                    .solvers
                    .iter()
                    .find(|s| s.solver == kind)
                    .expect("every trial runs every configured solver");
                rows.push(TrialRow {
                    solver: kind,
                    sweep_value: value,
                    run: trial.run_index,
                    true_detections: s.true_positives,
                    sensitivity: s.sensitivity,
                    nrmse: s.nrmse,
                    defender_payoff_mean: s.defender_payoff_mean,
                });
            }
        }
    }

    Ok(MetricsReport { axis, points, rows })
}
