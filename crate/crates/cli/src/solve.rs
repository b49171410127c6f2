//! The `solve` subcommand: read one explicit game description, run every
//! solver on every defender, and print the comparison as JSON.

use std::path::PathBuf;

use clap::Args;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use ambisec_core::{
    solve_ceu, solve_ds, solve_uniform_random, Agent, AgentId, GameDefinition, PayoffModel,
    SolverResult, StrategyGrid, TargetId, TypeSpace,
};
use rand_chacha::rand_core::SeedableRng;

use crate::{AppError, AppResult};

#[derive(Args)]
pub struct SolveArgs {
    /// Game description file (JSON).
    pub game: PathBuf,
    /// Optimism weight; overrides the file's `alpha`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Seed for the uniform-random baseline; overrides the file's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn default_alpha() -> f64 {
    0.5
}

/// On-disk game description. Labels default to the conventional names for
/// the type count, priors to uniform, and the payoff model to the stock
/// parametrization.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    types: Option<usize>,
    #[serde(default)]
    priors: Option<Vec<f64>>,
    grid: Vec<f64>,
    #[serde(default)]
    payoff: Option<PayoffSpec>,
    targets: usize,
    agents: Vec<Agent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PayoffSpec {
    #[serde(default)]
    base: Option<f64>,
    #[serde(default)]
    type_factors: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct SolveDoc {
    alpha: f64,
    seed: u64,
    defenders: Vec<DefenderDoc>,
}

#[derive(Serialize)]
struct DefenderDoc {
    defender: AgentId,
    target: TargetId,
    solvers: SolverDocs,
}

#[derive(Serialize)]
struct SolverDocs {
    ceu: SolverResult,
    dempster_shafer: SolverResult,
    uniform_random: SolverResult,
}

fn build_game(file: &GameFile) -> Result<GameDefinition, String> {
    let space = match (&file.labels, file.types) {
        (Some(labels), _) => TypeSpace::new(labels.clone()).map_err(|e| e.to_string())?,
        (None, Some(k)) => TypeSpace::with_default_labels(k).map_err(|e| e.to_string())?,
        (None, None) => return Err("one of `labels` or `types` is required".to_string()),
    };
    let k = space.len();
    let grid = StrategyGrid::new(file.grid.clone()).map_err(|e| e.to_string())?;
    let payoff = match &file.payoff {
        None => PayoffModel::default_for(k).map_err(|e| e.to_string())?,
        Some(spec) => {
            let base = spec.base.unwrap_or(PayoffModel::DEFAULT_BASE);
            let factors = match &spec.type_factors {
                Some(f) => f.clone(),
                None => PayoffModel::default_for(k)
                    .map_err(|e| e.to_string())?
                    .type_factors()
                    .to_vec(),
            };
            PayoffModel::new(base, factors).map_err(|e| format!("payoff: {e}"))?
        }
    };
    let priors = file
        .priors
        .clone()
        .unwrap_or_else(|| vec![1.0 / k as f64; k]);
    GameDefinition::build(space, file.targets, file.agents.clone(), grid, payoff, priors)
        .map_err(|e| e.to_string())
}

pub fn cmd_solve(args: SolveArgs) -> AppResult<()> {
    let text = std::fs::read_to_string(&args.game)
        .map_err(|e| AppError::Usage(format!("cannot read {}: {e}", args.game.display())))?;
    let file: GameFile = serde_json::from_str(&text)
        .map_err(|e| AppError::Usage(format!("{}: {e}", args.game.display())))?;
    let game =
        build_game(&file).map_err(|msg| AppError::Usage(format!("{}: {msg}", args.game.display())))?;
    let alpha = args.alpha.unwrap_or(file.alpha);
    let seed = args.seed.unwrap_or(file.seed);

    let mut uniform_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut defenders = Vec::with_capacity(game.n_targets());
    for target in 0..game.n_targets() {
        let defender = game.defender_of(TargetId(target)).id;
        let solve = |r: ambisec_core::Result<SolverResult>| {
            r.map_err(|e| AppError::Usage(e.to_string()))
        };
        defenders.push(DefenderDoc {
            defender,
            target: TargetId(target),
            solvers: SolverDocs {
                ceu: solve(solve_ceu(&game, defender, alpha))?,
                dempster_shafer: solve(solve_ds(&game, defender, alpha))?,
                uniform_random: solve(solve_uniform_random(&game, defender, &mut uniform_rng))?,
            },
        });
    }

    let doc = SolveDoc {
        alpha,
        seed,
        defenders,
    };
    let rendered = serde_json::to_string_pretty(&doc)
        .map_err(|e| AppError::Io(format!("encoding output: {e}")))?;
    println!("{rendered}");
    Ok(())
}
