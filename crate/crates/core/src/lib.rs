//! Simulation library for security games with ambiguous beliefs: defenders
//! pick cooperators among outside agents by maximizing Choquet expected
//! utility over neo-additive capacities, benchmarked against a
//! Dempster-Shafer-style solver and a uniform-random baseline under a
//! seeded Monte-Carlo protocol.

pub mod baselines;
pub mod capacity;
pub mod error;
pub mod experiment;
pub mod game;
pub mod solver;

pub use baselines::{
    ds_expected_payoff, solve_baseline, solve_ds, solve_uniform_random, BaselineKind,
};
pub use capacity::{
    belief_plausibility, ceu_neo_additive, choquet_integral, mobius_mass, Capacity,
    NeoAdditiveCapacity, SimpleFunction, SubsetMask, TypeSpace,
};
pub use error::{Error, Result};
pub use experiment::{
    generate_scenario, normalized_rmse, run_sweep, run_trial, sensitivity, MetricsReport,
    PriorMode, ScenarioConfig, SolverKind, SweepAxis, TrialOutcome,
};
pub use game::{
    ambiguity_degree, tolerance_from_ability, Agent, AgentId, AgentTypeId, Behavior,
    GameDefinition, PayoffModel, Role, StrategyGrid, TargetId,
};
pub use solver::{
    assistant_best_response, assistant_expected_payoff, brute_force_oracle,
    defender_expected_payoff, defender_total_payoff, solve_ceu, AssistantAssessment, SolverResult,
};
