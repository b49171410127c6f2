//! Shared fixtures for the solver benchmarks.

use ambisec_core::{
    generate_scenario, GameDefinition, NeoAdditiveCapacity, ScenarioConfig, SimpleFunction,
    SolverKind, TypeSpace,
};

/// The stock benchmark game: 5 targets, 40 agents, 8 thresholds, 3 types.
pub fn standard_game() -> GameDefinition {
    generate_scenario(&standard_config(), 0).expect("default dimensions are valid")
}

pub fn standard_config() -> ScenarioConfig {
    ScenarioConfig {
        runs: 10,
        solvers: vec![
            SolverKind::Ceu,
            SolverKind::DempsterShafer,
            SolverKind::UniformRandom,
        ],
        ..ScenarioConfig::default()
    }
}

/// A five-type capacity with middling ambiguity, plus a payoff vector.
pub fn capacity_instance() -> (NeoAdditiveCapacity, SimpleFunction) {
    let space = TypeSpace::with_default_labels(5).expect("five labels are valid");
    let cap = NeoAdditiveCapacity::new(space, vec![0.2; 5], 0.6, 0.4)
        .expect("parameters are in range");
    let f = SimpleFunction::new(vec![12.0, 5.5, 0.0, -4.25, -9.0]);
    (cap, f)
}
