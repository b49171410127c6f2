use thiserror::Error;

/// Errors raised while constructing domain objects or evaluating operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("type space needs between 2 and {max} labels, got {got}")]
    BadSpaceSize { got: usize, max: usize },
    #[error("type space labels must be distinct (duplicate `{0}`)")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("capacity table must have {expected} entries, got {got}")]
    BadCapacityTable { expected: usize, got: usize },
    #[error("capacity must map the empty set to 0 and the full set to 1")]
    CapacityNotNormalized,
    #[error("capacity is not monotone: value drops from {from:.6} to {to:.6} when adding a label")]
    CapacityNotMonotone { from: f64, to: f64 },
    #[error("prior vector must have {expected} nonnegative entries summing to 1, got sum {sum}")]
    BadPrior { expected: usize, sum: f64 },
    #[error("{name} must lie in [0,1], got {value}")]
    OutOfUnitInterval { name: &'static str, value: f64 },
    #[error("outcome vector length {got} does not match the {expected}-label space")]
    SpaceMismatch { expected: usize, got: usize },
    #[error("tolerance threshold must lie strictly inside (0,1), got {0}")]
    BadTolerance(f64),
    #[error("strategy grid must be strictly increasing inside (0,1)")]
    BadStrategyGrid,
    #[error("strategy grid must be nonempty")]
    EmptyStrategyGrid,
    #[error("type factors must be strictly decreasing with a positive first entry")]
    BadTypeFactors,
    #[error("type index {got} out of range for {n_types} types")]
    BadTypeIndex { got: usize, n_types: usize },
    #[error("game needs at least one agent")]
    NoAgents,
    #[error("target {0} has more than one defender")]
    DuplicateDefender(usize),
    #[error("target {0} has no defender")]
    MissingDefender(usize),
    #[error("defender references target {got} but the game has {n_targets} targets")]
    BadTarget { got: usize, n_targets: usize },
    #[error("agent id {0} appears more than once")]
    DuplicateAgentId(usize),
    #[error("agent {agent} has {got} behaviors but the game has {n_targets} targets")]
    BadBehaviorCount {
        agent: usize,
        got: usize,
        n_targets: usize,
    },
    #[error("no agent with id {0}")]
    NoSuchAgent(usize),
    #[error("agent {0} is not a defender")]
    NotADefender(usize),
    #[error("instance too large: {profiles} joint profiles exceed the enumeration budget {budget}")]
    EnumerationBudget { profiles: u128, budget: u128 },
    #[error("expected and realized payoff lists must be nonempty and equal-length ({expected} vs {realized})")]
    BadErrorLists { expected: usize, realized: usize },
    #[error("invalid scenario config: {0}")]
    BadScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
