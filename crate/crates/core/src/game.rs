//! The security-game domain: agents and their behaviors, tolerance
//! thresholds, the ambiguity-degree formula, the parametrized realized-payoff
//! function, and the assembled game definition.

use serde::{Deserialize, Serialize};

use crate::capacity::{validate_prior, validate_unit, TypeSpace, MAX_LABELS};
use crate::error::{Error, Result};

/// Index of an agent type, ordered from most cooperative (0) to most harmful.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct AgentTypeId(pub usize);

/// Identifier of an agent within a game.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct AgentId(pub usize);

/// Identifier of a target.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TargetId(pub usize);

/// An agent's stance toward one target: the fraction of its ability it
/// commits and the fraction of the expected payoff it requests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    pub ability: f64,
    pub request: f64,
}

impl Behavior {
    pub fn new(ability: f64, request: f64) -> Result<Self> {
        validate_unit("ability", ability)?;
        validate_unit("request", request)?;
        Ok(Self { ability, request })
    }
}

/// The pure-strategy set: distinct tolerance-threshold values, strictly
/// increasing and strictly inside (0,1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct StrategyGrid {
    values: Vec<f64>,
}

impl StrategyGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyStrategyGrid);
        }
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        if !increasing || values[0] <= 0.0 || values[values.len() - 1] >= 1.0 {
            return Err(Error::BadStrategyGrid);
        }
        Ok(Self { values })
    }

    /// The evenly spaced n-value grid `{1/(n+1), ..., n/(n+1)}`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i as f64 / (n + 1) as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lowest(&self) -> f64 {
        self.values[0]
    }
}

impl TryFrom<Vec<f64>> for StrategyGrid {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<StrategyGrid> for Vec<f64> {
    fn from(grid: StrategyGrid) -> Self {
        grid.values
    }
}

/// Whether an agent guards a target or is available as outside help.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "role")]
pub enum Role {
    Defender { target: TargetId },
    Assistant,
}

/// One agent of the game: its role, true type, per-target behavior, and the
/// payoff it holds before any cooperation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub id: AgentId,
    #[serde(flatten)]
    pub role: Role,
    pub true_type: AgentTypeId,
    /// One behavior per target, indexed by target id.
    pub behavior: Vec<Behavior>,
    #[serde(default)]
    pub prior_payoff: f64,
}

impl Agent {
    pub fn is_defender(&self) -> bool {
        matches!(self.role, Role::Defender { .. })
    }
}

/// Realized-payoff parameters: a cooperation pays `base·w_self` for the
/// agent's own effort plus `base·w_partner·type_factor[partner type]` for the
/// partner's contribution. Factors are strictly decreasing in type index,
/// positive for the most cooperative type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffModel {
    base: f64,
    type_factor: Vec<f64>,
}

impl PayoffModel {
    pub const DEFAULT_BASE: f64 = 10.0;

    pub fn new(base: f64, type_factor: Vec<f64>) -> Result<Self> {
        let strictly_decreasing = type_factor.windows(2).all(|w| w[0] > w[1]);
        if type_factor.len() < 2 || !strictly_decreasing || type_factor[0] <= 0.0 {
            return Err(Error::BadTypeFactors);
        }
        Ok(Self { base, type_factor })
    }

    /// The stock parametrization for k types: `(+1, -0.5, -1)` for the
    /// classic three, a linear ramp from +1 down to -1 otherwise.
    pub fn default_for(k: usize) -> Result<Self> {
        let factors = if k == 3 {
            vec![1.0, -0.5, -1.0]
        } else {
            (0..k)
                .map(|i| 1.0 - 2.0 * i as f64 / (k - 1) as f64)
                .collect()
        };
        Self::new(Self::DEFAULT_BASE, factors)
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn type_factors(&self) -> &[f64] {
        &self.type_factor
    }

    pub fn n_types(&self) -> usize {
        self.type_factor.len()
    }

    /// Payoff realized from a cooperation: `w = (partner ability, own
    /// ability)`, with the partner's true type scaling its contribution.
    pub fn realized(&self, w_partner: f64, w_self: f64, partner_type: AgentTypeId) -> f64 {
        self.base * w_self + self.base * w_partner * self.type_factor[partner_type.0]
    }

    /// Realized payoff for every possible partner type, in type order.
    pub fn payoffs_by_type(&self, w_partner: f64, w_self: f64) -> Vec<f64> {
        (0..self.type_factor.len())
            .map(|t| self.realized(w_partner, w_self, AgentTypeId(t)))
            .collect()
    }
}

/// Ambiguity degree of an observer with tolerance threshold `observer_tt`
/// about an agent showing `observed` behavior.
///
/// No ambiguity when the request/ability ratio stays within the threshold;
/// otherwise `log2(ratio - TT) / log2(TT)`, clamped into [0,1]. An agent
/// committing zero ability is maximally ambiguous.
pub fn ambiguity_degree(observer_tt: f64, observed: Behavior) -> Result<f64> {
    if !(observer_tt > 0.0 && observer_tt < 1.0) {
        return Err(Error::BadTolerance(observer_tt));
    }
    if observed.ability == 0.0 {
        return Ok(1.0);
    }
    let ratio = observed.request / observed.ability;
    if ratio <= observer_tt {
        return Ok(0.0);
    }
    let raw = (ratio - observer_tt).log2() / observer_tt.log2();
    Ok(raw.clamp(0.0, 1.0))
}

/// Tolerance threshold an agent assigns itself from the ability it commits:
/// abilities are banded at width `1/(n+1)` and higher ability maps to a lower
/// threshold, snapped down onto the grid (or to the grid minimum when the
/// band falls below it).
pub fn tolerance_from_ability(ability: f64, grid: &StrategyGrid) -> f64 {
    let bands = (grid.len() + 1) as f64;
    // Band index of the ability, kept as an integer so the raw threshold
    // below is an exact small ratio rather than an accumulated float.
    let j = (ability * bands).ceil().clamp(0.0, bands) as usize;
    let raw = (grid.len() + 1 - j) as f64 / bands;
    grid.values()
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= raw + 1e-9)
        .unwrap_or_else(|| grid.lowest())
}

/// A fully assembled game: the type space, every agent, the shared strategy
/// grid, the payoff parameters, and the common prior over types. Immutable
/// once built; solvers only read it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameDefinition {
    space: TypeSpace,
    n_targets: usize,
    agents: Vec<Agent>,
    grid: StrategyGrid,
    payoff: PayoffModel,
    priors: Vec<f64>,
    /// Self-assigned tolerance threshold per agent per target, derived from
    /// the committed ability via the banding rule.
    own_tolerance: Vec<Vec<f64>>,
}

impl GameDefinition {
    pub fn build(
        space: TypeSpace,
        n_targets: usize,
        agents: Vec<Agent>,
        grid: StrategyGrid,
        payoff: PayoffModel,
        priors: Vec<f64>,
    ) -> Result<Self> {
        let k = space.len();
        if agents.is_empty() {
            return Err(Error::NoAgents);
        }
        if payoff.n_types() != k {
            return Err(Error::BadTypeFactors);
        }
        validate_prior(&priors, k)?;

        let mut defender_of = vec![None; n_targets];
        for agent in &agents {
            if agents.iter().filter(|a| a.id == agent.id).count() > 1 {
                return Err(Error::DuplicateAgentId(agent.id.0));
            }
            if agent.true_type.0 >= k {
                return Err(Error::BadTypeIndex {
                    got: agent.true_type.0,
                    n_types: k,
                });
            }
            if agent.behavior.len() != n_targets {
                return Err(Error::BadBehaviorCount {
                    agent: agent.id.0,
                    got: agent.behavior.len(),
                    n_targets,
                });
            }
            // Behaviors may arrive via deserialization, bypassing the
            // constructor; re-check the unit-interval bounds here.
            for b in &agent.behavior {
                validate_unit("ability", b.ability)?;
                validate_unit("request", b.request)?;
            }
            if let Role::Defender { target } = agent.role {
                if target.0 >= n_targets {
                    return Err(Error::BadTarget {
                        got: target.0,
                        n_targets,
                    });
                }
                if defender_of[target.0].replace(agent.id).is_some() {
                    return Err(Error::DuplicateDefender(target.0));
                }
            }
        }
        if let Some(t) = defender_of.iter().position(Option::is_none) {
            return Err(Error::MissingDefender(t));
        }

        let own_tolerance = agents
            .iter()
            .map(|a| {
                a.behavior
                    .iter()
                    .map(|b| tolerance_from_ability(b.ability, &grid))
                    .collect()
            })
            .collect();

        Ok(Self {
            space,
            n_targets,
            agents,
            grid,
            payoff,
            priors,
            own_tolerance,
        })
    }

    pub fn space(&self) -> &TypeSpace {
        &self.space
    }

    pub fn n_types(&self) -> usize {
        self.space.len()
    }

    pub fn n_targets(&self) -> usize {
        self.n_targets
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn grid(&self) -> &StrategyGrid {
        &self.grid
    }

    pub fn payoff(&self) -> &PayoffModel {
        &self.payoff
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn agent(&self, id: AgentId) -> Result<&Agent> {
        self.agents
            .iter()
            .find(|a| a.id == id)
            .ok_or(Error::NoSuchAgent(id.0))
    }

    pub fn defender_of(&self, target: TargetId) -> &Agent {
        self.agents
            .iter()
            .find(|a| a.role == Role::Defender { target })
            .expect("construction guarantees one defender per target")
    }

    pub fn assistants(&self) -> impl Iterator<Item = &Agent> {
        self.agents.iter().filter(|a| !a.is_defender())
    }

    pub fn own_tolerance(&self, agent: AgentId, target: TargetId) -> Result<f64> {
        let idx = self
            .agents
            .iter()
            .position(|a| a.id == agent)
            .ok_or(Error::NoSuchAgent(agent.0))?;
        Ok(self.own_tolerance[idx][target.0])
    }
}

pub(crate) fn check_space_size(k: usize) -> Result<()> {
    if !(2..=MAX_LABELS).contains(&k) {
        return Err(Error::BadSpaceSize {
            got: k,
            max: MAX_LABELS,
        });
    }
    Ok(())
}
