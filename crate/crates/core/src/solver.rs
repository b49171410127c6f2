//! The two-phase solution procedure: every candidate defender threshold is
//! scored by first computing each potential assistant's best response and
//! willingness, then totalling the defender's expected payoff over the
//! willing set. A profile-enumerating brute-force oracle checks the solver.

use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::capacity::hurwicz_mix;
use crate::error::{Error, Result};
use crate::game::{ambiguity_degree, AgentId, Behavior, GameDefinition, PayoffModel, Role};

/// Default cap on the number of joint profiles [`brute_force_oracle`] will
/// enumerate before refusing.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 22;

/// One assistant's best response against a defender, and whether cooperating
/// beats its prior payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssistantAssessment {
    pub assistant: AgentId,
    pub best_strategy: f64,
    pub best_expected_payoff: f64,
    pub willing: bool,
}

/// Outcome of solving one defender's strategy choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    /// The tolerance threshold that maximizes the defender's total.
    pub strategy: f64,
    /// Assessments of the willing assistants, in agent order.
    pub willing: Vec<AssistantAssessment>,
    /// Defender-side expected payoff per willing assistant, aligned with
    /// `willing`.
    pub defender_terms: Vec<f64>,
    /// Total expected payoff at the chosen strategy.
    pub defender_total: f64,
}

/// How a candidate cooperation is scored from the per-type payoff vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ScoreRule {
    /// Choquet expected utility under the neo-additive capacity.
    Ceu,
    /// Pignistic expectation over the Möbius mass assignment.
    Pignistic,
}

pub(crate) struct ScoreCtx<'a> {
    pub game: &'a GameDefinition,
    pub alpha: f64,
}

impl ScoreRule {
    fn expectation(&self, ctx: &ScoreCtx, payoffs: &[f64], sigma: f64) -> Result<f64> {
        match self {
            ScoreRule::Ceu => Ok(hurwicz_mix(payoffs, ctx.game.priors(), sigma, ctx.alpha)),
            ScoreRule::Pignistic => {
                baselines::pignistic_score(ctx.game, payoffs, sigma, ctx.alpha)
            }
        }
    }
}

/// Expected payoff of a potential assistant playing threshold `s_p` against a
/// defender with the given behavior: its requested share of the ambiguity-
/// weighted expectation over the defender's possible types.
pub fn assistant_expected_payoff(
    assistant_behavior: Behavior,
    s_p: f64,
    defender_behavior: Behavior,
    priors: &[f64],
    alpha: f64,
    model: &PayoffModel,
) -> Result<f64> {
    let sigma = ambiguity_degree(s_p, defender_behavior)?;
    let payoffs = model.payoffs_by_type(defender_behavior.ability, assistant_behavior.ability);
    Ok(assistant_behavior.request * hurwicz_mix(&payoffs, priors, sigma, alpha))
}

/// Best response of an assistant over the grid, lowest threshold winning
/// ties; `willing` records whether that best beats its prior payoff.
#[allow(clippy::too_many_arguments)]
pub fn assistant_best_response(
    assistant: AgentId,
    assistant_behavior: Behavior,
    prior_payoff: f64,
    defender_behavior: Behavior,
    grid: &[f64],
    priors: &[f64],
    alpha: f64,
    model: &PayoffModel,
) -> Result<AssistantAssessment> {
    let mut best: Option<(f64, f64)> = None;
    for &s_p in grid {
        let payoff = assistant_expected_payoff(
            assistant_behavior,
            s_p,
            defender_behavior,
            priors,
            alpha,
            model,
        )?;
        if best.is_none_or(|(_, b)| payoff > b) {
            best = Some((s_p, payoff));
        }
    }
    let (best_strategy, best_expected_payoff) = best.ok_or(Error::EmptyStrategyGrid)?;
    Ok(AssistantAssessment {
        assistant,
        best_strategy,
        best_expected_payoff,
        willing: best_expected_payoff > prior_payoff,
    })
}

/// Defender-side expected payoff from cooperating with one assistant at
/// threshold `s_d` (before the defender's requested-share factor).
pub fn defender_expected_payoff(
    defender_behavior: Behavior,
    s_d: f64,
    assistant_behavior: Behavior,
    priors: &[f64],
    alpha: f64,
    model: &PayoffModel,
) -> Result<f64> {
    let sigma = ambiguity_degree(s_d, assistant_behavior)?;
    let payoffs = model.payoffs_by_type(assistant_behavior.ability, defender_behavior.ability);
    Ok(hurwicz_mix(&payoffs, priors, sigma, alpha))
}

/// Defender total at `s_d`: its requested share times the sum of expected
/// payoffs over the willing assistants' behaviors.
pub fn defender_total_payoff(
    defender_behavior: Behavior,
    s_d: f64,
    willing_behaviors: &[Behavior],
    priors: &[f64],
    alpha: f64,
    model: &PayoffModel,
) -> Result<f64> {
    let mut sum = 0.0;
    for &b in willing_behaviors {
        sum += defender_expected_payoff(defender_behavior, s_d, b, priors, alpha, model)?;
    }
    Ok(defender_behavior.request * sum)
}

fn resolve_defender(game: &GameDefinition, defender: AgentId) -> Result<(usize, Behavior)> {
    let agent = game.agent(defender)?;
    match agent.role {
        Role::Defender { target } => Ok((target.0, agent.behavior[target.0])),
        Role::Assistant => Err(Error::NotADefender(defender.0)),
    }
}

fn rule_assistant_payoff(
    rule: ScoreRule,
    ctx: &ScoreCtx,
    assistant_behavior: Behavior,
    s_p: f64,
    defender_behavior: Behavior,
) -> Result<f64> {
    let sigma = ambiguity_degree(s_p, defender_behavior)?;
    let payoffs = ctx
        .game
        .payoff()
        .payoffs_by_type(defender_behavior.ability, assistant_behavior.ability);
    Ok(assistant_behavior.request * rule.expectation(ctx, &payoffs, sigma)?)
}

fn rule_defender_payoff(
    rule: ScoreRule,
    ctx: &ScoreCtx,
    defender_behavior: Behavior,
    s_d: f64,
    assistant_behavior: Behavior,
) -> Result<f64> {
    let sigma = ambiguity_degree(s_d, assistant_behavior)?;
    let payoffs = ctx
        .game
        .payoff()
        .payoffs_by_type(assistant_behavior.ability, defender_behavior.ability);
    rule.expectation(ctx, &payoffs, sigma)
}

pub(crate) fn solve_with_rule(
    game: &GameDefinition,
    defender: AgentId,
    alpha: f64,
    rule: ScoreRule,
) -> Result<SolverResult> {
    let (target, defender_behavior) = resolve_defender(game, defender)?;
    let ctx = ScoreCtx { game, alpha };
    let grid = game.grid().values();

    let mut best: Option<SolverResult> = None;
    for &s_d in grid {
        // Phase 1: best response and willingness of every potential
        // assistant. They assess the defender's behavior alone, so this is
        // recomputed identically per strategy; the loop mirrors the two-phase
        // procedure as stated.
        let mut willing = Vec::new();
        let mut behaviors = Vec::new();
        for assistant in game.assistants() {
            let ab = assistant.behavior[target];
            let mut assessment: Option<(f64, f64)> = None;
            for &s_p in grid {
                let payoff = rule_assistant_payoff(rule, &ctx, ab, s_p, defender_behavior)?;
                if assessment.is_none_or(|(_, b)| payoff > b) {
                    assessment = Some((s_p, payoff));
                }
            }
            let (best_strategy, best_expected_payoff) =
                assessment.ok_or(Error::EmptyStrategyGrid)?;
            if best_expected_payoff > assistant.prior_payoff {
                willing.push(AssistantAssessment {
                    assistant: assistant.id,
                    best_strategy,
                    best_expected_payoff,
                    willing: true,
                });
                behaviors.push(ab);
            }
        }

        // Phase 2: the defender's total over the willing set.
        let mut terms = Vec::with_capacity(behaviors.len());
        let mut sum = 0.0;
        for &ab in &behaviors {
            let term = rule_defender_payoff(rule, &ctx, defender_behavior, s_d, ab)?;
            terms.push(term);
            sum += term;
        }
        let total = defender_behavior.request * sum;

        if best.as_ref().is_none_or(|b| total > b.defender_total) {
            best = Some(SolverResult {
                strategy: s_d,
                willing,
                defender_terms: terms,
                defender_total: total,
            });
        }
    }
    best.ok_or(Error::EmptyStrategyGrid)
}

/// Solve one defender's strategy choice under Choquet expected utility.
pub fn solve_ceu(game: &GameDefinition, defender: AgentId, alpha: f64) -> Result<SolverResult> {
    solve_with_rule(game, defender, alpha, ScoreRule::Ceu)
}

/// Exhaustive check of [`solve_ceu`]: enumerates every joint pure-strategy
/// profile over the grid, keeps those where each assistant plays a best
/// response, and returns the defender-optimal survivor. Ties resolve to the
/// lexicographically lowest profile. Refuses instances whose profile count
/// exceeds [`DEFAULT_ENUMERATION_BUDGET`].
pub fn brute_force_oracle(
    game: &GameDefinition,
    defender: AgentId,
    alpha: f64,
) -> Result<SolverResult> {
    brute_force_with_rule(game, defender, alpha, ScoreRule::Ceu, DEFAULT_ENUMERATION_BUDGET)
}

pub(crate) fn brute_force_with_rule(
    game: &GameDefinition,
    defender: AgentId,
    alpha: f64,
    rule: ScoreRule,
    budget: u128,
) -> Result<SolverResult> {
    let (target, defender_behavior) = resolve_defender(game, defender)?;
    let ctx = ScoreCtx { game, alpha };
    let grid = game.grid().values();
    let n = grid.len();
    let assistants: Vec<_> = game.assistants().collect();
    let m = assistants.len();

    let profiles = (n as u128).saturating_pow(1 + m as u32);
    if profiles > budget {
        return Err(Error::EnumerationBudget { profiles, budget });
    }

    // Payoff table per assistant per strategy; the max defines the
    // best-response filter below.
    let mut table = Vec::with_capacity(m);
    for assistant in &assistants {
        let ab = assistant.behavior[target];
        let row: Vec<f64> = grid
            .iter()
            .map(|&s_p| rule_assistant_payoff(rule, &ctx, ab, s_p, defender_behavior))
            .collect::<Result<_>>()?;
        table.push(row);
    }
    let best_payoff: Vec<f64> = table
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();

    let inner = (n as u128).pow(m as u32);
    let mut best: Option<SolverResult> = None;
    for &s_d in grid.iter() {
        for code in 0..inner {
            // Decode the assistants' strategy digits, first assistant most
            // significant so ascending `code` is lexicographic order.
            let mut digits = vec![0usize; m];
            let mut rest = code;
            for d in (0..m).rev() {
                digits[d] = (rest % n as u128) as usize;
                rest /= n as u128;
            }
            let is_best_response = digits
                .iter()
                .enumerate()
                .all(|(p, &si)| table[p][si] == best_payoff[p]);
            if !is_best_response {
                continue;
            }

            let mut willing = Vec::new();
            let mut terms = Vec::new();
            let mut sum = 0.0;
            for (p, assistant) in assistants.iter().enumerate() {
                if best_payoff[p] > assistant.prior_payoff {
                    let term = rule_defender_payoff(
                        rule,
                        &ctx,
                        defender_behavior,
                        s_d,
                        assistant.behavior[target],
                    )?;
                    willing.push(AssistantAssessment {
                        assistant: assistant.id,
                        best_strategy: grid[digits[p]],
                        best_expected_payoff: best_payoff[p],
                        willing: true,
                    });
                    terms.push(term);
                    sum += term;
                }
            }
            let total = defender_behavior.request * sum;
            if best.as_ref().is_none_or(|b| total > b.defender_total) {
                best = Some(SolverResult {
                    strategy: s_d,
                    willing,
                    defender_terms: terms,
                    defender_total: total,
                });
            }
        }
    }
    best.ok_or(Error::EmptyStrategyGrid)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::game::{Agent, AgentTypeId, StrategyGrid, TargetId};
    use crate::capacity::TypeSpace;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const TOL: f64 = 1e-9;

    fn behavior(ability: f64, request: f64) -> Behavior {
        Behavior::new(ability, request).unwrap()
    }

    fn uniform_priors(k: usize) -> Vec<f64> {
        vec![1.0 / k as f64; k]
    }

    pub(crate) fn random_game(rng: &mut StdRng, n_targets: usize, n_assistants: usize, k: usize, n_strategies: usize) -> GameDefinition {
        let space = TypeSpace::with_default_labels(k).unwrap();
        let model = PayoffModel::default_for(k).unwrap();
        let grid = StrategyGrid::uniform(n_strategies).unwrap();
        let priors = {
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / sum).collect::<Vec<_>>()
        };
        let mut agents = Vec::new();
        for i in 0..n_targets + n_assistants {
            let role = if i < n_targets {
                Role::Defender { target: TargetId(i) }
            } else {
                Role::Assistant
            };
            let behaviors: Vec<Behavior> = (0..n_targets)
                .map(|_| behavior(rng.gen(), rng.gen()))
                .collect();
            let prior_payoff = if i < n_targets {
                model.base() * behaviors[i].ability
            } else {
                0.0
            };
            agents.push(Agent {
                id: AgentId(i),
                role,
                true_type: AgentTypeId(rng.gen_range(0..k)),
                behavior: behaviors,
                prior_payoff,
            });
        }
        GameDefinition::build(space, n_targets, agents, grid, model, priors).unwrap()
    }

    #[test]
    fn assistant_payoff_savage_when_unambiguous() {
        // ratio 0.2/0.5 = 0.4 <= every threshold tried, so σ = 0.
        let model = PayoffModel::default_for(3).unwrap();
        let priors = uniform_priors(3);
        let d = behavior(0.5, 0.2);
        let a = behavior(0.8, 0.5);
        let payoffs = model.payoffs_by_type(d.ability, a.ability);
        let savage: f64 = payoffs.iter().map(|p| p / 3.0).sum();
        for s_p in [0.4, 0.6, 0.9] {
            let got = assistant_expected_payoff(a, s_p, d, &priors, 0.5, &model).unwrap();
            assert_abs_diff_eq!(got, 0.5 * savage, epsilon = TOL);
        }
    }

    #[test]
    fn assistant_payoff_zero_request_is_zero() {
        let model = PayoffModel::default_for(3).unwrap();
        let got = assistant_expected_payoff(
            behavior(0.8, 0.0),
            0.3,
            behavior(0.6, 0.45),
            &uniform_priors(3),
            0.9,
            &model,
        )
        .unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn assistant_payoff_matches_direct_formula() {
        // Defender (0.6, 0.45): ratio 0.75. At s_p = 0.3 the ambiguity is
        // log2(0.45)/log2(0.3); payoffs per defender type are 8 + 6·factor.
        let model = PayoffModel::default_for(3).unwrap();
        let priors = uniform_priors(3);
        let got = assistant_expected_payoff(
            behavior(0.8, 0.5),
            0.3,
            behavior(0.6, 0.45),
            &priors,
            0.5,
            &model,
        )
        .unwrap();
        let sigma = (0.75f64 - 0.3).log2() / 0.3f64.log2();
        let expectation = (14.0 + 5.0 + 2.0) / 3.0;
        let hurwicz = 0.5 * 14.0 + 0.5 * 2.0;
        let by_hand = 0.5 * ((1.0 - sigma) * expectation + sigma * hurwicz);
        assert_abs_diff_eq!(got, by_hand, epsilon = TOL);
    }

    #[test]
    fn best_response_singleton_grid() {
        let model = PayoffModel::default_for(3).unwrap();
        let a = assistant_best_response(
            AgentId(7),
            behavior(0.8, 0.5),
            0.0,
            behavior(0.6, 0.45),
            &[0.5],
            &uniform_priors(3),
            0.5,
            &model,
        )
        .unwrap();
        assert_eq!(a.best_strategy, 0.5);
        assert!(a.willing);
    }

    #[test]
    fn best_response_matches_exhaustive_scan() {
        let model = PayoffModel::default_for(3).unwrap();
        let priors = uniform_priors(3);
        let grid = StrategyGrid::uniform(8).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let a = behavior(rng.gen(), rng.gen());
            let d = behavior(rng.gen(), rng.gen());
            let alpha = rng.gen();
            let got = assistant_best_response(
                AgentId(0), a, 0.0, d, grid.values(), &priors, alpha, &model,
            )
            .unwrap();
            let scan_best = grid
                .values()
                .iter()
                .map(|&s| {
                    assistant_expected_payoff(a, s, d, &priors, alpha, &model).unwrap()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(got.best_expected_payoff, scan_best);
            let lowest_argmax = grid
                .values()
                .iter()
                .copied()
                .find(|&s| {
                    assistant_expected_payoff(a, s, d, &priors, alpha, &model).unwrap()
                        == scan_best
                })
                .unwrap();
            assert_eq!(got.best_strategy, lowest_argmax);
        }
    }

    #[test]
    fn best_response_tie_takes_lowest_threshold() {
        // σ = 0 against every threshold, so all payoffs tie.
        let model = PayoffModel::default_for(3).unwrap();
        let a = assistant_best_response(
            AgentId(0),
            behavior(0.8, 0.5),
            0.0,
            behavior(0.5, 0.05),
            &[0.2, 0.4, 0.6, 0.8],
            &uniform_priors(3),
            0.5,
            &model,
        )
        .unwrap();
        assert_eq!(a.best_strategy, 0.2);
    }

    #[test]
    fn defender_payoff_hurwicz_limits() {
        let model = PayoffModel::default_for(3).unwrap();
        let priors = uniform_priors(3);
        let d = behavior(0.6, 0.5);
        // Assistant ratio 0.5/0.4 = 1.25; at s_d = 0.5 the gap 0.75 lies in
        // (TT, 1), so σ = log2(0.75)/log2(0.5) without clamping.
        let a = behavior(0.4, 0.5);
        let sigma = (1.25f64 - 0.5).log2() / 0.5f64.log2();
        let payoffs = model.payoffs_by_type(a.ability, d.ability);
        let expectation: f64 = payoffs.iter().map(|p| p / 3.0).sum();
        let by_hand = (1.0 - sigma) * expectation + sigma * payoffs[2];
        let got = defender_expected_payoff(d, 0.5, a, &priors, 0.0, &model).unwrap();
        assert_abs_diff_eq!(got, by_hand, epsilon = TOL);

        // Fully ambiguous pessimist lands on the worst-type payoff.
        let certain = behavior(0.4, 0.36); // ratio 0.9 ∈ (0.8, 1.6] ⇒ σ = 1 at TT 0.8
        let got = defender_expected_payoff(d, 0.8, certain, &priors, 0.0, &model).unwrap();
        let worst = model.payoffs_by_type(certain.ability, d.ability)[2];
        assert_abs_diff_eq!(got, worst, epsilon = TOL);
    }

    #[test]
    fn defender_total_sums_willing_terms() {
        let model = PayoffModel::default_for(3).unwrap();
        let priors = uniform_priors(3);
        let d = behavior(0.6, 0.5);
        assert_eq!(
            defender_total_payoff(d, 0.4, &[], &priors, 0.5, &model).unwrap(),
            0.0
        );
        let partners = [behavior(0.4, 0.5), behavior(0.9, 0.2), behavior(0.1, 0.8)];
        let mut acc = 0.0;
        for &p in &partners {
            acc += defender_expected_payoff(d, 0.4, p, &priors, 0.5, &model).unwrap();
        }
        let got = defender_total_payoff(d, 0.4, &partners, &priors, 0.5, &model).unwrap();
        assert_abs_diff_eq!(got, 0.5 * acc, epsilon = TOL);
        let single = defender_total_payoff(d, 0.4, &partners[..1], &priors, 0.5, &model).unwrap();
        let term = defender_expected_payoff(d, 0.4, partners[0], &priors, 0.5, &model).unwrap();
        assert_abs_diff_eq!(single, 0.5 * term, epsilon = TOL);
    }

    #[test]
    fn solve_degenerate_game_without_assistants() {
        let mut rng = StdRng::seed_from_u64(3);
        let game = random_game(&mut rng, 1, 0, 3, 4);
        let result = solve_ceu(&game, AgentId(0), 0.5).unwrap();
        assert_eq!(result.defender_total, 0.0);
        assert_eq!(result.strategy, game.grid().lowest());
        assert!(result.willing.is_empty());
    }

    #[test]
    fn solve_rejects_non_defenders() {
        let mut rng = StdRng::seed_from_u64(4);
        let game = random_game(&mut rng, 1, 2, 3, 4);
        assert!(matches!(
            solve_ceu(&game, AgentId(1), 0.5),
            Err(Error::NotADefender(1))
        ));
        assert!(matches!(
            solve_ceu(&game, AgentId(99), 0.5),
            Err(Error::NoSuchAgent(99))
        ));
    }

    #[test]
    fn unambiguous_assistant_contributes_savage_payoff_under_every_strategy() {
        let mut rng = StdRng::seed_from_u64(6);
        let mut game = random_game(&mut rng, 1, 1, 3, 4);
        // Force the lone assistant's ratio under the lowest threshold.
        let apos = game
            .agents()
            .iter()
            .position(|a| !a.is_defender())
            .unwrap();
        let mut agents = game.agents().to_vec();
        agents[apos].behavior = vec![behavior(0.9, 0.1)];
        game = GameDefinition::build(
            game.space().clone(),
            1,
            agents,
            game.grid().clone(),
            game.payoff().clone(),
            game.priors().to_vec(),
        )
        .unwrap();

        let d = game.defender_of(TargetId(0));
        let db = d.behavior[0];
        let ab = behavior(0.9, 0.1);
        let payoffs = game.payoff().payoffs_by_type(ab.ability, db.ability);
        let savage: f64 = payoffs.iter().zip(game.priors()).map(|(p, pi)| p * pi).sum();
        for &s_d in game.grid().values() {
            let got = defender_expected_payoff(db, s_d, ab, game.priors(), 0.5, game.payoff())
                .unwrap();
            assert_abs_diff_eq!(got, savage, epsilon = TOL);
        }
    }

    #[test]
    fn oracle_singleton_grid_unique_profile() {
        let mut rng = StdRng::seed_from_u64(8);
        let game = random_game(&mut rng, 1, 2, 3, 1);
        let oracle = brute_force_oracle(&game, AgentId(0), 0.5).unwrap();
        let solved = solve_ceu(&game, AgentId(0), 0.5).unwrap();
        assert_eq!(oracle, solved);
    }

    #[test]
    fn oracle_refuses_oversized_instances() {
        let mut rng = StdRng::seed_from_u64(9);
        let game = random_game(&mut rng, 1, 4, 3, 4);
        assert!(matches!(
            brute_force_with_rule(&game, AgentId(0), 0.5, ScoreRule::Ceu, 100),
            Err(Error::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn oracle_treats_symmetric_assistants_identically() {
        let mut rng = StdRng::seed_from_u64(10);
        let mut game = random_game(&mut rng, 1, 2, 3, 3);
        let mut agents = game.agents().to_vec();
        let shared = vec![behavior(0.7, 0.6)];
        agents[1].behavior = shared.clone();
        agents[1].true_type = AgentTypeId(1);
        agents[2].behavior = shared;
        agents[2].true_type = AgentTypeId(1);
        game = GameDefinition::build(
            game.space().clone(),
            1,
            agents,
            game.grid().clone(),
            game.payoff().clone(),
            game.priors().to_vec(),
        )
        .unwrap();
        let result = brute_force_oracle(&game, AgentId(0), 0.3).unwrap();
        assert_eq!(result.willing.len() % 2, 0);
        if result.willing.len() == 2 {
            assert_eq!(
                result.willing[0].best_strategy,
                result.willing[1].best_strategy
            );
            assert_eq!(
                result.willing[0].best_expected_payoff,
                result.willing[1].best_expected_payoff
            );
        }
    }

    /// Order-reversed enumeration used to cross-validate tie-breaking: a
    /// descending scan that accepts ties must land on the same (lowest)
    /// argmax strategy as the ascending strict scan.
    fn reverse_scan_strategy(game: &GameDefinition, defender: AgentId, alpha: f64) -> f64 {
        let solved = solve_ceu(game, defender, alpha).unwrap();
        let target = match game.agent(defender).unwrap().role {
            Role::Defender { target } => target,
            Role::Assistant => unreachable!(),
        };
        let db = game.agent(defender).unwrap().behavior[target.0];
        let behaviors: Vec<Behavior> = solved
            .willing
            .iter()
            .map(|w| game.agent(w.assistant).unwrap().behavior[target.0])
            .collect();
        let mut best: Option<(f64, f64)> = None;
        for &s_d in game.grid().values().iter().rev() {
            let total =
                defender_total_payoff(db, s_d, &behaviors, game.priors(), alpha, game.payoff())
                    .unwrap();
            if best.is_none_or(|(_, t)| total >= t) {
                best = Some((s_d, total));
            }
        }
        best.unwrap().0
    }

    #[test]
    fn oracle_matches_solver_on_random_games() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..50 {
            let k = rng.gen_range(2..=4);
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(0..=4);
            let alpha = rng.gen();
            let game = random_game(&mut rng, 1, m, k, n);
            let solved = solve_ceu(&game, AgentId(0), alpha).unwrap();
            let oracle = brute_force_oracle(&game, AgentId(0), alpha).unwrap();
            assert_eq!(solved.strategy, oracle.strategy);
            assert_abs_diff_eq!(solved.defender_total, oracle.defender_total, epsilon = TOL);
            assert_eq!(solved.willing, oracle.willing);
            assert_eq!(solved.strategy, reverse_scan_strategy(&game, AgentId(0), alpha));
        }
    }

    #[test]
    fn removing_unwilling_assistant_leaves_result_unchanged() {
        let mut rng = StdRng::seed_from_u64(14);
        let mut checked = 0;
        for _ in 0..200 {
            let game = random_game(&mut rng, 1, 3, 3, 4);
            let result = solve_ceu(&game, AgentId(0), 0.4).unwrap();
            let willing_ids: Vec<AgentId> =
                result.willing.iter().map(|w| w.assistant).collect();
            let unwilling: Vec<AgentId> = game
                .assistants()
                .map(|a| a.id)
                .filter(|id| !willing_ids.contains(id))
                .collect();
            let Some(&drop) = unwilling.first() else {
                continue;
            };
            let trimmed: Vec<Agent> = game
                .agents()
                .iter()
                .filter(|a| a.id != drop)
                .cloned()
                .collect();
            let smaller = GameDefinition::build(
                game.space().clone(),
                1,
                trimmed,
                game.grid().clone(),
                game.payoff().clone(),
                game.priors().to_vec(),
            )
            .unwrap();
            assert_eq!(solve_ceu(&smaller, AgentId(0), 0.4).unwrap(), result);
            checked += 1;
        }
        assert!(checked > 20, "too few games had unwilling assistants");
    }

    #[test]
    fn solver_is_deterministic() {
        let mut rng = StdRng::seed_from_u64(15);
        let game = random_game(&mut rng, 2, 5, 4, 6);
        let a = solve_ceu(&game, AgentId(1), 0.7).unwrap();
        let b = solve_ceu(&game, AgentId(1), 0.7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chosen_strategy_dominates_rescoring_every_alternative() {
        let mut rng = StdRng::seed_from_u64(16);
        for _ in 0..30 {
            let game = random_game(&mut rng, 1, 4, 3, 6);
            let alpha = rng.gen();
            let result = solve_ceu(&game, AgentId(0), alpha).unwrap();
            let d = game.defender_of(TargetId(0));
            let behaviors: Vec<Behavior> = result
                .willing
                .iter()
                .map(|w| game.agent(w.assistant).unwrap().behavior[0])
                .collect();
            for &s in game.grid().values() {
                let total = defender_total_payoff(
                    d.behavior[0],
                    s,
                    &behaviors,
                    game.priors(),
                    alpha,
                    game.payoff(),
                )
                .unwrap();
                assert!(result.defender_total >= total - TOL);
            }
        }
    }

    #[test]
    fn defender_payoff_nondecreasing_in_alpha() {
        let mut rng = StdRng::seed_from_u64(17);
        let model = PayoffModel::default_for(3).unwrap();
        let priors = uniform_priors(3);
        for _ in 0..200 {
            let d = behavior(rng.gen(), rng.gen());
            let a = behavior(rng.gen(), rng.gen());
            let s_d = 0.25;
            let lo: f64 = rng.gen();
            let hi: f64 = rng.gen();
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            let p_lo = defender_expected_payoff(d, s_d, a, &priors, lo, &model).unwrap();
            let p_hi = defender_expected_payoff(d, s_d, a, &priors, hi, &model).unwrap();
            assert!(p_lo <= p_hi + TOL);
        }
    }
}
