//! Comparison solvers: a Dempster-Shafer-style solver that scores payoffs by
//! the pignistic expectation of the Möbius mass assignment, and a uniform-
//! random strategy baseline.
//!
//! The D-S scorer here is a documented reimplementation, not a reproduction
//! of any particular published variant: masses come from the Möbius inverse
//! of the neo-additive capacity (kept signed when they go negative), and each
//! subset's mass is spread uniformly over its members before taking the
//! expectation. With zero ambiguity it collapses to the same Savage
//! expectation the CEU solver uses.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::capacity::{mobius_mass, NeoAdditiveCapacity, SimpleFunction, SubsetMask};
use crate::error::{Error, Result};
use crate::game::{AgentId, GameDefinition, Role};
use crate::solver::{solve_with_rule, AssistantAssessment, ScoreRule, SolverResult};

/// The two baseline solvers shipped alongside the CEU solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    DempsterShafer,
    UniformRandom,
}

/// Dispatch a baseline solve. The optimism weight only matters to the D-S
/// solver, the random source only to the uniform-random one.
pub fn solve_baseline<R: Rng>(
    kind: BaselineKind,
    game: &GameDefinition,
    defender: AgentId,
    alpha: f64,
    rng: &mut R,
) -> Result<SolverResult> {
    match kind {
        BaselineKind::DempsterShafer => solve_ds(game, defender, alpha),
        BaselineKind::UniformRandom => solve_uniform_random(game, defender, rng),
    }
}

/// Pignistic expectation of a payoff vector under a neo-additive capacity:
/// the Möbius mass of every subset, spread uniformly over the subset's
/// members. Negative masses (optimistic capacities) flow through unmodified;
/// the total mass is always 1.
pub fn ds_expected_payoff(f: &SimpleFunction, cap: &NeoAdditiveCapacity) -> Result<f64> {
    let outcomes = f.outcomes();
    if outcomes.len() != cap.space().len() {
        return Err(Error::SpaceMismatch {
            expected: cap.space().len(),
            got: outcomes.len(),
        });
    }
    let masses = mobius_mass(&cap.to_capacity());
    let mut total = 0.0;
    for (mask, &m) in masses.iter().enumerate().skip(1) {
        let mask = mask as SubsetMask;
        let members = mask.count_ones() as f64;
        let sum: f64 = outcomes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .sum();
        total += m * sum / members;
    }
    Ok(total)
}

pub(crate) fn pignistic_score(
    game: &GameDefinition,
    payoffs: &[f64],
    sigma: f64,
    alpha: f64,
) -> Result<f64> {
    let cap = NeoAdditiveCapacity::new(
        game.space().clone(),
        game.priors().to_vec(),
        sigma,
        alpha,
    )?;
    ds_expected_payoff(&SimpleFunction::new(payoffs.to_vec()), &cap)
}

/// Solve one defender with the two-phase procedure, scoring every candidate
/// cooperation by [`ds_expected_payoff`] instead of Choquet expected utility.
pub fn solve_ds(game: &GameDefinition, defender: AgentId, alpha: f64) -> Result<SolverResult> {
    solve_with_rule(game, defender, alpha, ScoreRule::Pignistic)
}

/// The weakest baseline: the defender draws its threshold uniformly from the
/// grid, and willingness is judged by the plain Savage expectation under
/// uniform priors. Deterministic given the random source.
pub fn solve_uniform_random<R: Rng>(
    game: &GameDefinition,
    defender: AgentId,
    rng: &mut R,
) -> Result<SolverResult> {
    let agent = game.agent(defender)?;
    let target = match agent.role {
        Role::Defender { target } => target,
        Role::Assistant => return Err(Error::NotADefender(defender.0)),
    };
    let defender_behavior = agent.behavior[target.0];
    let grid = game.grid().values();
    let strategy = grid[rng.gen_range(0..grid.len())];
    let k = game.n_types();

    let mut willing = Vec::new();
    let mut terms = Vec::new();
    let mut sum = 0.0;
    for assistant in game.assistants() {
        let ab = assistant.behavior[target.0];
        let payoffs = game.payoff().payoffs_by_type(defender_behavior.ability, ab.ability);
        let expected = ab.request * payoffs.iter().sum::<f64>() / k as f64;
        if expected > assistant.prior_payoff {
            willing.push(AssistantAssessment {
                assistant: assistant.id,
                // Every threshold scores the same under this rule; the tie
                // falls to the lowest, as everywhere else.
                best_strategy: game.grid().lowest(),
                best_expected_payoff: expected,
                willing: true,
            });
            let d_payoffs = game.payoff().payoffs_by_type(ab.ability, defender_behavior.ability);
            let term = d_payoffs.iter().sum::<f64>() / k as f64;
            terms.push(term);
            sum += term;
        }
    }
    Ok(SolverResult {
        strategy,
        willing,
        defender_terms: terms,
        defender_total: defender_behavior.request * sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{ceu_neo_additive, TypeSpace};
    use crate::game::{Agent, AgentTypeId, Behavior, PayoffModel, StrategyGrid, TargetId};
    use crate::solver::{brute_force_with_rule, solve_ceu, DEFAULT_ENUMERATION_BUDGET};
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn space(k: usize) -> TypeSpace {
        TypeSpace::with_default_labels(k).unwrap()
    }

    fn random_prior(rng: &mut StdRng, k: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / sum).collect()
    }

    #[test]
    fn ds_collapses_to_expectation_without_ambiguity() {
        let prior = vec![0.2, 0.3, 0.5];
        let cap = NeoAdditiveCapacity::new(space(3), prior.clone(), 0.0, 0.7).unwrap();
        let f = SimpleFunction::new(vec![4.0, -1.0, 2.5]);
        let ds = ds_expected_payoff(&f, &cap).unwrap();
        let savage: f64 = prior.iter().zip(f.outcomes()).map(|(p, v)| p * v).sum();
        assert_abs_diff_eq!(ds, savage, epsilon = 1e-12);
        assert_abs_diff_eq!(ds, ceu_neo_additive(&cap, &f).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn ds_worked_example() {
        // Masses 0.4/0.4/0.2; the pair splits its mass between 10 and 0.
        let cap = NeoAdditiveCapacity::new(space(2), vec![0.5, 0.5], 0.4, 0.25).unwrap();
        let f = SimpleFunction::new(vec![10.0, 0.0]);
        assert_abs_diff_eq!(ds_expected_payoff(&f, &cap).unwrap(), 5.0, epsilon = TOL);
    }

    #[test]
    fn ds_constant_function_is_the_constant() {
        let cap = NeoAdditiveCapacity::new(space(4), vec![0.25; 4], 0.8, 0.9).unwrap();
        let f = SimpleFunction::new(vec![-3.25; 4]);
        assert_abs_diff_eq!(ds_expected_payoff(&f, &cap).unwrap(), -3.25, epsilon = TOL);
    }

    #[test]
    fn ds_matches_independent_closed_form() {
        // For the neo-additive mass the pignistic expectation reduces to
        // (1-σ)·E_π[f] + σ·mean(f): the Hurwicz part of the capacity is
        // permutation-symmetric, so its pignistic spread is uniform.
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..200 {
            let k = rng.gen_range(2..=5);
            let prior = random_prior(&mut rng, k);
            let sigma: f64 = rng.gen();
            let alpha: f64 = rng.gen();
            let f: Vec<f64> = (0..k).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let cap = NeoAdditiveCapacity::new(space(k), prior.clone(), sigma, alpha).unwrap();
            let ds = ds_expected_payoff(&SimpleFunction::new(f.clone()), &cap).unwrap();
            let expectation: f64 = prior.iter().zip(&f).map(|(p, v)| p * v).sum();
            let mean: f64 = f.iter().sum::<f64>() / k as f64;
            assert_abs_diff_eq!(ds, (1.0 - sigma) * expectation + sigma * mean, epsilon = 1e-7);
        }
    }

    #[test]
    fn pignistic_mass_always_totals_one() {
        let mut rng = StdRng::seed_from_u64(22);
        for _ in 0..100 {
            let k = rng.gen_range(2..=5);
            let prior = random_prior(&mut rng, k);
            let cap =
                NeoAdditiveCapacity::new(space(k), prior, rng.gen(), rng.gen()).unwrap();
            let masses = mobius_mass(&cap.to_capacity());
            assert_abs_diff_eq!(masses.iter().sum::<f64>(), 1.0, epsilon = TOL);
        }
    }

    /// Game in which every request/ability ratio sits below the lowest grid
    /// threshold, so the ambiguity degree is zero everywhere.
    fn sigma_zero_game(rng: &mut StdRng, n_assistants: usize, k: usize) -> GameDefinition {
        let grid = StrategyGrid::uniform(4).unwrap();
        let min_tt = grid.lowest();
        let model = PayoffModel::default_for(k).unwrap();
        let mut agents = Vec::new();
        for i in 0..=n_assistants {
            let ability = rng.gen_range(0.5..1.0);
            let request = ability * min_tt * rng.gen_range(0.0..0.99);
            let role = if i == 0 {
                Role::Defender { target: TargetId(0) }
            } else {
                Role::Assistant
            };
            agents.push(Agent {
                id: AgentId(i),
                role,
                true_type: AgentTypeId(rng.gen_range(0..k)),
                behavior: vec![Behavior::new(ability, request).unwrap()],
                prior_payoff: 0.0,
            });
        }
        GameDefinition::build(
            space(k),
            1,
            agents,
            grid,
            model,
            random_prior(rng, k),
        )
        .unwrap()
    }

    #[test]
    fn ds_equals_ceu_on_ambiguity_free_games() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..50 {
            let game = sigma_zero_game(&mut rng, 3, 3);
            let alpha = rng.gen();
            let ceu = solve_ceu(&game, AgentId(0), alpha).unwrap();
            let ds = solve_ds(&game, AgentId(0), alpha).unwrap();
            assert_eq!(ceu.strategy, ds.strategy);
            assert_abs_diff_eq!(ceu.defender_total, ds.defender_total, epsilon = TOL);
            assert_eq!(ceu.willing.len(), ds.willing.len());
        }
    }

    #[test]
    fn ds_degenerate_game_total_is_zero() {
        let mut rng = StdRng::seed_from_u64(24);
        let game = sigma_zero_game(&mut rng, 0, 3);
        let result = solve_ds(&game, AgentId(0), 0.5).unwrap();
        assert_eq!(result.defender_total, 0.0);
        assert!(result.willing.is_empty());
    }

    #[test]
    fn ds_matches_swapped_scorer_oracle() {
        let mut rng = StdRng::seed_from_u64(25);
        for _ in 0..40 {
            let k = rng.gen_range(2..=4);
            let m = rng.gen_range(0..=3);
            let n = rng.gen_range(1..=4);
            let game = crate::solver::tests::random_game(&mut rng, 1, m, k, n);
            let alpha = rng.gen();
            let solved = solve_ds(&game, AgentId(0), alpha).unwrap();
            let oracle = brute_force_with_rule(
                &game,
                AgentId(0),
                alpha,
                ScoreRule::Pignistic,
                DEFAULT_ENUMERATION_BUDGET,
            )
            .unwrap();
            assert_eq!(solved.strategy, oracle.strategy);
            assert_abs_diff_eq!(solved.defender_total, oracle.defender_total, epsilon = TOL);
            assert_eq!(solved.willing, oracle.willing);
        }
    }

    #[test]
    fn uniform_random_singleton_grid() {
        let mut rng = StdRng::seed_from_u64(26);
        let game = crate::solver::tests::random_game(&mut rng, 1, 2, 3, 1);
        let mut source = ChaCha8Rng::seed_from_u64(0);
        let result = solve_uniform_random(&game, AgentId(0), &mut source).unwrap();
        assert_eq!(result.strategy, game.grid().lowest());
    }

    #[test]
    fn baseline_dispatch_matches_direct_calls() {
        let mut rng = StdRng::seed_from_u64(29);
        let game = crate::solver::tests::random_game(&mut rng, 1, 3, 3, 4);
        let via_dispatch = solve_baseline(
            BaselineKind::DempsterShafer,
            &game,
            AgentId(0),
            0.6,
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert_eq!(via_dispatch, solve_ds(&game, AgentId(0), 0.6).unwrap());
        let via_dispatch = solve_baseline(
            BaselineKind::UniformRandom,
            &game,
            AgentId(0),
            0.6,
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert_eq!(
            via_dispatch,
            solve_uniform_random(&game, AgentId(0), &mut ChaCha8Rng::seed_from_u64(1)).unwrap()
        );
    }

    #[test]
    fn uniform_random_is_deterministic_per_seed() {
        let mut rng = StdRng::seed_from_u64(27);
        let game = crate::solver::tests::random_game(&mut rng, 1, 4, 3, 4);
        let a = solve_uniform_random(&game, AgentId(0), &mut ChaCha8Rng::seed_from_u64(99))
            .unwrap();
        let b = solve_uniform_random(&game, AgentId(0), &mut ChaCha8Rng::seed_from_u64(99))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_random_draws_each_strategy_evenly() {
        let mut rng = StdRng::seed_from_u64(28);
        let game = crate::solver::tests::random_game(&mut rng, 1, 1, 3, 4);
        let mut source = ChaCha8Rng::seed_from_u64(7);
        let draws = 10_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            let result = solve_uniform_random(&game, AgentId(0), &mut source).unwrap();
            let idx = game
                .grid()
                .values()
                .iter()
                .position(|&v| v == result.strategy)
                .unwrap();
            counts[idx] += 1;
        }
        // 3 standard errors around p = 1/4.
        let se = (0.25 * 0.75 / draws as f64).sqrt();
        for &c in &counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.25).abs() <= 3.0 * se, "freq {freq} too far from 0.25");
        }
    }
}
