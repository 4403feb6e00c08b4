//! Expected leader payoff when the follower best-responds to an empirical
//! estimate built from `N` observed plays.
//!
//! The follower draws `N` i.i.d. rows from the commitment `x`, forms the
//! empirical distribution, and best-responds to *that* (ties broken in the
//! leader's favor at the empirical point). The leader's expected payoff is
//!
//! `f_N(x) = E[ <x, a_{j*(X_hat)}> ]`,
//!
//! computed exactly by enumerating multinomial count vectors (log-space
//! probabilities, compensated summation — deterministic to the bit) or by
//! seeded Monte Carlo when the lattice is too large.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{favored_response, MixedStrategy, NormalFormGame};
use crate::rng::CounterRng;

/// Default cap on exactly enumerated count vectors (`C(N+m-1, m-1)`).
pub const DEFAULT_ENUM_LIMIT: u64 = 10_000_000;

/// Default Monte Carlo trial count.
pub const DEFAULT_TRIALS: u64 = 2_000;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Counts of each leader row over `n` observed plays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalDistribution {
    pub counts: Vec<u64>,
    pub n: u64,
}

impl EmpiricalDistribution {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        let n = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidN(0));
        }
        Ok(EmpiricalDistribution { counts, n })
    }

    /// The empirical mixed strategy `counts / n`.
    pub fn to_strategy(&self) -> MixedStrategy {
        let weights = self.counts.iter().map(|&c| c as f64 / self.n as f64).collect();
        MixedStrategy::new(weights).expect("counts/n lies on the simplex")
    }
}

/// How a payoff estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Exact,
    MonteCarlo,
}

/// An estimate of `f_N(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffEstimate {
    pub mean: f64,
    /// Standard error of `mean`; exactly 0 for exact enumeration.
    pub stderr: f64,
    pub method: EvalMethod,
    /// Monte Carlo trials, or enumerated count vectors for exact evaluation.
    pub trials: u64,
    /// Observation count `N`.
    pub samples: u64,
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

/// Kahan (compensated) accumulator: deterministic ~1e-16-accurate sums.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum
    }
}

/// `ln(k!)` for `k = 0..=n`, by compensated accumulation of `ln k`.
pub(crate) fn log_factorials(n: u64) -> Vec<f64> {
    let mut table = Vec::with_capacity(n as usize + 1);
    let mut acc = Kahan::default();
    table.push(0.0);
    for k in 1..=n {
        acc.add((k as f64).ln());
        table.push(acc.total());
    }
    table
}

/// `C(n+m-1, m-1)`, saturating at `u128::MAX`.
pub(crate) fn composition_count(n: u64, m: usize) -> u128 {
    let mut result: u128 = 1;
    for i in 1..m as u128 {
        result = result.saturating_mul(n as u128 + i) / i;
    }
    result
}

fn check_enumerable(n: u64, m: usize, enum_limit: u64) -> Result<()> {
    let needed = composition_count(n, m);
    if needed > enum_limit as u128 {
        return Err(Error::EnumerationTooLarge { needed, limit: enum_limit });
    }
    Ok(())
}

/// Visit every count vector of length `m` summing to `n`, in lexicographic
/// order of the first `m-1` coordinates.
fn for_each_composition(m: usize, n: u64, visit: &mut impl FnMut(&[u64])) {
    fn walk(counts: &mut [u64], idx: usize, remaining: u64, visit: &mut impl FnMut(&[u64])) {
        if idx + 1 == counts.len() {
            counts[idx] = remaining;
            visit(counts);
            return;
        }
        for k in 0..=remaining {
            counts[idx] = k;
            walk(counts, idx + 1, remaining - k, visit);
        }
    }
    let mut counts = vec![0u64; m];
    walk(&mut counts, 0, n, visit);
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// The follower's response to an empirical estimate: the leader-favored best
/// response at `counts / n`.
pub fn empirical_response(game: &NormalFormGame, empirical: &EmpiricalDistribution) -> usize {
    let strategy = empirical.to_strategy();
    favored_response(game, strategy.weights(), game.tie_tolerance())
}

struct ExactRun {
    mean: f64,
    response_mass: Vec<f64>,
    vectors: u64,
}

/// Shared exact enumeration: expectation of the leader payoff and the
/// response distribution in one pass.
fn enumerate_exact(
    game: &NormalFormGame,
    x: &MixedStrategy,
    n: u64,
    enum_limit: u64,
) -> Result<ExactRun> {
    if n == 0 {
        return Err(Error::InvalidN(0));
    }
    let m = game.num_strategies();
    if x.len() != m {
        return Err(Error::WrongDimension { expected: m, got: x.len() });
    }
    check_enumerable(n, m, enum_limit)?;

    let lf = log_factorials(n);
    let tau_tie = game.tie_tolerance();
    let payoffs: Vec<f64> =
        (0..game.num_responses()).map(|j| game.leader_payoff(x, j)).collect();
    // k * ln(x_i) per coordinate and count, so the hot loop only adds.
    let log_weight_tables: Vec<Vec<f64>> = x
        .weights()
        .iter()
        .map(|&xi| {
            let lxi = if xi > 0.0 { xi.ln() } else { f64::NEG_INFINITY };
            (0..=n).map(|k| if k == 0 { 0.0 } else { k as f64 * lxi }).collect()
        })
        .collect();

    let mut mean = Kahan::default();
    let mut total = Kahan::default();
    let mut response_mass = vec![Kahan::default(); game.num_responses()];
    let mut vectors = 0u64;
    let mut weights = vec![0.0f64; m];
    let inv_n = 1.0 / n as f64;

    for_each_composition(m, n, &mut |counts| {
        vectors += 1;
        let mut log_prob = lf[n as usize];
        for (i, &k) in counts.iter().enumerate() {
            log_prob += log_weight_tables[i][k as usize] - lf[k as usize];
        }
        if log_prob == f64::NEG_INFINITY {
            return; // empirical point outside the support of x
        }
        let prob = log_prob.exp();
        for (w, &k) in weights.iter_mut().zip(counts.iter()) {
            *w = k as f64 * inv_n;
        }
        let response = favored_response(game, &weights, tau_tie);
        mean.add(prob * payoffs[response]);
        total.add(prob);
        response_mass[response].add(prob);
    });

    let total = total.total();
    debug_assert!(
        (total - 1.0).abs() <= 1e-9,
        "multinomial probabilities summed to {total}"
    );
    Ok(ExactRun {
        mean: mean.total(),
        response_mass: response_mass.iter().map(Kahan::total).collect(),
        vectors,
    })
}

/// Exact `f_N(x)` by multinomial enumeration. Errors with
/// [`Error::EnumerationTooLarge`] when more than `enum_limit` count vectors
/// would be visited.
pub fn exact_expected_payoff(
    game: &NormalFormGame,
    x: &MixedStrategy,
    n: u64,
    enum_limit: u64,
) -> Result<PayoffEstimate> {
    let run = enumerate_exact(game, x, n, enum_limit)?;
    Ok(PayoffEstimate {
        mean: run.mean,
        stderr: 0.0,
        method: EvalMethod::Exact,
        trials: run.vectors,
        samples: n,
    })
}

/// Exact distribution of the follower's response under `N` observations:
/// entry `j` is the probability that the empirical best response is `j`.
/// Sums to 1 within 1e-9.
pub fn response_distribution(
    game: &NormalFormGame,
    x: &MixedStrategy,
    n: u64,
    enum_limit: u64,
) -> Result<Vec<f64>> {
    Ok(enumerate_exact(game, x, n, enum_limit)?.response_mass)
}

/// Monte Carlo `f_N(x)`: `trials` independent empirical follower estimates.
/// Trial `t` draws from the child stream `derive_stream(seed, t)`, so any
/// evaluation schedule produces identical results.
pub fn mc_expected_payoff(
    game: &NormalFormGame,
    x: &MixedStrategy,
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<PayoffEstimate> {
    if n == 0 {
        return Err(Error::InvalidN(0));
    }
    if trials == 0 {
        return Err(Error::InvalidTrials(0));
    }
    let m = game.num_strategies();
    if x.len() != m {
        return Err(Error::WrongDimension { expected: m, got: x.len() });
    }
    let tau_tie = game.tie_tolerance();
    let payoffs: Vec<f64> =
        (0..game.num_responses()).map(|j| game.leader_payoff(x, j)).collect();

    // Welford's online moments, in fixed trial order.
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    let mut counts = vec![0u64; m];
    let mut weights = vec![0.0f64; m];
    let inv_n = 1.0 / n as f64;
    for t in 0..trials {
        let mut rng = CounterRng::derived(seed, t);
        counts.fill(0);
        for _ in 0..n {
            counts[rng.categorical(x.weights())] += 1;
        }
        for (w, &k) in weights.iter_mut().zip(counts.iter()) {
            *w = k as f64 * inv_n;
        }
        let response = favored_response(game, &weights, tau_tie);
        let value = payoffs[response];
        let delta = value - mean;
        mean += delta / (t + 1) as f64;
        m2 += delta * (value - mean);
    }
    let stderr = if trials > 1 {
        (m2 / (trials - 1) as f64).sqrt() / (trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(PayoffEstimate {
        mean,
        stderr,
        method: EvalMethod::MonteCarlo,
        trials,
        samples: n,
    })
}

/// Exact `f_N((p, 1-p))` for a 2-row game: the binomial specialization of
/// [`exact_expected_payoff`], cheap enough to sweep over thousands of `p`.
pub fn binomial_expected_payoff(game: &NormalFormGame, p: f64, n: u64) -> Result<f64> {
    if game.num_strategies() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: game.num_strategies() });
    }
    if n == 0 {
        return Err(Error::InvalidN(0));
    }
    let x = MixedStrategy::binary(p)?;
    let tau_tie = game.tie_tolerance();
    let payoffs: Vec<f64> =
        (0..game.num_responses()).map(|j| game.leader_payoff(&x, j)).collect();
    let lf = log_factorials(n);
    let (lp, lq) = (p.ln(), (1.0 - p).ln()); // -inf at the endpoints is fine
    let mut mean = Kahan::default();
    for k in 0..=n {
        let log_prob = lf[n as usize] - lf[k as usize] - lf[(n - k) as usize]
            + if k > 0 { k as f64 * lp } else { 0.0 }
            + if k < n { (n - k) as f64 * lq } else { 0.0 };
        if log_prob == f64::NEG_INFINITY {
            continue;
        }
        let weights = [k as f64 / n as f64, (n - k) as f64 / n as f64];
        let response = favored_response(game, &weights, tau_tie);
        mean.add(log_prob.exp() * payoffs[response]);
    }
    Ok(mean.total())
}

/// Best commitment of a 2-row game under `N` observations: scan `f_N` on a
/// uniform grid of `grid_points + 1` values of `p`, then golden-section
/// refine around the best cell for `refine_iters` iterations. The result is
/// a certified lower bound on `f*_N` — the true value at the returned point.
pub fn brute_force_optimum_2xn(
    game: &NormalFormGame,
    n: u64,
    grid_points: usize,
    refine_iters: usize,
) -> Result<(MixedStrategy, f64)> {
    if game.num_strategies() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: game.num_strategies() });
    }
    if n == 0 {
        return Err(Error::InvalidN(0));
    }
    assert!(grid_points >= 2, "grid needs at least two cells");

    // The response at counts (k, n-k) depends only on k, not on p: freeze
    // the response map and each response's payoff line once.
    let tau_tie = game.tie_tolerance();
    let responses: Vec<usize> = (0..=n)
        .map(|k| {
            let weights = [k as f64 / n as f64, (n - k) as f64 / n as f64];
            favored_response(game, &weights, tau_tie)
        })
        .collect();
    let slopes: Vec<f64> =
        (0..game.num_responses()).map(|j| game.leader[0][j] - game.leader[1][j]).collect();
    let intercepts: Vec<f64> = (0..game.num_responses()).map(|j| game.leader[1][j]).collect();
    let lf = log_factorials(n);

    let f = |p: f64| -> f64 {
        let (lp, lq) = (p.ln(), (1.0 - p).ln());
        let mut mean = Kahan::default();
        for k in 0..=n {
            let log_prob = lf[n as usize] - lf[k as usize] - lf[(n - k) as usize]
                + if k > 0 { k as f64 * lp } else { 0.0 }
                + if k < n { (n - k) as f64 * lq } else { 0.0 };
            if log_prob == f64::NEG_INFINITY {
                continue;
            }
            let j = responses[k as usize];
            mean.add(log_prob.exp() * (intercepts[j] + slopes[j] * p));
        }
        mean.total()
    };

    let mut best_p = 0.0;
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..=grid_points {
        let p = i as f64 / grid_points as f64;
        let value = f(p);
        if value > best_value {
            best_value = value;
            best_p = p;
        }
    }

    // Golden-section around the best cell; keep whichever of the grid and
    // refined points wins (f_N need not be unimodal on the bracket).
    let cell = 1.0 / grid_points as f64;
    let mut lo = (best_p - cell).max(0.0);
    let mut hi = (best_p + cell).min(1.0);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..refine_iters {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
        if fc > best_value {
            best_value = fc;
            best_p = c;
        }
        if fd > best_value {
            best_value = fd;
            best_p = d;
        }
    }
    Ok((MixedStrategy::binary(best_p)?, best_value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::example_game;

    fn binary(p: f64) -> MixedStrategy {
        MixedStrategy::binary(p).unwrap()
    }

    #[test]
    fn composition_count_matches_binomials() {
        assert_eq!(composition_count(3, 2), 4); // C(4,1)
        assert_eq!(composition_count(100, 5), 4_598_126); // C(104,4)
        assert_eq!(composition_count(2, 3), 6); // C(4,2)
        assert!(composition_count(1_000_000, 20) > (DEFAULT_ENUM_LIMIT as u128));
    }

    #[test]
    fn log_factorials_are_accurate() {
        let lf = log_factorials(20);
        let exact: f64 = (2432902008176640000u64 as f64).ln(); // 20!
        assert!((lf[20] - exact).abs() < 1e-10);
    }

    #[test]
    fn empirical_response_on_example_2() {
        let game = example_game(2).unwrap();
        let tie = EmpiricalDistribution::new(vec![1, 1]).unwrap();
        assert_eq!(empirical_response(&game, &tie), 0); // tie at 1/2 favors leader
        let all_first = EmpiricalDistribution::new(vec![2, 0]).unwrap();
        assert_eq!(empirical_response(&game, &all_first), 1);
        let none_first = EmpiricalDistribution::new(vec![0, 2]).unwrap();
        assert_eq!(empirical_response(&game, &none_first), 0);
    }

    #[test]
    fn exact_payoff_example_1_single_observation() {
        // one draw: p_hat = 1 elicits the lucrative third response
        let game = example_game(1).unwrap();
        let est =
            exact_expected_payoff(&game, &binary(0.5), 1, DEFAULT_ENUM_LIMIT).unwrap();
        assert!((est.mean - 0.75).abs() < 1e-12);
        assert_eq!(est.method, EvalMethod::Exact);
        assert_eq!(est.stderr, 0.0);
        assert_eq!(est.trials, 2);
    }

    #[test]
    fn exact_payoff_example_2_small_n() {
        let game = example_game(2).unwrap();
        let est =
            exact_expected_payoff(&game, &binary(0.5), 2, DEFAULT_ENUM_LIMIT).unwrap();
        assert!((est.mean - 0.25).abs() < 1e-12);
        let est =
            exact_expected_payoff(&game, &binary(0.5), 3, DEFAULT_ENUM_LIMIT).unwrap();
        assert!(est.mean.abs() < 1e-12);
    }

    #[test]
    fn exact_payoff_is_invariant_when_all_columns_pay_alike() {
        let game = NormalFormGame::new(
            "flat",
            vec![vec![0.3, 0.3], vec![0.3, 0.3]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let est =
            exact_expected_payoff(&game, &binary(0.7), 6, DEFAULT_ENUM_LIMIT).unwrap();
        assert!((est.mean - 0.3).abs() < 1e-12);
    }

    #[test]
    fn response_distribution_examples() {
        let game = example_game(2).unwrap();
        let dist = response_distribution(&game, &binary(0.5), 1, DEFAULT_ENUM_LIMIT).unwrap();
        assert!((dist[0] - 0.5).abs() < 1e-12);
        assert!((dist[1] - 0.5).abs() < 1e-12);

        let game = example_game(1).unwrap();
        let dist = response_distribution(&game, &binary(0.5), 2, DEFAULT_ENUM_LIMIT).unwrap();
        assert!((dist[0] - 0.75).abs() < 1e-12); // includes the tie at p_hat = 1/2
        assert!(dist[1].abs() < 1e-12);
        assert!((dist[2] - 0.25).abs() < 1e-12);
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // ... and the matching expectation
        let est =
            exact_expected_payoff(&game, &binary(0.5), 2, DEFAULT_ENUM_LIMIT).unwrap();
        assert!((est.mean - 0.625).abs() < 1e-12);
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let game = crate::ensembles::random_security_game(5, 1).unwrap();
        let x = MixedStrategy::uniform(5);
        let err = exact_expected_payoff(&game, &x, 200, 1_000_000).unwrap_err();
        match err {
            Error::EnumerationTooLarge { needed, limit } => {
                assert_eq!(limit, 1_000_000);
                assert_eq!(needed, composition_count(200, 5));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_n_and_zero_trials_are_rejected() {
        let game = example_game(2).unwrap();
        let x = binary(0.5);
        assert!(matches!(
            exact_expected_payoff(&game, &x, 0, DEFAULT_ENUM_LIMIT),
            Err(Error::InvalidN(0))
        ));
        assert!(matches!(
            mc_expected_payoff(&game, &x, 0, 10, 1),
            Err(Error::InvalidN(0))
        ));
        assert!(matches!(
            mc_expected_payoff(&game, &x, 5, 0, 1),
            Err(Error::InvalidTrials(0))
        ));
    }

    #[test]
    fn mc_on_a_pure_commitment_has_zero_variance() {
        let game = example_game(2).unwrap();
        let est =
            mc_expected_payoff(&game, &MixedStrategy::pure(2, 0), 10, 100, 7).unwrap();
        // every estimate is p_hat = 1, response 1, payoff -1
        assert_eq!(est.mean, -1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn mc_is_seed_deterministic_and_matches_exact() {
        let game = example_game(2).unwrap();
        let x = binary(0.5);
        let a = mc_expected_payoff(&game, &x, 3, 20_000, 42).unwrap();
        let b = mc_expected_payoff(&game, &x, 3, 20_000, 42).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let c = mc_expected_payoff(&game, &x, 3, 20_000, 43).unwrap();
        assert_ne!(a.mean.to_bits(), c.mean.to_bits());
        // exact value is 0; the estimate should sit within 4 standard errors
        assert!(a.mean.abs() <= 4.0 * a.stderr, "mean {} stderr {}", a.mean, a.stderr);
    }

    #[test]
    fn binomial_specialization_matches_general_enumeration() {
        for id in 1..=3 {
            let game = example_game(id).unwrap();
            for n in [1u64, 2, 7, 14, 30] {
                for p in [0.0, 0.2, 0.5, 5.0 / 7.0, 1.0] {
                    let fast = binomial_expected_payoff(&game, p, n).unwrap();
                    let slow = exact_expected_payoff(
                        &game,
                        &binary(p),
                        n,
                        DEFAULT_ENUM_LIMIT,
                    )
                    .unwrap()
                    .mean;
                    assert!(
                        (fast - slow).abs() < 1e-12,
                        "game {id} n {n} p {p}: {fast} vs {slow}"
                    );
                }
            }
        }
    }

    #[test]
    fn brute_force_on_example_2_with_one_observation() {
        // f_1(p) = p - 2p^2, maximized at p = 1/4 with value 1/8
        let game = example_game(2).unwrap();
        let (x, value) = brute_force_optimum_2xn(&game, 1, 1000, 40).unwrap();
        assert!((x.weights()[0] - 0.25).abs() < 1e-6);
        assert!((value - 0.125).abs() < 1e-9);
    }

    #[test]
    fn brute_force_on_example_1_with_one_observation() {
        // f_1(p) = 4p - 5p^2, maximized at p = 2/5 with value 4/5
        let game = example_game(1).unwrap();
        let (x, value) = brute_force_optimum_2xn(&game, 1, 1000, 40).unwrap();
        assert!((x.weights()[0] - 0.4).abs() < 1e-6);
        assert!((value - 0.8).abs() < 1e-9);
    }

    #[test]
    fn brute_force_beats_the_ideal_commitment_under_estimation() {
        let game = example_game(2).unwrap();
        for n in [1u64, 4, 16] {
            let (_, value) = brute_force_optimum_2xn(&game, n, 400, 30).unwrap();
            let at_ideal = binomial_expected_payoff(&game, 0.5, n).unwrap();
            assert!(value >= at_ideal - 1e-12, "n = {n}");
        }
    }

    #[test]
    fn brute_force_rejects_wider_games() {
        let game = crate::ensembles::random_security_game(3, 5).unwrap();
        assert!(matches!(
            brute_force_optimum_2xn(&game, 5, 100, 10),
            Err(Error::WrongDimension { expected: 2, got: 3 })
        ));
    }
}
