//! Built-in example games and seeded random security-game ensembles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ideal_payoff, MixedStrategy, NormalFormGame};
use crate::rng::{derive_stream, CounterRng};

/// The three canonical 2-row example games.
///
/// Each is checked at construction time: the computed ideal payoff must match
/// the game's known piecewise-linear form on a 1001-point uniform grid of
/// commitments (so `p = 1/2` lands exactly on a grid point while `5/7` and
/// `2/3` never do). All three have ideal optimum `f* = 1/2` at `p* = 1/2`.
///
/// - **1** — zero-sum `2 x 3`: payoff lines `p`, `1-p`, `3-4p`; the follower
///   minimizes, so `f_inf(p) = min` of the lines.
/// - **2** — `2 x 2`: lines `p` on `[0, 1/2]` and `-p` after the follower
///   switches.
/// - **3** — `2 x 3`: lines `p`, `1/2-p`, `3-4p` with switches at `1/2` and
///   `5/7`; the third response is good for the leader, unlike the second.
pub fn example_game(id: u32) -> Result<NormalFormGame> {
    let (name, leader, follower): (&str, Vec<Vec<f64>>, Vec<Vec<f64>>) = match id {
        1 => (
            "example1",
            vec![vec![1.0, 0.0, -1.0], vec![0.0, 1.0, 3.0]],
            vec![vec![-1.0, 0.0, 1.0], vec![0.0, -1.0, -3.0]],
        ),
        2 => (
            "example2",
            vec![vec![1.0, -1.0], vec![0.0, 0.0]],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        ),
        3 => (
            "example3",
            vec![vec![1.0, -0.5, -1.0], vec![0.0, 0.5, 3.0]],
            vec![vec![-1.0, 0.0, 2.0], vec![1.0, 0.0, -5.0]],
        ),
        other => return Err(Error::InvalidId(other)),
    };
    let game = NormalFormGame::new(name, leader, follower)?;
    verify_example(&game, id)?;
    Ok(game)
}

/// The known ideal-payoff curve of example `id` at commitment `(p, 1-p)`.
fn reference_ideal(id: u32, p: f64) -> f64 {
    match id {
        1 => {
            if p <= 0.5 {
                p
            } else if p <= 2.0 / 3.0 {
                1.0 - p
            } else {
                3.0 - 4.0 * p
            }
        }
        2 => {
            if p <= 0.5 {
                p
            } else {
                -p
            }
        }
        3 => {
            if p <= 0.5 {
                p
            } else if p <= 5.0 / 7.0 {
                0.5 - p
            } else {
                3.0 - 4.0 * p
            }
        }
        _ => unreachable!("verified ids are 1..=3"),
    }
}

fn verify_example(game: &NormalFormGame, id: u32) -> Result<()> {
    for step in 0..=1000u32 {
        let p = step as f64 / 1000.0;
        let x = MixedStrategy::binary(p)?;
        let computed = ideal_payoff(game, &x);
        let expected = reference_ideal(id, p);
        if (computed - expected).abs() > 1e-9 {
            return Err(Error::InvalidGame(format!(
                "example {id} ideal payoff at p={p} is {computed}, expected {expected}"
            )));
        }
    }
    Ok(())
}

/// Parameters of a random security game over `targets` targets.
///
/// The defender (leader) covers one target, the attacker (follower) attacks
/// one. An attack on a *covered* target pays the defender its reward and the
/// attacker its penalty; on an uncovered target the roles flip. Rewards are
/// uniform in `[0, 1)`, penalties uniform in `[-1, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityGameParams {
    pub targets: usize,
    pub defender_rewards: Vec<f64>,
    pub attacker_rewards: Vec<f64>,
    pub defender_penalties: Vec<f64>,
    pub attacker_penalties: Vec<f64>,
}

impl SecurityGameParams {
    /// Draw parameters from the counter stream of `seed`, in declaration
    /// order: defender rewards, attacker rewards, defender penalties,
    /// attacker penalties (each `targets` draws).
    pub fn random(targets: usize, seed: u64) -> Self {
        let mut rng = CounterRng::new(seed);
        let mut draws = |lo: f64, hi: f64| -> Vec<f64> {
            (0..targets).map(|_| rng.uniform(lo, hi)).collect()
        };
        SecurityGameParams {
            targets,
            defender_rewards: draws(0.0, 1.0),
            attacker_rewards: draws(0.0, 1.0),
            defender_penalties: draws(-1.0, 0.0),
            attacker_penalties: draws(-1.0, 0.0),
        }
    }

    /// Materialize the payoff matrices: `A[i][j]` is the defender reward of
    /// target `j` when `i == j` (covered) else its penalty; `B[i][j]` is the
    /// attacker penalty of `j` when covered else its reward.
    pub fn to_game(&self, name: impl Into<String>) -> Result<NormalFormGame> {
        let m = self.targets;
        let leader = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            self.defender_rewards[j]
                        } else {
                            self.defender_penalties[j]
                        }
                    })
                    .collect()
            })
            .collect();
        let follower = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if i == j {
                            self.attacker_penalties[j]
                        } else {
                            self.attacker_rewards[j]
                        }
                    })
                    .collect()
            })
            .collect();
        NormalFormGame::new(name, leader, follower)
    }
}

/// One random security game, named `security-s{seed}-m{targets}`.
pub fn random_security_game(targets: usize, seed: u64) -> Result<NormalFormGame> {
    SecurityGameParams::random(targets, seed)
        .to_game(format!("security-s{seed}-m{targets}"))
}

/// `count` security games over `targets` targets; game `k` is drawn from the
/// child stream `derive_stream(master_seed, k)`.
pub fn generate_ensemble(
    count: usize,
    targets: usize,
    master_seed: u64,
) -> Result<Vec<NormalFormGame>> {
    (0..count)
        .map(|k| {
            let seed = derive_stream(master_seed, k as u64);
            SecurityGameParams::random(targets, seed)
                .to_game(format!("security-e{master_seed}-g{k}-m{targets}"))
        })
        .collect()
}
