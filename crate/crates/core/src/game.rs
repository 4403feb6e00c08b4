//! Finite two-player games in normal form, from the leader's point of view.
//!
//! The leader commits to a mixed strategy `x` over `m` rows; the follower
//! observes (or estimates) `x` and picks one of `n` column responses to
//! maximize its own expected payoff `<x, b_j>`, breaking exact ties in the
//! leader's favor and remaining ties by lowest index. Everything downstream —
//! regions, the commitment LP, the robust retreat — is phrased in *reduced*
//! coordinates `y = (x_1 .. x_{m-1})` with `x_m = 1 - sum(y)` substituted
//! out, so payoffs become affine functions `<y, c_j> + d_j` on the reduced
//! simplex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{HPolytope, RowLabel};

/// Tolerance for validating simplex membership of strategy weights.
pub const TAU_SIMPLEX: f64 = 1e-9;

/// Base tolerance for follower-payoff ties; scaled by `1 + max|B|` per game.
pub const TAU_TIE_BASE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A bimatrix game: `leader[i][j]` / `follower[i][j]` are the payoffs when
/// the leader plays row `i` and the follower plays column `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormGame {
    pub name: String,
    #[serde(rename = "leader_payoffs")]
    pub leader: Vec<Vec<f64>>,
    #[serde(rename = "follower_payoffs")]
    pub follower: Vec<Vec<f64>>,
}

impl NormalFormGame {
    /// Validates shape (non-empty, rectangular, matching) and finiteness.
    pub fn new(
        name: impl Into<String>,
        leader: Vec<Vec<f64>>,
        follower: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let game = NormalFormGame { name: name.into(), leader, follower };
        game.validate()?;
        Ok(game)
    }

    /// Parse the on-disk JSON format
    /// `{"name", "leader_payoffs", "follower_payoffs"}` (row-major `m x n`).
    pub fn from_json(text: &str) -> Result<Self> {
        let game: NormalFormGame =
            serde_json::from_str(text).map_err(|e| Error::GameLoad(e.to_string()))?;
        game.validate().map_err(|e| Error::GameLoad(e.to_string()))?;
        Ok(game)
    }

    fn validate(&self) -> Result<()> {
        let m = self.leader.len();
        if m == 0 {
            return Err(Error::InvalidGame("no leader strategies".into()));
        }
        let n = self.leader[0].len();
        if n == 0 {
            return Err(Error::InvalidGame("no follower responses".into()));
        }
        if self.follower.len() != m {
            return Err(Error::InvalidGame(format!(
                "leader has {m} rows but follower has {}",
                self.follower.len()
            )));
        }
        for (i, row) in self.leader.iter().chain(self.follower.iter()).enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGame(format!(
                    "row {} has {} entries, expected {n}",
                    i % m,
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidGame(format!("non-finite payoff {bad}")));
            }
        }
        Ok(())
    }

    /// Number of leader strategies (rows).
    pub fn num_strategies(&self) -> usize {
        self.leader.len()
    }

    /// Number of follower responses (columns).
    pub fn num_responses(&self) -> usize {
        self.leader[0].len()
    }

    /// Leader's expected payoff `<x, a_j>` for response `j`.
    pub fn leader_payoff(&self, x: &MixedStrategy, j: usize) -> f64 {
        x.weights().iter().zip(&self.leader).map(|(xi, row)| xi * row[j]).sum()
    }

    /// Follower's expected payoff `<x, b_j>` for response `j`.
    pub fn follower_payoff(&self, x: &MixedStrategy, j: usize) -> f64 {
        x.weights().iter().zip(&self.follower).map(|(xi, row)| xi * row[j]).sum()
    }

    /// Follower tie tolerance for this game: `1e-9 * (1 + max|B|)`.
    pub fn tie_tolerance(&self) -> f64 {
        let max_abs = self
            .follower
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        TAU_TIE_BASE * (1.0 + max_abs)
    }

    /// Tolerance for deciding which region rows are active at a vertex:
    /// `1e-7 * (1 + max|B|)`.
    pub fn active_tolerance(&self) -> f64 {
        self.tie_tolerance() * 100.0
    }
}

/// A point of the leader's strategy simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedStrategy {
    weights: Vec<f64>,
}

impl MixedStrategy {
    /// Validates `weights >= -TAU_SIMPLEX` and `sum = 1 ± TAU_SIMPLEX`, then
    /// clamps each entry into `[0, 1]` and renormalizes.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidStrategy("no weights".into()));
        }
        if let Some(bad) = weights.iter().find(|w| !w.is_finite() || **w < -TAU_SIMPLEX) {
            return Err(Error::InvalidStrategy(format!("weight {bad} is negative")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TAU_SIMPLEX {
            return Err(Error::InvalidStrategy(format!("weights sum to {sum}, not 1")));
        }
        let clamped: Vec<f64> = weights.iter().map(|w| w.clamp(0.0, 1.0)).collect();
        let total: f64 = clamped.iter().sum();
        Ok(MixedStrategy { weights: clamped.iter().map(|w| w / total).collect() })
    }

    /// The pure strategy `e_i` over `m` rows.
    pub fn pure(m: usize, i: usize) -> Self {
        assert!(i < m);
        let mut weights = vec![0.0; m];
        weights[i] = 1.0;
        MixedStrategy { weights }
    }

    /// Uniform mixing over `m` rows.
    pub fn uniform(m: usize) -> Self {
        MixedStrategy { weights: vec![1.0 / m as f64; m] }
    }

    /// Two-row strategy `(p, 1-p)`.
    pub fn binary(p: f64) -> Result<Self> {
        MixedStrategy::new(vec![p, 1.0 - p])
    }

    /// Lift reduced coordinates `y` back to the full simplex.
    pub fn from_reduced(y: &[f64]) -> Result<Self> {
        let sum: f64 = y.iter().sum();
        let mut weights = y.to_vec();
        weights.push(1.0 - sum);
        MixedStrategy::new(weights)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Reduced coordinates: all but the last weight.
    pub fn reduced(&self) -> &[f64] {
        &self.weights[..self.weights.len() - 1]
    }

    /// Whether some single row carries (numerically) all the mass.
    pub fn is_pure(&self, tol: f64) -> bool {
        self.weights.iter().any(|w| *w >= 1.0 - tol)
    }
}

/// The follower's best responses at one strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BestResponseSet {
    /// All responses within the tie tolerance of the best follower payoff,
    /// ascending.
    pub best: Vec<usize>,
    /// The tie-broken response: max leader payoff, then lowest index.
    pub leader_favored: usize,
    /// `best` minus `leader_favored`.
    pub alternates: Vec<usize>,
}

/// A game rewritten over reduced coordinates: payoffs for response `j` are
/// `<y, leader_dirs[j]> + leader_offsets[j]` (and likewise for the follower).
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGame {
    pub m: usize,
    pub n: usize,
    /// Per response `j`, the vector `c_j[i] = A[i][j] - A[m-1][j]`.
    pub leader_dirs: Vec<Vec<f64>>,
    /// Per response `j`, the constant `d_j = A[m-1][j]`.
    pub leader_offsets: Vec<f64>,
    pub follower_dirs: Vec<Vec<f64>>,
    pub follower_offsets: Vec<f64>,
}

impl ReducedGame {
    /// Leader payoff of response `j` at reduced point `y`.
    pub fn leader_payoff(&self, y: &[f64], j: usize) -> f64 {
        dot(&self.leader_dirs[j], y) + self.leader_offsets[j]
    }

    /// Follower payoff of response `j` at reduced point `y`.
    pub fn follower_payoff(&self, y: &[f64], j: usize) -> f64 {
        dot(&self.follower_dirs[j], y) + self.follower_offsets[j]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// The follower's best-response set at `x`, with the leader-favoring tie
/// break: among responses within the tie tolerance of the best follower
/// payoff, prefer max leader payoff, then lowest index.
pub fn follower_best_set(game: &NormalFormGame, x: &MixedStrategy) -> BestResponseSet {
    follower_best_set_with_tol(game, x, game.tie_tolerance())
}

/// [`follower_best_set`] with an explicit tie tolerance.
pub fn follower_best_set_with_tol(
    game: &NormalFormGame,
    x: &MixedStrategy,
    tau_tie: f64,
) -> BestResponseSet {
    assert_eq!(x.len(), game.num_strategies(), "strategy length mismatch");
    let n = game.num_responses();
    let mut top = f64::NEG_INFINITY;
    for j in 0..n {
        top = top.max(game.follower_payoff(x, j));
    }
    let mut best = Vec::new();
    let mut favored = 0;
    let mut favored_payoff = f64::NEG_INFINITY;
    for j in 0..n {
        if game.follower_payoff(x, j) >= top - tau_tie {
            best.push(j);
            let mine = game.leader_payoff(x, j);
            if mine > favored_payoff {
                favored_payoff = mine;
                favored = j;
            }
        }
    }
    let alternates = best.iter().copied().filter(|&j| j != favored).collect();
    BestResponseSet { best, leader_favored: favored, alternates }
}

/// Leader-favored response index only — the allocation-free core of
/// [`follower_best_set`], for enumeration inner loops.
pub fn favored_response(game: &NormalFormGame, weights: &[f64], tau_tie: f64) -> usize {
    let n = game.num_responses();
    let score = |j: usize| -> f64 {
        weights.iter().zip(&game.follower).map(|(xi, row)| xi * row[j]).sum()
    };
    let mut top = f64::NEG_INFINITY;
    for j in 0..n {
        top = top.max(score(j));
    }
    let mut favored = 0;
    let mut favored_payoff = f64::NEG_INFINITY;
    for j in 0..n {
        if score(j) >= top - tau_tie {
            let mine: f64 =
                weights.iter().zip(&game.leader).map(|(xi, row)| xi * row[j]).sum();
            if mine > favored_payoff {
                favored_payoff = mine;
                favored = j;
            }
        }
    }
    favored
}

/// The ideal-observation leader payoff `f_inf(x) = <x, a_{j*(x)}>`: what the
/// leader earns when the follower sees `x` exactly.
pub fn ideal_payoff(game: &NormalFormGame, x: &MixedStrategy) -> f64 {
    let set = follower_best_set(game, x);
    game.leader_payoff(x, set.leader_favored)
}

/// Extreme leader payoffs over pure profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffExtremes {
    /// Largest entry of the leader matrix.
    pub f_max: f64,
    /// Smallest entry of the leader matrix.
    pub f_min: f64,
}

/// Max and min entries of the leader's payoff matrix.
pub fn payoff_extremes(game: &NormalFormGame) -> PayoffExtremes {
    let mut f_max = f64::NEG_INFINITY;
    let mut f_min = f64::INFINITY;
    for row in &game.leader {
        for &v in row {
            f_max = f_max.max(v);
            f_min = f_min.min(v);
        }
    }
    PayoffExtremes { f_max, f_min }
}

/// Rewrite the game over reduced coordinates. Errors with
/// [`Error::DimensionTooSmall`] when the leader has fewer than two rows.
pub fn reduce(game: &NormalFormGame) -> Result<ReducedGame> {
    let m = game.num_strategies();
    let n = game.num_responses();
    if m < 2 {
        return Err(Error::DimensionTooSmall { m });
    }
    let column_dirs = |matrix: &Vec<Vec<f64>>| -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut dirs = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        for j in 0..n {
            dirs.push((0..m - 1).map(|i| matrix[i][j] - matrix[m - 1][j]).collect());
            offsets.push(matrix[m - 1][j]);
        }
        (dirs, offsets)
    };
    let (leader_dirs, leader_offsets) = column_dirs(&game.leader);
    let (follower_dirs, follower_offsets) = column_dirs(&game.follower);
    Ok(ReducedGame { m, n, leader_dirs, leader_offsets, follower_dirs, follower_offsets })
}

/// Closure of the best-response region of response `j` as an H-polytope in
/// reduced coordinates: one indifference row per other response `k`
/// (`<y, b'_k - b'_j> <= d'_j - d'_k`), then the simplex facets. Row order is
/// deterministic: indifference rows by ascending `k`, then non-negativity
/// facets by coordinate, then the sum cap.
pub fn best_response_region(game: &NormalFormGame, j: usize) -> Result<HPolytope> {
    let reduced = reduce(game)?;
    assert!(j < reduced.n, "response index out of range");
    let dim = reduced.m - 1;
    let mut region = HPolytope::new(dim);
    for k in 0..reduced.n {
        if k == j {
            continue;
        }
        let normal: Vec<f64> = (0..dim)
            .map(|i| reduced.follower_dirs[k][i] - reduced.follower_dirs[j][i])
            .collect();
        let offset = reduced.follower_offsets[j] - reduced.follower_offsets[k];
        region.push_row(normal, offset, RowLabel::Indifference { other: k });
    }
    for i in 0..dim {
        let mut normal = vec![0.0; dim];
        normal[i] = -1.0;
        region.push_row(normal, 0.0, RowLabel::NonNeg { coord: i });
    }
    region.push_row(vec![1.0; dim], 1.0, RowLabel::SumCap);
    Ok(region)
}
