//! Tail bounds and divergences used as certificates.
//!
//! Everything here is a stand-alone numeric bound: binary/multinomial
//! concentration for the follower's empirical estimate (Hoeffding, a
//! Devroye-style total-variation tail, Sanov's large-deviations bound over a
//! best-response region) and the KL divergence they are built from. All
//! probabilities are clamped into `[0, 1]`; KL works in nats.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::polytope::HPolytope;
use crate::rng::CounterRng;

/// Fixed stream key for the deterministic "random" restarts of the Sanov
/// minimizer; restarts reproduce bit-for-bit across runs and platforms.
const SANOV_RESTART_KEY: u64 = 0x5341_4E4F_5652_4E47;
/// Number of perturbed restarts after the Chebyshev-center start.
const SANOV_RESTARTS: u64 = 20;
/// Coordinate-wise half-width of the restart perturbation.
const RESTART_SPREAD: f64 = 0.25;
/// Halfspace-violation level treated as feasible by the projector.
const PROJECTION_TOL: f64 = 1e-12;

/// A probability upper bound together with its validity precondition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBound {
    /// The bound, clamped into `[0, 1]`.
    pub value: f64,
    /// Whether the precondition in `condition` holds for these arguments.
    pub valid: bool,
    /// Human-readable statement of the precondition.
    pub condition: String,
}

/// `KL(q || x) = sum_i q_i ln(q_i / x_i)` in nats, with `0 ln 0 = 0` and
/// `+inf` whenever `q` puts mass where `x` has none.
pub fn kl_divergence(q: &MixedStrategy, x: &MixedStrategy) -> f64 {
    assert_eq!(q.len(), x.len(), "divergence needs equal-length distributions");
    kl_terms(q.weights(), x.weights())
}

fn kl_terms(q: &[f64], x: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&qi, &xi) in q.iter().zip(x) {
        if qi <= 0.0 {
            continue;
        }
        if xi <= 0.0 {
            return f64::INFINITY;
        }
        total += qi * (qi / xi).ln();
    }
    total
}

/// `exp(-2 N gap^2)`: probability that a `[0,1]`-bounded sample mean sits
/// `gap` or more above its expectation. Always valid.
pub fn hoeffding_tail(n: u64, gap: f64) -> TailBound {
    let value = (-2.0 * n as f64 * gap * gap).exp().min(1.0);
    TailBound { value, valid: true, condition: "always valid (bounded samples)".to_owned() }
}

/// `3 exp(-N delta^2 / 25)`: probability that the empirical distribution of
/// `N` draws from an `m`-outcome distribution is `delta` or more away in
/// total variation. Valid only when `delta >= sqrt(20 m / N)`.
pub fn devroye_tail(n: u64, delta: f64, m: usize) -> TailBound {
    let value = (3.0 * (-(n as f64) * delta * delta / 25.0).exp()).min(1.0);
    let threshold = (20.0 * m as f64 / n as f64).sqrt();
    TailBound {
        value,
        valid: delta >= threshold,
        condition: format!("requires delta >= sqrt(20m/N) = {threshold:.6}"),
    }
}

/// Sanov upper bound `(N+1)^m exp(-N inf_KL)` on the probability that the
/// empirical distribution of `N` draws from `x` lands in `region`, where
/// `inf_KL` is the infimum of `KL(z || x)` over the region (in reduced
/// coordinates; see [`kl_infimum`]). Always a valid upper bound. When the
/// search finds no point of finite divergence the trivial bound 1 is
/// returned rather than an unsubstantiated small value.
pub fn sanov_region_bound(
    x: &MixedStrategy,
    region: &HPolytope,
    n: u64,
    max_iters: usize,
) -> Result<TailBound> {
    let (_, inf_nats) = kl_infimum(x, region, max_iters)?;
    let m = x.len() as f64;
    let value = if inf_nats.is_finite() {
        (m * ((n + 1) as f64).ln() - n as f64 * inf_nats).exp().min(1.0)
    } else {
        1.0
    };
    Ok(TailBound {
        value,
        valid: true,
        condition: "always valid (large-deviations upper bound)".to_owned(),
    })
}

/// Infimum of `z -> KL(z || x)` over `region` (reduced coordinates, lifted to
/// the simplex), by projected-gradient descent with backtracking from the
/// region's Chebyshev center plus 20 deterministic perturbed restarts.
/// KL is convex, so every run chases the same global minimum; the restarts
/// guard against projection stalls on low-dimensional faces. Returns the
/// best reduced-coordinate point and its divergence in nats.
pub fn kl_infimum(
    x: &MixedStrategy,
    region: &HPolytope,
    max_iters: usize,
) -> Result<(Vec<f64>, f64)> {
    if x.len() != region.dim() + 1 {
        return Err(Error::WrongDimension { expected: region.dim() + 1, got: x.len() });
    }
    let (center, _radius) = region.chebyshev_center()?;
    let mut best_point = project(region, &center);
    let mut best_value = kl_at(&best_point, x.weights());
    let runs = std::iter::once(center.clone()).chain((0..SANOV_RESTARTS).map(|restart| {
        let mut stream = CounterRng::derived(SANOV_RESTART_KEY, restart);
        center
            .iter()
            .map(|c| c + stream.uniform(-RESTART_SPREAD, RESTART_SPREAD))
            .collect::<Vec<f64>>()
    }));
    for start in runs {
        let (point, value) = descend(region, x.weights(), &project(region, &start), max_iters);
        if value < best_value {
            best_value = value;
            best_point = point;
        }
    }
    Ok((best_point, best_value))
}

/// One projected-gradient run: monotone descent with halving backtracking,
/// stopping when no step length yields an improvement.
fn descend(
    region: &HPolytope,
    x: &[f64],
    start: &[f64],
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let mut point = start.to_vec();
    let mut value = kl_at(&point, x);
    for _ in 0..max_iters {
        let gradient = kl_gradient(&point, x);
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..50 {
            let trial: Vec<f64> =
                point.iter().zip(&gradient).map(|(p, g)| p - step * g).collect();
            let candidate = project(region, &trial);
            let candidate_value = kl_at(&candidate, x);
            if candidate_value < value - 1e-15 {
                point = candidate;
                value = candidate_value;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (point, value)
}

/// Lift a reduced point to the simplex, flooring slightly-negative
/// coordinates produced by the projector at zero.
fn lift(reduced: &[f64]) -> Vec<f64> {
    let mut full: Vec<f64> = reduced.iter().map(|v| v.max(0.0)).collect();
    full.push((1.0 - reduced.iter().sum::<f64>()).max(0.0));
    full
}

fn kl_at(reduced: &[f64], x: &[f64]) -> f64 {
    kl_terms(&lift(reduced), x)
}

/// Gradient of `KL(lift(y) || x)` in reduced coordinates:
/// `ln(z_k / x_k) - ln(z_m / x_m)`, with logs floored so boundary points get
/// a large finite push instead of NaN.
fn kl_gradient(reduced: &[f64], x: &[f64]) -> Vec<f64> {
    let full = lift(reduced);
    let m = x.len() - 1;
    let log_ratio = |i: usize| -> f64 { (full[i].max(1e-300) / x[i].max(1e-300)).ln() };
    let last = log_ratio(m);
    (0..m).map(|i| (log_ratio(i) - last).clamp(-1e6, 1e6)).collect()
}

/// Dykstra's alternating projection onto the intersection of the region's
/// halfspaces. Exact for a single halfspace; converges to the Euclidean
/// projection for intersections, which is all projected-gradient descent
/// needs (any feasible point of lower objective also works).
fn project(region: &HPolytope, point: &[f64]) -> Vec<f64> {
    let mut current = point.to_vec();
    if region.min_slack(&current) >= -PROJECTION_TOL {
        return current;
    }
    let mut corrections = vec![vec![0.0; region.dim()]; region.len()];
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for row in 0..region.len() {
            let normal = region.normal(row);
            let norm_sq: f64 = normal.iter().map(|v| v * v).sum();
            if norm_sq <= f64::EPSILON {
                continue;
            }
            let shifted: Vec<f64> =
                current.iter().zip(&corrections[row]).map(|(c, p)| c + p).collect();
            let violation = crate::game::dot(normal, &shifted) - region.offset(row);
            let projected: Vec<f64> = if violation > 0.0 {
                shifted
                    .iter()
                    .zip(normal)
                    .map(|(s, a)| s - a * violation / norm_sq)
                    .collect()
            } else {
                shifted.clone()
            };
            for i in 0..current.len() {
                corrections[row][i] = shifted[i] - projected[i];
                moved = moved.max((projected[i] - current[i]).abs());
                current[i] = projected[i];
            }
        }
        if moved < 1e-13 && region.min_slack(&current) >= -PROJECTION_TOL {
            break;
        }
    }
    current
}
