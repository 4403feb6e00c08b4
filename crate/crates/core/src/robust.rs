//! Observation-robust commitments.
//!
//! The ideal Stackelberg commitment sits on the boundary of its response
//! region, so a follower estimating it from finitely many plays misresponds
//! about half the time. The fix: retreat from the vertex `y*` along the
//! minimum-norm direction `d` that gives *every* active constraint the same
//! slack (`B_act d = -1`), by a schedule-chosen `delta`. The commitment
//! `y(delta) = y* + delta * d` then keeps the weighted (Dikin) ball
//! `{ z : |B_act (z - y(delta))|_2 <= delta }` inside the region whenever
//! `delta <= Z`, the containment radius computed here, and a
//! Devroye-style concentration bound certifies how rarely the empirical
//! estimate leaves that ball.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{payoff_extremes, MixedStrategy, NormalFormGame};
use crate::polytope::HPolytope;
use crate::stackelberg::{active_row_indices, solve_stackelberg, StackelbergSolution};

/// Residual above which `B_act d = -1` counts as unsolvable.
const DIRECTION_RESIDUAL_TOL: f64 = 1e-8;
/// Relative nullspace component above which a row escapes the active span.
const ESCAPE_TOL: f64 = 1e-8;
/// Ratio-test coefficients below this bound impose no constraint.
const RATIO_COEF_TOL: f64 = 1e-12;
/// Singular values below `sigma_max * SIGMA_RTOL` are treated as zero.
const SIGMA_RTOL: f64 = 1e-10;
/// Hard cap on `delta_glob` (deviations are simplex-scale distances).
const DELTA_GLOB_CAP: f64 = 1.0;

/// Why the pipeline produced the commitment it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustStatus {
    /// Normal case: a positive retreat along the uniform-slack direction.
    Robustified,
    /// The Stackelberg commitment is pure; the empirical estimate of a
    /// deterministic strategy is exact, so no retreat is taken.
    PureStackelberg,
    /// The active rows admit no uniform-slack direction (e.g. the region is
    /// a single point); the unretreated commitment is returned.
    DegenerateVertex,
}

/// A deviation-robust commitment with its certificates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustCommitment {
    /// The retreated strategy `x_N`.
    pub commitment: MixedStrategy,
    /// Retreat magnitude actually taken.
    pub delta: f64,
    /// Uniform-slack direction `d` in reduced coordinates.
    pub direction: Vec<f64>,
    /// `delta * |d|_1`: the reduced-coordinate L1 distance retreated.
    pub l1_step: f64,
    /// Largest feasible retreat along `d`.
    pub delta_glob: f64,
    /// Dikin containment radius (0 on nullspace escape).
    pub delta_z: f64,
    /// Misresponse probability bound `min(1, 3 exp(-N delta^2 / (25 sigma^2)))`.
    pub epsilon: f64,
    /// Whether the sample-size condition `N >= 20 m sigma^2 / delta^2` holds,
    /// i.e. whether `epsilon` is a certified bound.
    pub epsilon_valid: bool,
    /// Schedule exponent used.
    pub p_exponent: f64,
    /// Pipeline outcome.
    pub status: RobustStatus,
    /// True when the containment radius fell back to `delta_glob / 2`
    /// because an inactive row escaped the active row space.
    pub dikin_fallback: bool,
}

// ---------------------------------------------------------------------------
// Linear-algebra helpers over the active block
// ---------------------------------------------------------------------------

struct ActiveBlock {
    matrix: DMatrix<f64>,
    svd: nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
    sigma_max: f64,
}

impl ActiveBlock {
    fn new(active_normals: &[Vec<f64>]) -> Self {
        assert!(!active_normals.is_empty(), "active set must be non-empty");
        let rows = active_normals.len();
        let cols = active_normals[0].len();
        let matrix = DMatrix::from_row_iterator(
            rows,
            cols,
            active_normals.iter().flat_map(|r| r.iter().copied()),
        );
        let svd = matrix.clone().svd(true, true);
        let sigma_max = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
        ActiveBlock { matrix, svd, sigma_max }
    }

    fn sigma_cut(&self) -> f64 {
        self.sigma_max * SIGMA_RTOL
    }

    /// Moore-Penrose pseudo-inverse applied to `v`.
    fn pinv_apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let pinv = self
            .svd
            .clone()
            .pseudo_inverse(self.sigma_cut())
            .expect("SVD of the active block was computed");
        pinv * v
    }

    /// `|pinv(B)^T r|_2`: the Dikin support coefficient of row `r`.
    fn support_coefficient(&self, r: &DVector<f64>) -> f64 {
        let pinv = self
            .svd
            .clone()
            .pseudo_inverse(self.sigma_cut())
            .expect("SVD of the active block was computed");
        (pinv.transpose() * r).norm()
    }

    /// Component of `r` outside the row space of the active block.
    fn escape_component(&self, r: &DVector<f64>) -> f64 {
        let v_t = self.svd.v_t.as_ref().expect("SVD computed with V^T");
        let mut projection = DVector::zeros(r.len());
        for (i, sigma) in self.svd.singular_values.iter().enumerate() {
            if *sigma > self.sigma_cut() {
                let basis_row = v_t.row(i).transpose();
                projection += &basis_row * basis_row.dot(r);
            }
        }
        (r - projection).norm()
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Minimum-Euclidean-norm `d` with `B_act d = -1` (every active row loses
/// one unit of slack per unit of `delta`). Errors with
/// [`Error::DegenerateVertex`] when the system is inconsistent, e.g. when
/// opposite-facing rows pin the vertex from both sides.
pub fn deviation_direction(active_normals: &[Vec<f64>]) -> Result<Vec<f64>> {
    let block = ActiveBlock::new(active_normals);
    let minus_ones = DVector::from_element(active_normals.len(), -1.0);
    let direction = block.pinv_apply(&minus_ones);
    let residual = (&block.matrix * &direction - &minus_ones).amax();
    if residual > DIRECTION_RESIDUAL_TOL {
        return Err(Error::DegenerateVertex { residual });
    }
    Ok(direction.iter().copied().collect())
}

/// Largest feasible retreat: ratio test of every region row that loses slack
/// along `direction`, capped at 1. Active rows gain slack (`<r, d> = -1`) and
/// are skipped by the sign filter automatically.
pub fn max_feasible_delta(region: &HPolytope, y_star: &[f64], direction: &[f64]) -> f64 {
    let mut bound = DELTA_GLOB_CAP;
    for row in 0..region.len() {
        let along = crate::game::dot(region.normal(row), direction);
        if along > RATIO_COEF_TOL {
            let slack = region.slack(row, y_star).max(0.0);
            bound = bound.min(slack / along);
        }
    }
    bound
}

/// The retreated commitment `y* + delta * d`, lifted to the full simplex.
/// Errors with [`Error::OutOfRange`] outside `[0, delta_glob]` (1e-12 slop).
pub fn commit_at_delta(
    y_star: &[f64],
    direction: &[f64],
    delta: f64,
    delta_glob: f64,
) -> Result<MixedStrategy> {
    if !(0.0..=delta_glob + 1e-12).contains(&delta) {
        return Err(Error::OutOfRange { delta, max: delta_glob });
    }
    let point: Vec<f64> =
        y_star.iter().zip(direction).map(|(y, d)| y + delta * d).collect();
    MixedStrategy::from_reduced(&point)
}

/// Dikin containment radius: the largest `delta <= delta_glob` such that the
/// weighted ball `{ z : |B_act (z - y(delta))|_2 <= delta }` satisfies every
/// region row. Per inactive row `r` the ball's support value is
/// `<r, y(delta)> + delta * |pinv(B_act)^T r|_2`, affine in `delta`, so each
/// row contributes one ratio. Errors with [`Error::NullspaceEscape`] when
/// some inactive row has a normal component outside the active row space
/// (the ball is then an unbounded cylinder in that direction and no positive
/// radius is containable).
pub fn compute_z(
    region: &HPolytope,
    y_star: &[f64],
    direction: &[f64],
    active_rows: &[usize],
    delta_glob: f64,
) -> Result<f64> {
    let active_normals: Vec<Vec<f64>> =
        active_rows.iter().map(|&i| region.normal(i).to_vec()).collect();
    let block = ActiveBlock::new(&active_normals);
    let mut bound = delta_glob;
    for row in 0..region.len() {
        if active_rows.contains(&row) {
            continue;
        }
        let r = DVector::from_column_slice(region.normal(row));
        let r_norm = r.norm();
        if r_norm <= RATIO_COEF_TOL {
            continue; // vacuous row
        }
        let escape = block.escape_component(&r);
        if escape > ESCAPE_TOL * r_norm {
            return Err(Error::NullspaceEscape { component: escape });
        }
        let support = block.support_coefficient(&r);
        let along = crate::game::dot(region.normal(row), direction) + support;
        if along > RATIO_COEF_TOL {
            let slack = region.slack(row, y_star).max(0.0);
            bound = bound.min(slack / along);
        }
    }
    Ok(bound)
}

/// The retreat schedule `delta_{N,p} = min(Z * (m/N)^p, 0.99 * delta_glob)`,
/// falling back to `delta_glob / 2` in place of a vanished `Z`. Errors with
/// [`Error::InvalidExponent`] unless `0 < p < 1/2`.
pub fn delta_schedule(
    delta_z: f64,
    delta_glob: f64,
    m: usize,
    n: u64,
    p_exponent: f64,
) -> Result<f64> {
    if !(p_exponent > 0.0 && p_exponent < 0.5) {
        return Err(Error::InvalidExponent(p_exponent));
    }
    if n == 0 {
        return Err(Error::InvalidN(0));
    }
    let base = if delta_z > 0.0 { delta_z } else { 0.5 * delta_glob };
    let scaled = base * (m as f64 / n as f64).powf(p_exponent);
    Ok(scaled.min(0.99 * delta_glob))
}

/// A Devroye-style misresponse certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseCertificate {
    /// `min(1, 3 exp(-N delta^2 / (25 sigma_max^2)))`.
    pub epsilon: f64,
    /// Whether `N >= 20 m sigma_max^2 / delta^2`, the bound's premise.
    pub valid: bool,
    /// Largest singular value of the active block.
    pub sigma_max: f64,
}

/// Probability bound on the follower responding off-region when the
/// commitment keeps Dikin radius `delta`: the empirical estimate must exit
/// the weighted ball, which happens with probability at most `epsilon`.
/// Requires `delta > 0`.
pub fn response_preservation_bound(
    active_normals: &[Vec<f64>],
    delta: f64,
    n: u64,
    m: usize,
) -> Result<ResponseCertificate> {
    if delta <= 0.0 {
        return Err(Error::OutOfRange { delta, max: f64::INFINITY });
    }
    let sigma_max = ActiveBlock::new(active_normals).sigma_max;
    let ratio = delta * delta / (sigma_max * sigma_max);
    let epsilon = (3.0 * (-(n as f64) * ratio / 25.0).exp()).min(1.0);
    let valid = n as f64 >= 20.0 * m as f64 / ratio;
    Ok(ResponseCertificate { epsilon, valid, sigma_max })
}

/// Payoff-gap certificate: with misresponse probability at most `epsilon`,
/// the ideal-vs-robust payoff gap is at most
/// `2 (1 - eps) f_max l1_step + eps (f_star - f_min)`.
pub fn payoff_gap_bound(
    game: &NormalFormGame,
    f_star: f64,
    l1_step: f64,
    epsilon: f64,
) -> f64 {
    let extremes = payoff_extremes(game);
    let eps = epsilon.clamp(0.0, 1.0);
    2.0 * (1.0 - eps) * extremes.f_max * l1_step + eps * (f_star - extremes.f_min)
}

/// Full pipeline: solve, find the active block at the vertex, retreat by the
/// scheduled `delta`, attach certificates. Degenerate cases (pure
/// commitment, inconsistent active rows) return the unretreated commitment
/// with `delta = 0` and an explanatory [`RobustStatus`].
pub fn build_robust_commitment(
    game: &NormalFormGame,
    n: u64,
    p_exponent: f64,
) -> Result<RobustCommitment> {
    let solution = solve_stackelberg(game)?;
    build_robust_from_solution(game, &solution, n, p_exponent)
}

/// [`build_robust_commitment`] reusing an already-computed solution.
pub fn build_robust_from_solution(
    game: &NormalFormGame,
    solution: &StackelbergSolution,
    n: u64,
    p_exponent: f64,
) -> Result<RobustCommitment> {
    if !(p_exponent > 0.0 && p_exponent < 0.5) {
        return Err(Error::InvalidExponent(p_exponent));
    }
    if n == 0 {
        return Err(Error::InvalidN(0));
    }
    let dim = solution.reduced_point.len();
    if game.num_strategies() == 1 || solution.commitment.is_pure(1e-9) {
        return Ok(unretreated(solution, dim, p_exponent, RobustStatus::PureStackelberg));
    }

    let active = active_row_indices(&solution.region, &solution.reduced_point, game.active_tolerance());
    if active.is_empty() {
        return Err(Error::EmptyActiveSet);
    }
    let active_normals: Vec<Vec<f64>> =
        active.iter().map(|&i| solution.region.normal(i).to_vec()).collect();

    let direction = match deviation_direction(&active_normals) {
        Ok(direction) => direction,
        Err(Error::DegenerateVertex { .. }) => {
            return Ok(unretreated(solution, dim, p_exponent, RobustStatus::DegenerateVertex));
        }
        Err(other) => return Err(other),
    };
    let delta_glob =
        max_feasible_delta(&solution.region, &solution.reduced_point, &direction);
    let (delta_z, dikin_fallback) = match compute_z(
        &solution.region,
        &solution.reduced_point,
        &direction,
        &active,
        delta_glob,
    ) {
        Ok(z) => (z, false),
        Err(Error::NullspaceEscape { .. }) => (0.0, true),
        Err(other) => return Err(other),
    };
    let delta = delta_schedule(delta_z, delta_glob, game.num_strategies(), n, p_exponent)?;
    let commitment =
        commit_at_delta(&solution.reduced_point, &direction, delta, delta_glob)?;
    let l1_step = delta * direction.iter().map(|d| d.abs()).sum::<f64>();
    let (epsilon, epsilon_valid) = if delta > 0.0 {
        let cert =
            response_preservation_bound(&active_normals, delta, n, game.num_strategies())?;
        (cert.epsilon, cert.valid)
    } else {
        (1.0, false)
    };
    Ok(RobustCommitment {
        commitment,
        delta,
        direction,
        l1_step,
        delta_glob,
        delta_z,
        epsilon,
        epsilon_valid,
        p_exponent,
        status: RobustStatus::Robustified,
        dikin_fallback,
    })
}

fn unretreated(
    solution: &StackelbergSolution,
    dim: usize,
    p_exponent: f64,
    status: RobustStatus,
) -> RobustCommitment {
    RobustCommitment {
        commitment: solution.commitment.clone(),
        delta: 0.0,
        direction: vec![0.0; dim],
        l1_step: 0.0,
        delta_glob: 0.0,
        delta_z: 0.0,
        epsilon: 1.0,
        epsilon_valid: false,
        p_exponent,
        status,
        dikin_fallback: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::example_game;
    use crate::polytope::RowLabel;

    /// delta for example 2 at (N, p) = (100, 1/4): 0.25 * (2/100)^(1/4).
    fn example_2_delta() -> f64 {
        0.25 * (0.02f64).powf(0.25)
    }

    #[test]
    fn deviation_direction_simple_cases() {
        assert_eq!(deviation_direction(&[vec![1.0]]).unwrap(), vec![-1.0]);
        let d = deviation_direction(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((d[0] + 1.0).abs() < 1e-12 && (d[1] + 1.0).abs() < 1e-12);
        // duplicate rows are consistent
        let d = deviation_direction(&[vec![1.0], vec![1.0]]).unwrap();
        assert!((d[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn deviation_direction_is_minimum_norm() {
        // single row in 2-D: {d : d_1 = -1} has min-norm solution (-1, 0)
        let d = deviation_direction(&[vec![1.0, 0.0]]).unwrap();
        assert!((d[0] + 1.0).abs() < 1e-12);
        assert!(d[1].abs() < 1e-12);
    }

    #[test]
    fn opposed_rows_are_degenerate() {
        let err = deviation_direction(&[vec![1.0], vec![-1.0]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateVertex { .. }));
    }

    #[test]
    fn example_2_pipeline_quantities() {
        let game = example_game(2).unwrap();
        let solution = solve_stackelberg(&game).unwrap();
        let active = active_row_indices(&solution.region, &solution.reduced_point, game.active_tolerance());
        assert_eq!(active.len(), 1);
        assert_eq!(solution.region.labels()[active[0]], RowLabel::Indifference { other: 1 });

        let direction = deviation_direction(&[solution.region.normal(active[0]).to_vec()]).unwrap();
        assert!((direction[0] + 1.0).abs() < 1e-12);

        let delta_glob =
            max_feasible_delta(&solution.region, &solution.reduced_point, &direction);
        assert!((delta_glob - 0.5).abs() < 1e-12);

        let delta_z = compute_z(
            &solution.region,
            &solution.reduced_point,
            &direction,
            &active,
            delta_glob,
        )
        .unwrap();
        assert!((delta_z - 0.25).abs() < 1e-12);

        // commit at delta = 0.1 -> p = 0.4, and the active row's slack is 0.1
        let x = commit_at_delta(&solution.reduced_point, &direction, 0.1, delta_glob).unwrap();
        assert!((x.weights()[0] - 0.4).abs() < 1e-12);
        let slack = solution.region.slack(active[0], &[x.weights()[0]]);
        assert!((slack - 0.1).abs() < 1e-12);

        assert!(matches!(
            commit_at_delta(&solution.reduced_point, &direction, 0.6, delta_glob),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn schedule_values_and_validation() {
        let delta = delta_schedule(0.25, 0.5, 2, 100, 0.25).unwrap();
        assert!((delta - example_2_delta()).abs() < 1e-12);
        assert!((delta - 0.0940).abs() < 1e-4);
        // large N shrinks the step; tiny N caps at 0.99 delta_glob
        let big = delta_schedule(0.25, 0.5, 2, 1, 0.25).unwrap();
        assert!(big <= 0.495 + 1e-15);
        assert!(delta_schedule(0.25, 0.5, 2, 10_000, 0.25).unwrap() < delta);
        assert!(matches!(delta_schedule(0.25, 0.5, 2, 100, 0.6), Err(Error::InvalidExponent(_))));
        assert!(matches!(delta_schedule(0.25, 0.5, 2, 100, 0.0), Err(Error::InvalidExponent(_))));
        // fallback: delta_z = 0 uses delta_glob / 2 as the base
        let fallback = delta_schedule(0.0, 0.5, 2, 100, 0.25).unwrap();
        assert!((fallback - example_2_delta()).abs() < 1e-12);
    }

    #[test]
    fn certificate_matches_the_formula() {
        let delta = example_2_delta();
        let cert = response_preservation_bound(&[vec![1.0]], delta, 100, 2).unwrap();
        assert!((cert.sigma_max - 1.0).abs() < 1e-12);
        assert_eq!(cert.epsilon, 1.0); // 3 exp(-0.035) clamps
        assert!(!cert.valid); // needs N >= ~4526
        let cert = response_preservation_bound(&[vec![1.0]], delta, 10_000, 2).unwrap();
        assert!((cert.epsilon - 0.0874).abs() < 1e-4);
        assert!(cert.valid);
        assert!(response_preservation_bound(&[vec![1.0]], 0.0, 10, 2).is_err());
    }

    #[test]
    fn gap_bound_matches_the_formula() {
        let game = example_game(2).unwrap();
        let bound = payoff_gap_bound(&game, 0.5, 0.094, 0.1);
        assert!((bound - 0.3192).abs() < 1e-9);
        // epsilon clamps into [0, 1]
        let vacuous = payoff_gap_bound(&game, 0.5, 0.094, 7.0);
        assert!((vacuous - 1.5).abs() < 1e-12);
    }

    #[test]
    fn build_robust_on_example_2() {
        let game = example_game(2).unwrap();
        let robust = build_robust_commitment(&game, 100, 0.25).unwrap();
        assert_eq!(robust.status, RobustStatus::Robustified);
        assert!(!robust.dikin_fallback);
        assert!((robust.delta - example_2_delta()).abs() < 1e-12);
        assert!((robust.commitment.weights()[0] - (0.5 - example_2_delta())).abs() < 1e-12);
        assert!((robust.commitment.weights()[0] - 0.406).abs() < 1e-3);
        assert!((robust.delta_glob - 0.5).abs() < 1e-12);
        assert!((robust.delta_z - 0.25).abs() < 1e-12);
        assert!((robust.l1_step - robust.delta).abs() < 1e-12); // |d|_1 = 1
        assert_eq!(robust.epsilon, 1.0);
        assert!(!robust.epsilon_valid);
    }

    #[test]
    fn pure_stackelberg_vertices_are_not_retreated() {
        let matrix = vec![vec![2.0, 0.0], vec![0.0, 1.0]];
        let game = NormalFormGame::new("aligned", matrix.clone(), matrix).unwrap();
        let robust = build_robust_commitment(&game, 100, 0.25).unwrap();
        assert_eq!(robust.status, RobustStatus::PureStackelberg);
        assert_eq!(robust.delta, 0.0);
        assert!((robust.commitment.weights()[0] - 1.0).abs() < 1e-9);
        assert_eq!(robust.epsilon, 1.0);
        assert!(!robust.epsilon_valid);
    }

    #[test]
    fn square_active_block_single_ratio() {
        // box corner: active rows y1 <= 1/2, y2 <= 1/2; inactive y1 >= 0.
        let mut region = HPolytope::new(2);
        region.push_row(vec![1.0, 0.0], 0.5, RowLabel::Indifference { other: 1 });
        region.push_row(vec![0.0, 1.0], 0.5, RowLabel::Indifference { other: 2 });
        region.push_row(vec![-1.0, 0.0], 0.0, RowLabel::NonNeg { coord: 0 });
        let y_star = [0.5, 0.5];
        let direction = deviation_direction(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let delta_glob = max_feasible_delta(&region, &y_star, &direction);
        assert!((delta_glob - 0.5).abs() < 1e-12);
        let z = compute_z(&region, &y_star, &direction, &[0, 1], delta_glob).unwrap();
        // support coefficient of (-1, 0) is 1; <r, d> = 1; slack 0.5 -> ratio 0.25
        assert!((z - 0.25).abs() < 1e-12);
        // tightness: at delta = z the inactive row's support value hits 0
        let y_z: Vec<f64> = y_star.iter().zip(&direction).map(|(y, d)| y + z * d).collect();
        let support_value = -y_z[0] + z * 1.0;
        assert!(support_value.abs() < 1e-12);
    }

    #[test]
    fn nullspace_escape_is_detected() {
        // active row spans only the y1 axis; inactive row y2 <= 0.5 escapes
        let mut region = HPolytope::new(2);
        region.push_row(vec![1.0, 0.0], 0.5, RowLabel::Indifference { other: 1 });
        region.push_row(vec![0.0, 1.0], 0.5, RowLabel::SumCap);
        let y_star = [0.5, 0.2];
        let direction = deviation_direction(&[vec![1.0, 0.0]]).unwrap();
        let err = compute_z(&region, &y_star, &direction, &[0], 1.0).unwrap_err();
        assert!(matches!(err, Error::NullspaceEscape { .. }));
    }

    #[test]
    fn no_inactive_rows_returns_delta_glob() {
        let mut region = HPolytope::new(1);
        region.push_row(vec![1.0], 0.5, RowLabel::Indifference { other: 1 });
        let direction = deviation_direction(&[vec![1.0]]).unwrap();
        let z = compute_z(&region, &[0.5], &direction, &[0], 0.75).unwrap();
        assert_eq!(z, 0.75);
    }

    #[test]
    fn uniform_slack_holds_along_the_retreat() {
        let game = example_game(3).unwrap();
        let solution = solve_stackelberg(&game).unwrap();
        let robust = build_robust_from_solution(&game, &solution, 1000, 0.25).unwrap();
        assert_eq!(robust.status, RobustStatus::Robustified);
        assert!(robust.delta > 0.0);
        let active = active_row_indices(
            &solution.region,
            &solution.reduced_point,
            game.active_tolerance(),
        );
        for &row in &active {
            let slack = solution.region.slack(row, robust.commitment.reduced());
            assert!(
                (slack - robust.delta).abs() < 1e-8,
                "active row {row} slack {slack} vs delta {}",
                robust.delta
            );
        }
        // example 3 shares example 2's geometry at the vertex
        let expected_delta = 0.25 * (2.0f64 / 1000.0).powf(0.25);
        assert!((robust.delta - expected_delta).abs() < 1e-12);
    }

    #[test]
    fn robust_commitment_serializes_with_all_fields() {
        let game = example_game(2).unwrap();
        let robust = build_robust_commitment(&game, 50, 0.25).unwrap();
        let json = serde_json::to_value(&robust).unwrap();
        for field in [
            "commitment",
            "delta",
            "direction",
            "l1_step",
            "delta_glob",
            "delta_z",
            "epsilon",
            "epsilon_valid",
            "p_exponent",
            "status",
            "dikin_fallback",
        ] {
            assert!(json.get(field).is_some(), "missing {field}");
        }
        assert_eq!(json["status"], "robustified");
    }

    #[test]
    fn invalid_exponent_and_n_are_rejected() {
        let game = example_game(2).unwrap();
        assert!(matches!(
            build_robust_commitment(&game, 100, 0.5),
            Err(Error::InvalidExponent(_))
        ));
        assert!(matches!(build_robust_commitment(&game, 0, 0.25), Err(Error::InvalidN(0))));
    }
}
