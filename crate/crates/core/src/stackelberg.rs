//! The ideal-observation Stackelberg commitment: one LP per follower
//! response over the closure of its best-response region, keeping the best
//! value (ties across responses break by lowest index).

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::{reduce, MixedStrategy, NormalFormGame};
use crate::lp::lp_solve;
use crate::polytope::HPolytope;

/// Absolute tolerance for value ties across regions.
const TAU_VALUE_TIE: f64 = 1e-9;

/// An optimal commitment under exact observation.
///
/// Serializes to `{commitment, response, value, active_rows}` with
/// `active_rows = {normals, offsets}`; the region and reduced point are
/// in-memory conveniences for the robust pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct StackelbergSolution {
    /// Optimal leader strategy `x*`.
    pub commitment: MixedStrategy,
    /// Induced follower response `j*` (0-based).
    pub response: usize,
    /// Ideal-observation value `f*_inf = <x*, a_{j*}>`.
    pub value: f64,
    /// Region rows tight at the solution vertex (unit normals).
    pub active_normals: Vec<Vec<f64>>,
    /// Offsets of the tight rows.
    pub active_offsets: Vec<f64>,
    /// The winning response's region.
    pub region: HPolytope,
    /// `x*` in reduced coordinates.
    pub reduced_point: Vec<f64>,
}

impl Serialize for StackelbergSolution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct ActiveRows<'a> {
            normals: &'a [Vec<f64>],
            offsets: &'a [f64],
        }
        let mut state = serializer.serialize_struct("StackelbergSolution", 4)?;
        state.serialize_field("commitment", self.commitment.weights())?;
        state.serialize_field("response", &self.response)?;
        state.serialize_field("value", &self.value)?;
        state.serialize_field(
            "active_rows",
            &ActiveRows { normals: &self.active_normals, offsets: &self.active_offsets },
        )?;
        state.end()
    }
}

/// Maximize the leader's payoff for response `j` over the closure of its
/// best-response region. `Ok(None)` when the region is empty (the response
/// is never best); the point is returned in reduced coordinates.
pub fn solve_region_lp(
    game: &NormalFormGame,
    j: usize,
) -> Result<Option<(Vec<f64>, f64, HPolytope)>> {
    let reduced = reduce(game)?;
    let region = crate::game::best_response_region(game, j)?;
    match lp_solve(&reduced.leader_dirs[j], &region) {
        Ok(solution) => {
            let value = solution.value + reduced.leader_offsets[j];
            Ok(Some((solution.point, value, region)))
        }
        Err(Error::Infeasible) => Ok(None),
        Err(other) => Err(other),
    }
}

/// Solve the commitment problem: best region LP over all responses, value
/// ties broken by lowest response index. Errors with
/// [`Error::NoFeasibleResponse`] if every region is empty (cannot happen for
/// a valid game — some response is best somewhere — but is reported rather
/// than unwrapped).
///
/// Single-row games (`m = 1`) have nothing to mix: the commitment is the
/// unique pure strategy and the follower's choice at it decides the value.
pub fn solve_stackelberg(game: &NormalFormGame) -> Result<StackelbergSolution> {
    if game.num_strategies() == 1 {
        let commitment = MixedStrategy::pure(1, 0);
        let set = crate::game::follower_best_set(game, &commitment);
        let value = game.leader_payoff(&commitment, set.leader_favored);
        return Ok(StackelbergSolution {
            commitment,
            response: set.leader_favored,
            value,
            active_normals: Vec::new(),
            active_offsets: Vec::new(),
            region: HPolytope::new(0),
            reduced_point: Vec::new(),
        });
    }

    let mut best: Option<(usize, Vec<f64>, f64, HPolytope)> = None;
    for j in 0..game.num_responses() {
        let Some((point, value, region)) = solve_region_lp(game, j)? else {
            continue;
        };
        let improves = match &best {
            None => true,
            Some((_, _, incumbent, _)) => value > incumbent + TAU_VALUE_TIE,
        };
        if improves {
            best = Some((j, point, value, region));
        }
    }
    let (response, reduced_point, value, region) = best.ok_or(Error::NoFeasibleResponse)?;
    let tau_act = game.active_tolerance();
    let (active_normals, active_offsets) = active_constraints(&region, &reduced_point, tau_act)?;
    let commitment = MixedStrategy::from_reduced(&reduced_point)?;
    Ok(StackelbergSolution {
        commitment,
        response,
        value,
        active_normals,
        active_offsets,
        region,
        reduced_point,
    })
}

/// Indices of the rows of `region` tight at `point`:
/// `|<normal, point> - offset| <= tau_act * (1 + |offset|)`.
/// Simplex facets count like any other row.
pub fn active_row_indices(region: &HPolytope, point: &[f64], tau_act: f64) -> Vec<usize> {
    (0..region.len())
        .filter(|&row| {
            let offset = region.offset(row);
            region.slack(row, point).abs() <= tau_act * (1.0 + offset.abs())
        })
        .collect()
}

/// The tight rows of `region` at `point` as a (normals, offsets) pair.
/// Errors with [`Error::EmptyActiveSet`] when nothing is tight.
pub fn active_constraints(
    region: &HPolytope,
    point: &[f64],
    tau_act: f64,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let rows = active_row_indices(region, point, tau_act);
    if rows.is_empty() {
        return Err(Error::EmptyActiveSet);
    }
    let normals = rows.iter().map(|&row| region.normal(row).to_vec()).collect();
    let offsets = rows.iter().map(|&row| region.offset(row)).collect();
    Ok((normals, offsets))
}
