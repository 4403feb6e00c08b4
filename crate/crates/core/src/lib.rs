//! Stackelberg commitments for finite two-player games when the follower
//! best-responds to an *empirical estimate* of the leader's strategy rather
//! than the strategy itself.
//!
//! Module map:
//! - [`game`] — normal-form games, mixed strategies, reduction to simplex
//!   coordinates, best-response sets and regions;
//! - [`polytope`] — labeled H-polytopes backing the regions;
//! - [`lp`] — dense two-phase simplex solver (Bland's rule);
//! - [`stackelberg`] — the ideal-observation commitment via one LP per
//!   best-response region;
//! - [`observation`] — exact and Monte-Carlo evaluation of the expected
//!   payoff `f_N` under `N` observed plays, plus a 2-row brute-force optimum;
//! - [`robust`] — deviation-robust commitments: uniform-slack retreat from
//!   the Stackelberg vertex, Dikin containment radius, schedules and
//!   certificates;
//! - [`bounds`] — KL/Hoeffding/Devroye/Sanov tail bounds;
//! - [`ensembles`] — the built-in example games and random security games;
//! - [`rng`] — counter-based RNG with a documented stream-derivation rule.

pub mod bounds;
pub mod ensembles;
pub mod error;
pub mod game;
pub mod lp;
pub mod observation;
pub mod polytope;
pub mod rng;
pub mod robust;
pub mod stackelberg;

pub use bounds::{devroye_tail, hoeffding_tail, kl_divergence, sanov_region_bound, TailBound};
pub use error::{Error, Result};
pub use game::{
    best_response_region, favored_response, follower_best_set, follower_best_set_with_tol,
    ideal_payoff, payoff_extremes, reduce, BestResponseSet, MixedStrategy, NormalFormGame,
    PayoffExtremes, ReducedGame,
};
pub use lp::{lp_solve, LpSolution};
pub use polytope::{HPolytope, RowLabel};
pub use observation::{
    exact_expected_payoff, mc_expected_payoff, EvalMethod, PayoffEstimate,
};
pub use robust::{build_robust_commitment, RobustCommitment, RobustStatus};
pub use stackelberg::{
    active_constraints, active_row_indices, solve_region_lp, solve_stackelberg,
    StackelbergSolution,
};
