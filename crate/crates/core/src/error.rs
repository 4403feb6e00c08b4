//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Variants are grouped by the subsystem that raises them; the CLI maps
/// `GameLoad`/`Config` onto exit code 2 and the rest onto exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// Payoff matrices are empty, ragged, or non-finite.
    #[error("invalid game: {0}")]
    InvalidGame(String),

    /// A mixed strategy had negative weights or didn't sum to one.
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),

    /// Reduction to simplex coordinates needs at least two leader strategies.
    #[error("game has {m} leader strategies; reduction needs at least 2")]
    DimensionTooSmall { m: usize },

    /// A vector had the wrong length for the game it was used with.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },

    /// The linear program has no feasible point.
    #[error("linear program is infeasible")]
    Infeasible,

    /// The linear program's objective is unbounded above.
    #[error("linear program is unbounded")]
    Unbounded,

    /// No follower response has a non-empty best-response region.
    #[error("no follower response is best anywhere on the simplex")]
    NoFeasibleResponse,

    /// No region constraint is tight at the commitment point.
    #[error("no active constraints at the solution vertex")]
    EmptyActiveSet,

    /// The active rows admit no uniform-slack retreat direction.
    #[error("active constraints are inconsistent; vertex is degenerate (residual {residual:.3e})")]
    DegenerateVertex { residual: f64 },

    /// An inactive row's normal leaves the row space of the active block, so
    /// the Dikin set is unbounded in that direction.
    #[error("row normal escapes the active row space (component {component:.3e})")]
    NullspaceEscape { component: f64 },

    /// A deviation magnitude outside the feasible range was requested.
    #[error("delta {delta} out of range [0, {max}]")]
    OutOfRange { delta: f64, max: f64 },

    /// The exact enumeration would visit more count vectors than allowed.
    #[error("exact enumeration needs {needed} count vectors (limit {limit}); use Monte Carlo")]
    EnumerationTooLarge { needed: u128, limit: u64 },

    /// Sample count must be at least 1.
    #[error("invalid sample count N={0}; need N >= 1")]
    InvalidN(u64),

    /// Trial count must be at least 1.
    #[error("invalid trial count {0}; need at least 1")]
    InvalidTrials(u64),

    /// The schedule exponent must lie strictly between 0 and 1/2.
    #[error("schedule exponent {0} outside (0, 0.5)")]
    InvalidExponent(f64),

    /// The region handed to an optimizer has no feasible point.
    #[error("region is empty")]
    EmptyRegion,

    /// Unknown built-in example id.
    #[error("unknown example game id {0}; known ids are 1, 2, 3")]
    InvalidId(u32),

    /// A game file could not be read or parsed.
    #[error("failed to load game: {0}")]
    GameLoad(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
