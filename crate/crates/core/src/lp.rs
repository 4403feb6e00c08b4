//! Dense two-phase primal simplex over half-space polytopes.
//!
//! Maximizes `<objective, y>` over `{ y : N y <= o }` with free variables
//! (split into positive/negative parts internally). Bland's smallest-index
//! rule is used for both the entering and leaving choices, so the method
//! terminates on degenerate vertices and two runs on the same input take the
//! same pivot path — results are bit-identical.
//!
//! Problems in this crate are tiny (tens of rows and columns), so a dense
//! tableau is the simplest thing that is also fast enough.

use crate::error::{Error, Result};
use crate::polytope::HPolytope;

/// Entries smaller than this never serve as pivots.
const PIVOT_TOL: f64 = 1e-10;
/// Residual infeasibility tolerated after phase 1.
const FEAS_TOL: f64 = 1e-9;

/// An optimal basic solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// Maximizer in the polytope's coordinates.
    pub point: Vec<f64>,
    /// Objective value at `point`.
    pub value: f64,
}

struct Tableau {
    /// `rows x (cols + 1)`; last column is the right-hand side.
    data: Vec<Vec<f64>>,
    /// Current reduced-cost row (`cols + 1` wide; last entry is -objective).
    cost: Vec<f64>,
    /// Basic variable of each row.
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> f64 {
        self.data[row][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.data[row][col];
        for entry in self.data[row].iter_mut() {
            *entry /= scale;
        }
        for other in 0..self.data.len() {
            if other == row {
                continue;
            }
            let factor = self.data[other][col];
            if factor != 0.0 {
                for c in 0..=self.cols {
                    self.data[other][c] -= factor * self.data[row][c];
                }
            }
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for c in 0..=self.cols {
                self.cost[c] -= factor * self.data[row][c];
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iteration until no reduced cost improves. `enterable`
    /// limits candidate columns. Returns `Err(Unbounded)` when a ratio test
    /// finds no leaving row.
    fn run(&mut self, enterable: &[bool]) -> Result<()> {
        // Bland's rule terminates; the guard only trips on an internal bug.
        let max_pivots = 50_000 + 100 * (self.data.len() + self.cols);
        for _ in 0..max_pivots {
            let Some(entering) = (0..self.cols)
                .find(|&j| enterable[j] && self.cost[j] > PIVOT_TOL)
            else {
                return Ok(());
            };
            let mut leaving: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for row in 0..self.data.len() {
                let coef = self.data[row][entering];
                if coef > PIVOT_TOL {
                    let ratio = self.rhs(row) / coef;
                    let better = ratio < best_ratio - PIVOT_TOL
                        || (ratio < best_ratio + PIVOT_TOL
                            && leaving.is_some_and(|r| self.basis[row] < self.basis[r]));
                    if better {
                        best_ratio = ratio;
                        leaving = Some(row);
                    }
                }
            }
            match leaving {
                Some(row) => self.pivot(row, entering),
                None => return Err(Error::Unbounded),
            }
        }
        unreachable!("simplex exceeded its pivot budget; Bland's rule should terminate")
    }
}

/// Maximize `<objective, y>` over `poly`. See module docs.
pub fn lp_solve(objective: &[f64], poly: &HPolytope) -> Result<LpSolution> {
    let dim = poly.dim();
    assert_eq!(objective.len(), dim, "objective dimension mismatch");
    let rows = poly.len();

    // Columns: y+ (dim), y- (dim), slack (rows), artificial (appended below).
    let slack0 = 2 * dim;
    let art0 = slack0 + rows;
    let mut artificials = Vec::new();
    let mut data = Vec::with_capacity(rows);
    let mut basis = Vec::with_capacity(rows);
    for row in 0..rows {
        let mut sign = 1.0;
        if poly.offset(row) < 0.0 {
            sign = -1.0;
        }
        let mut line = vec![0.0; art0 + 1];
        for (i, &a) in poly.normal(row).iter().enumerate() {
            line[i] = sign * a;
            line[dim + i] = -sign * a;
        }
        line[slack0 + row] = sign;
        *line.last_mut().unwrap() = sign * poly.offset(row);
        if sign > 0.0 {
            basis.push(slack0 + row);
        } else {
            artificials.push(row);
            basis.push(usize::MAX); // patched once artificial columns exist
        }
        data.push(line);
    }
    let cols = art0 + artificials.len();
    for line in &mut data {
        let rhs = line.pop().unwrap();
        line.resize(cols, 0.0);
        line.push(rhs);
    }
    for (k, &row) in artificials.iter().enumerate() {
        data[row][art0 + k] = 1.0;
        basis[row] = art0 + k;
    }

    let mut tableau = Tableau { data, cost: vec![0.0; cols + 1], basis, cols };

    // Phase 1: maximize -(sum of artificials); price out the basic ones.
    if !artificials.is_empty() {
        for j in art0..cols {
            tableau.cost[j] = -1.0;
        }
        for &row in &artificials {
            for c in 0..=cols {
                let adj = tableau.data[row][c];
                tableau.cost[c] += adj;
            }
        }
        let enterable = vec![true; cols];
        tableau.run(&enterable).map_err(|e| match e {
            Error::Unbounded => Error::Infeasible, // phase 1 is bounded by 0
            other => other,
        })?;
        // Invariant: cost[cols] = -(phase-1 objective) = sum of artificials.
        let infeasibility = tableau.cost[cols];
        if infeasibility.abs() > FEAS_TOL {
            return Err(Error::Infeasible);
        }
        // Drive leftover zero-level artificials out of the basis. A row with
        // no real coefficients is redundant (0 = 0) and its artificial may
        // stay; it can never re-enter because phase 2 bars those columns.
        for row in 0..tableau.data.len() {
            if tableau.basis[row] >= art0 {
                if let Some(col) =
                    (0..art0).find(|&j| tableau.data[row][j].abs() > PIVOT_TOL)
                {
                    tableau.pivot(row, col);
                }
            }
        }
    }

    // Phase 2: the real objective, artificial columns barred.
    tableau.cost = vec![0.0; cols + 1];
    for i in 0..dim {
        tableau.cost[i] = objective[i];
        tableau.cost[dim + i] = -objective[i];
    }
    for row in 0..tableau.data.len() {
        let basic = tableau.basis[row];
        let coef = tableau.cost[basic];
        if coef != 0.0 {
            for c in 0..=cols {
                let adj = coef * tableau.data[row][c];
                tableau.cost[c] -= adj;
            }
        }
    }
    let mut enterable = vec![true; cols];
    for flag in enterable.iter_mut().skip(art0) {
        *flag = false;
    }
    tableau.run(&enterable)?;

    let mut point = vec![0.0; dim];
    for row in 0..tableau.data.len() {
        let basic = tableau.basis[row];
        if basic < dim {
            point[basic] += tableau.rhs(row);
        } else if basic < 2 * dim {
            point[basic - dim] -= tableau.rhs(row);
        }
    }
    let value = objective.iter().zip(&point).map(|(c, y)| c * y).sum();
    Ok(LpSolution { point, value })
}
