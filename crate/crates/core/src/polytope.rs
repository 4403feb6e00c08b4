//! Half-space polytopes `{ y : <normal_i, y> <= offset_i }` in reduced
//! simplex coordinates, with labeled rows so callers can tell indifference
//! constraints from simplex facets.

use serde::Serialize;

use crate::error::{Error, Result};

/// A row normal shorter than this is treated as zero.
const ZERO_ROW_TOL: f64 = 1e-12;

/// What a half-space row encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowLabel {
    /// Follower indifference vs. response `other`: inside means the region's
    /// own response is weakly preferred to `other`.
    Indifference { other: usize },
    /// Simplex facet `y[coord] >= 0`.
    NonNeg { coord: usize },
    /// Simplex facet `sum(y) <= 1`.
    SumCap,
}

/// Intersection of half-spaces `<normal_i, y> <= offset_i`.
///
/// Rows added through [`HPolytope::push_row`] are scaled to unit Euclidean
/// norm, which makes offsets and slacks plain distances and keeps every
/// tolerance in the crate scale-free. A row whose normal is numerically zero
/// is vacuous when its offset is >= 0 and is dropped; with a negative offset
/// it is kept verbatim as an explicit witness that the polytope is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HPolytope {
    dim: usize,
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    labels: Vec<RowLabel>,
}

impl HPolytope {
    /// Empty row set over `dim`-dimensional points (i.e. all of space).
    pub fn new(dim: usize) -> Self {
        HPolytope { dim, normals: Vec::new(), offsets: Vec::new(), labels: Vec::new() }
    }

    /// The reduced simplex `{ y >= 0, sum(y) <= 1 }` as labeled rows.
    pub fn simplex(dim: usize) -> Self {
        let mut poly = HPolytope::new(dim);
        for i in 0..dim {
            let mut normal = vec![0.0; dim];
            normal[i] = -1.0;
            poly.push_row(normal, 0.0, RowLabel::NonNeg { coord: i });
        }
        poly.push_row(vec![1.0; dim], 1.0, RowLabel::SumCap);
        poly
    }

    /// Add `<normal, y> <= offset`, rescaled to unit norm (see type docs).
    pub fn push_row(&mut self, normal: Vec<f64>, offset: f64, label: RowLabel) {
        assert_eq!(normal.len(), self.dim, "row dimension mismatch");
        let norm = normal.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm <= ZERO_ROW_TOL {
            if offset >= -ZERO_ROW_TOL {
                return; // vacuous: 0 <= offset always holds
            }
            // 0 <= negative offset: impossible; keep as infeasibility witness.
            self.normals.push(vec![0.0; self.dim]);
            self.offsets.push(offset);
            self.labels.push(label);
            return;
        }
        self.normals.push(normal.iter().map(|a| a / norm).collect());
        self.offsets.push(offset / norm);
        self.labels.push(label);
    }

    /// Add a row without rescaling (for hand-built auxiliary programs whose
    /// coefficients must be preserved exactly).
    pub fn push_row_raw(&mut self, normal: Vec<f64>, offset: f64, label: RowLabel) {
        assert_eq!(normal.len(), self.dim, "row dimension mismatch");
        self.normals.push(normal);
        self.offsets.push(offset);
        self.labels.push(label);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn normal(&self, row: usize) -> &[f64] {
        &self.normals[row]
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn offset(&self, row: usize) -> f64 {
        self.offsets[row]
    }

    pub fn labels(&self) -> &[RowLabel] {
        &self.labels
    }

    /// `offset_i - <normal_i, y>`: nonnegative iff `y` satisfies row `i`.
    pub fn slack(&self, row: usize, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.dim);
        let lhs: f64 = self.normals[row].iter().zip(point).map(|(a, y)| a * y).sum();
        self.offsets[row] - lhs
    }

    /// Whether every row holds up to `tol`.
    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        (0..self.len()).all(|row| self.slack(row, point) >= -tol)
    }

    /// Smallest slack over all rows (`+inf` for a row-free polytope).
    pub fn min_slack(&self, point: &[f64]) -> f64 {
        (0..self.len()).map(|row| self.slack(row, point)).fold(f64::INFINITY, f64::min)
    }

    /// Center and radius of the largest inscribed ball: maximize `r` subject
    /// to `<normal_i, y> + r * |normal_i| <= offset_i`. Errors with
    /// [`Error::EmptyRegion`] when the polytope has no feasible point and
    /// [`Error::Unbounded`] when it contains balls of every radius.
    pub fn chebyshev_center(&self) -> Result<(Vec<f64>, f64)> {
        let mut extended = HPolytope::new(self.dim + 1);
        for row in 0..self.len() {
            let norm = self.normals[row].iter().map(|a| a * a).sum::<f64>().sqrt();
            let mut normal = self.normals[row].clone();
            normal.push(norm);
            extended.push_row_raw(normal, self.offsets[row], self.labels[row]);
        }
        let mut radius_nonneg = vec![0.0; self.dim + 1];
        radius_nonneg[self.dim] = -1.0;
        extended.push_row_raw(radius_nonneg, 0.0, RowLabel::SumCap);

        let mut objective = vec![0.0; self.dim + 1];
        objective[self.dim] = 1.0;
        let solution = crate::lp::lp_solve(&objective, &extended).map_err(|e| match e {
            Error::Infeasible => Error::EmptyRegion,
            other => other,
        })?;
        let mut center = solution.point;
        let radius = center.pop().expect("extended point has radius coordinate");
        Ok((center, radius))
    }
}
