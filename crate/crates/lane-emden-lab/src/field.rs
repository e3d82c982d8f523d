//! Discrete scalar fields on a grid: solutions, residuals, Green slices.

use crate::domain::Point;
use crate::grid::Grid;
use std::sync::Arc;

/// One value per unknown node; the implied value on ∂Ω (and at cut points)
/// is 0.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.n_unknowns();
        Field { grid, values: vec![0.0; n] }
    }

    /// Builds a field by evaluating `f` at every unknown node.
    pub fn from_fn(grid: Arc<Grid>, mut f: impl FnMut(Point) -> f64) -> Self {
        let values = (0..grid.n_unknowns()).map(|q| f(grid.node_point(q))).collect();
        Field { grid, values }
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Index of the maximal value.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (q, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = q;
            }
        }
        best
    }

    /// Bilinear interpolation at an arbitrary point. Lattice nodes outside Ω
    /// contribute 0 (the Dirichlet extension), so values within one cell of
    /// ∂Ω are approximate; diagnostics budgets for this.
    pub fn interp(&self, p: Point) -> f64 {
        let g = &self.grid;
        let (ox, oy) = self.origin();
        let sx = (p[0] - ox) / g.h;
        let sy = (p[1] - oy) / g.h;
        let i0 = sx.floor() as i64;
        let j0 = sy.floor() as i64;
        let tx = sx - i0 as f64;
        let ty = sy - j0 as f64;
        let at = |i: i64, j: i64| -> f64 {
            g.unknown_at(i, j).map_or(0.0, |q| self.values[q as usize])
        };
        (1.0 - tx) * (1.0 - ty) * at(i0, j0)
            + tx * (1.0 - ty) * at(i0 + 1, j0)
            + (1.0 - tx) * ty * at(i0, j0 + 1)
            + tx * ty * at(i0 + 1, j0 + 1)
    }

    fn origin(&self) -> (f64, f64) {
        let p0 = self.grid.node_point(0);
        let (i, j) = self.grid.node_ij(0);
        (p0[0] - i as f64 * self.grid.h, p0[1] - j as f64 * self.grid.h)
    }
}
