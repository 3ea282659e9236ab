//! Scalar functions sampled on regular grids; `+inf` marks nodes outside the
//! effective domain.

use alloc::vec::Vec;

use crate::pde::PdeError;

/// Nodes `lo + k * step`, `k = 0..n`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub step: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, step: f64, n: usize) -> Result<Self, PdeError> {
        if !(step > 0.0) || n == 0 || !lo.is_finite() || !step.is_finite() {
            return Err(PdeError::Grid("axis needs a positive step and at least one node"));
        }
        Ok(Axis { lo, step, n })
    }

    /// `n` nodes spanning `[lo, hi]` inclusively.
    pub fn spanning(lo: f64, hi: f64, n: usize) -> Result<Self, PdeError> {
        if n < 2 || !(hi > lo) {
            return Err(PdeError::Grid("spanning axis needs hi > lo and n >= 2"));
        }
        Axis::new(lo, (hi - lo) / (n - 1) as f64, n)
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        self.lo + self.step * k as f64
    }

    pub fn hi(&self) -> f64 {
        self.node(self.n - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.node(k))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction1D {
    pub axis: Axis,
    pub values: Vec<f64>,
}

impl GridFunction1D {
    pub fn from_fn(axis: Axis, mut f: impl FnMut(f64) -> f64) -> Self {
        let values = axis.nodes().map(&mut f).collect();
        GridFunction1D { axis, values }
    }

    pub fn new(axis: Axis, values: Vec<f64>) -> Result<Self, PdeError> {
        if values.len() != axis.n {
            return Err(PdeError::Grid("value count does not match the axis"));
        }
        Ok(GridFunction1D { axis, values })
    }

    pub fn has_finite(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| if a == b { 0.0 } else { (a - b).abs() })
            .fold(0.0, f64::max)
    }
}

/// Values indexed `i + nx * j` for node `(x.node(i), y.node(j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction2D {
    pub x: Axis,
    pub y: Axis,
    pub values: Vec<f64>,
}

impl GridFunction2D {
    pub fn from_fn(x: Axis, y: Axis, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        let mut values = Vec::with_capacity(x.n * y.n);
        for j in 0..y.n {
            for i in 0..x.n {
                values.push(f([x.node(i), y.node(j)]));
            }
        }
        GridFunction2D { x, y, values }
    }

    pub fn new(x: Axis, y: Axis, values: Vec<f64>) -> Result<Self, PdeError> {
        if values.len() != x.n * y.n {
            return Err(PdeError::Grid("value count does not match the axes"));
        }
        Ok(GridFunction2D { x, y, values })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i + self.x.n * j]
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x.node(i), self.y.node(j)]
    }

    pub fn has_finite(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    /// Largest `|a - b|` over nodes; equal infinities count as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| if a == b { 0.0 } else { (a - b).abs() })
            .fold(0.0, f64::max)
    }

    /// Discrete midpoint convexity along both axes and both diagonals at
    /// every interior node with finite neighbours, up to `tol`.
    pub fn is_midpoint_convex(&self, tol: f64) -> bool {
        let (nx, ny) = (self.x.n, self.y.n);
        for j in 1..ny.saturating_sub(1) {
            for i in 1..nx.saturating_sub(1) {
                let c = self.get(i, j);
                for (a, b) in [
                    (self.get(i - 1, j), self.get(i + 1, j)),
                    (self.get(i, j - 1), self.get(i, j + 1)),
                ] {
                    if a.is_finite() && b.is_finite() && 2.0 * c > a + b + tol {
                        return false;
                    }
                }
            }
        }
        true
    }
}
