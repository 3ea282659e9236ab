//! Hopf formula for convex initial data:
//! `phi(x, t) = max over y of (x . y - t v(y) - phi0*(y))`.
//!
//! The maximum runs over a finite table of slopes, so the result is a lower
//! bound that converges as the table is refined.

use alloc::vec::Vec;

use crate::pde::drift::{drift_v, DEFAULT_MARGIN};
use crate::pde::grid::{Axis, GridFunction2D};
use crate::pde::legendre::{legendre_2d, slope_axes_2d, LfMode};
use crate::pde::PdeError;
use crate::profile::ProfileSpec;

/// Slopes with their conjugate and drift values.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeTable {
    pub points: Vec<[f64; 2]>,
    pub conj: Vec<f64>,
    pub v: Vec<f64>,
}

impl SlopeTable {
    fn from_pairs(pairs: impl IntoIterator<Item = ([f64; 2], f64)>, margin: f64) -> Result<Self, PdeError> {
        let mut t = SlopeTable {
            points: Vec::new(),
            conj: Vec::new(),
            v: Vec::new(),
        };
        for (y, c) in pairs {
            if !c.is_finite() {
                continue;
            }
            t.v.push(drift_v(y, margin)?);
            t.points.push(y);
            t.conj.push(c);
        }
        if t.points.is_empty() {
            return Err(PdeError::EmptySlopeGrid);
        }
        Ok(t)
    }

    /// Analytic conjugate of a catalog profile sampled at resolution `res`.
    pub fn from_profile(profile: &ProfileSpec, res: usize) -> Result<Self, PdeError> {
        if !profile.is_convex() {
            return Err(PdeError::Grid("the Hopf formula needs convex initial data"));
        }
        Self::from_pairs(profile.conjugate_samples(res), DEFAULT_MARGIN)
    }

    /// Numerical conjugate of sampled initial data on a `res x res` slope grid.
    pub fn from_grid(phi0: &GridFunction2D, res: usize) -> Result<Self, PdeError> {
        let (dx, dy) = slope_axes_2d(phi0, res, res)?;
        let conj = legendre_2d(phi0, dx, dy, LfMode::Separable)?;
        let pairs = (0..dy.n).flat_map(|j| (0..dx.n).map(move |i| (i, j))).map(|(i, j)| (conj.node(i, j), conj.get(i, j)));
        Self::from_pairs(pairs, DEFAULT_MARGIN)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Value and maximising slope at `(x, t)`.
    pub fn evaluate(&self, x: [f64; 2], t: f64) -> (f64, [f64; 2]) {
        let mut best = f64::NEG_INFINITY;
        let mut arg = self.points[0];
        for ((y, c), v) in self.points.iter().zip(&self.conj).zip(&self.v) {
            let val = x[0] * y[0] + x[1] * y[1] - t * v - c;
            if val > best {
                best = val;
                arg = *y;
            }
        }
        (best, arg)
    }
}

pub fn hopf_value(table: &SlopeTable, x: [f64; 2], t: f64) -> f64 {
    table.evaluate(x, t).0
}

pub fn hopf_solve(table: &SlopeTable, t: f64, x: Axis, y: Axis) -> GridFunction2D {
    GridFunction2D::from_fn(x, y, |p| hopf_value(table, p, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Slope;
    use crate::pde::characteristics::{estimate_tf, solve_point, NewtonSettings};

    fn bump() -> ProfileSpec {
        ProfileSpec::bump(Slope::new(1.0 / 3.0, 1.0 / 3.0, DEFAULT_MARGIN).unwrap(), [0.0, 0.0], 0.25, 0.6, DEFAULT_MARGIN).unwrap()
    }

    #[test]
    fn reproduces_initial_data() {
        let p = bump();
        let table = SlopeTable::from_profile(&p, 301).unwrap();
        for x in [[0.0, 0.0], [0.4, -0.3], [-0.8, 0.9]] {
            assert!((hopf_value(&table, x, 0.0) - p.eval(x)).abs() < 1e-4);
        }
    }

    #[test]
    fn agrees_with_characteristics_before_crossing() {
        let p = bump();
        let a = Axis::spanning(-1.0, 1.0, 41).unwrap();
        let tf = estimate_tf(&p, a, a, 100.0, 1e-3).unwrap();
        let t = 0.5 * tf;
        let table = SlopeTable::from_profile(&p, 301).unwrap();
        let g = Axis::spanning(-0.5, 0.5, 11).unwrap();
        let h = hopf_solve(&table, t, g, g);
        for j in 0..g.n {
            for i in 0..g.n {
                let c = solve_point(&p, h.node(i, j), t, NewtonSettings::default()).unwrap();
                assert!((h.get(i, j) - c.phi).abs() < 1e-4, "{:?}", h.node(i, j));
            }
        }
    }

    #[test]
    fn numerical_conjugate_matches_analytic() {
        let p = bump();
        let a = Axis::spanning(-3.0, 3.0, 241).unwrap();
        let phi0 = GridFunction2D::from_fn(a, a, |x| p.eval(x));
        let num = SlopeTable::from_grid(&phi0, 121).unwrap();
        let ana = SlopeTable::from_profile(&p, 301).unwrap();
        for x in [[0.0, 0.0], [0.3, 0.2]] {
            let d = hopf_value(&num, x, 0.3) - hopf_value(&ana, x, 0.3);
            assert!(d.abs() < 5e-3, "{d}");
        }
    }

    #[test]
    fn nonconvex_data_is_rejected() {
        let p = ProfileSpec::bump(Slope::new(0.3, 0.3, DEFAULT_MARGIN).unwrap(), [0.0, 0.0], -0.2, 0.5, DEFAULT_MARGIN).unwrap();
        assert!(SlopeTable::from_profile(&p, 11).is_err());
    }
}
