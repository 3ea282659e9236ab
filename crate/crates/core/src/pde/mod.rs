//! The Hamilton-Jacobi equation `d_t phi + v(grad phi) = 0` with the drift
//! `v` of the growth model: classical solutions, Hopf and one-dimensional
//! Riemann solutions, and detection of gradient discontinuities.

use thiserror::Error;

pub mod characteristics;
pub mod drift;
pub mod grid;
pub mod hopf;
pub mod jumps;
pub mod legendre;
pub mod riemann;

pub use characteristics::{characteristics_checked, characteristics_solve, estimate_tf, solve_point, CharPoint, NewtonSettings};
pub use drift::{drift_v, grad_v, hessian_v, HessianInfo, DEFAULT_MARGIN};
pub use grid::{Axis, GridFunction1D, GridFunction2D};
pub use hopf::{hopf_solve, hopf_value, SlopeTable};
pub use jumps::{curvature_scale, default_threshold, detect_gradient_jumps, GradientJump};
pub use legendre::{convex_envelope_1d, convex_envelope_2d, legendre_1d, legendre_2d, lower_hull_1d, LfMode};
pub use riemann::{riemann_solve, RiemannSolution, RiemannSpec, WaveKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("slope ({rho1}, {rho2}) is outside the admissible triangle")]
    Domain { rho1: f64, rho2: f64 },
    #[error("grid: {0}")]
    Grid(&'static str),
    #[error("function is +inf everywhere")]
    AllInfinite,
    #[error("Newton iteration failed at x = {x:?}, t = {t} (residual {residual:e})")]
    NewtonFailed { x: [f64; 2], t: f64, residual: f64 },
    #[error("t = {t} is at or beyond the first crossing time {tf}")]
    BeyondShock { t: f64, tf: f64 },
    #[error("no finite slope samples")]
    EmptySlopeGrid,
    #[error("Riemann data leaves the slope domain: {0}")]
    RiemannDomain(&'static str),
}
