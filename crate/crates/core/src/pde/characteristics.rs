//! Classical solutions by the method of characteristics.
//!
//! Before the first crossing time, `x = x0 + t Dv(grad phi0(x0))` has a
//! unique root `x0` and `phi(x, t) = phi0(x0) + t (Dv . grad phi0(x0) - v)`,
//! both evaluated at `grad phi0(x0)`.

use alloc::vec::Vec;

use crate::pde::drift::{grad_unchecked, hessian_unchecked, v_unchecked};
use crate::pde::grid::{Axis, GridFunction2D};
use crate::pde::PdeError;
use crate::profile::ProfileSpec;

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Solution data at one point.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CharPoint {
    pub x: [f64; 2],
    pub x0: [f64; 2],
    pub phi: f64,
    /// `grad phi(x, t) = grad phi0(x0)`.
    pub grad: [f64; 2],
    pub residual: f64,
    pub iterations: u32,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct NewtonSettings {
    pub tol: f64,
    pub max_iter: u32,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings { tol: 1e-12, max_iter: 60 }
    }
}

fn residual(profile: &ProfileSpec, x0: [f64; 2], x: [f64; 2], t: f64) -> [f64; 2] {
    let g = grad_unchecked(profile.grad(x0));
    [x0[0] + t * g[0] - x[0], x0[1] + t * g[1] - x[1]]
}

fn norm(r: [f64; 2]) -> f64 {
    libm::sqrt(r[0] * r[0] + r[1] * r[1])
}

/// Solve for the foot `x0` of the characteristic through `(x, t)` by damped
/// Newton iteration and evaluate the solution there.
pub fn solve_point(profile: &ProfileSpec, x: [f64; 2], t: f64, settings: NewtonSettings) -> Result<CharPoint, PdeError> {
    let g0 = grad_unchecked(profile.grad(x));
    let mut x0 = [x[0] - t * g0[0], x[1] - t * g0[1]];
    let mut r = residual(profile, x0, x, t);
    let mut it = 0;
    while norm(r) > settings.tol {
        if it >= settings.max_iter {
            return Err(PdeError::NewtonFailed { x, t, residual: norm(r) });
        }
        it += 1;
        let hv = hessian_unchecked(profile.grad(x0));
        let m = mat_mul(hv, profile.hess(x0));
        let j = [[1.0 + t * m[0][0], t * m[0][1]], [t * m[1][0], 1.0 + t * m[1][1]]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return Err(PdeError::NewtonFailed { x, t, residual: norm(r) });
        }
        let d = [
            (j[1][1] * r[0] - j[0][1] * r[1]) / det,
            (-j[1][0] * r[0] + j[0][0] * r[1]) / det,
        ];
        let mut lambda = 1.0;
        loop {
            let cand = [x0[0] - lambda * d[0], x0[1] - lambda * d[1]];
            let rc = residual(profile, cand, x, t);
            if norm(rc) < norm(r) || lambda < 1e-6 {
                x0 = cand;
                r = rc;
                break;
            }
            lambda *= 0.5;
        }
    }
    let rho = profile.grad(x0);
    let g = grad_unchecked(rho);
    let phi = profile.eval(x0) + t * (g[0] * rho[0] + g[1] * rho[1] - v_unchecked(rho));
    Ok(CharPoint {
        x,
        x0,
        phi,
        grad: rho,
        residual: norm(r),
        iterations: it,
    })
}

/// `det(I + t Hv(grad phi0) Hphi0)` expanded as `1 + t tr M + t^2 det M`.
fn det_coeffs(profile: &ProfileSpec, x0: [f64; 2]) -> (f64, f64) {
    let m = mat_mul(hessian_unchecked(profile.grad(x0)), profile.hess(x0));
    (m[0][0] + m[1][1], m[0][0] * m[1][1] - m[0][1] * m[1][0])
}

/// Smallest `t` with `min over nodes of det(I + t M(x0)) <= 0`, located by a
/// scan up to `horizon` followed by bisection to `tol`; `None` when the
/// determinant stays positive up to `horizon`.
pub fn estimate_tf(profile: &ProfileSpec, x: Axis, y: Axis, horizon: f64, tol: f64) -> Option<f64> {
    let mut coeffs = Vec::with_capacity(x.n * y.n);
    for j in 0..y.n {
        for i in 0..x.n {
            let (tr, det) = det_coeffs(profile, [x.node(i), y.node(j)]);
            if tr != 0.0 || det != 0.0 {
                coeffs.push((tr, det));
            }
        }
    }
    if coeffs.is_empty() {
        return None;
    }
    let min_det = |t: f64| coeffs.iter().map(|&(a, b)| 1.0 + t * a + t * t * b).fold(f64::INFINITY, f64::min);
    let steps = 4000;
    let dt = horizon / steps as f64;
    let mut prev = 0.0;
    for k in 1..=steps {
        let t = dt * k as f64;
        if min_det(t) <= 0.0 {
            let (mut lo, mut hi) = (prev, t);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if min_det(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(hi);
        }
        prev = t;
    }
    None
}

/// Solve on every node of a grid. Nodes where Newton fails are reported
/// and left as NaN.
pub fn characteristics_solve(
    profile: &ProfileSpec,
    t: f64,
    x: Axis,
    y: Axis,
    settings: NewtonSettings,
) -> (GridFunction2D, Vec<PdeError>) {
    let mut failures = Vec::new();
    let grid = GridFunction2D::from_fn(x, y, |p| match solve_point(profile, p, t, settings) {
        Ok(c) => c.phi,
        Err(e) => {
            failures.push(e);
            f64::NAN
        }
    });
    (grid, failures)
}

/// As [`characteristics_solve`], refusing times at or beyond the crossing
/// time estimated on the feet region `(fx, fy)`.
pub fn characteristics_checked(
    profile: &ProfileSpec,
    t: f64,
    grid: (Axis, Axis),
    feet: (Axis, Axis),
    settings: NewtonSettings,
) -> Result<GridFunction2D, PdeError> {
    if let Some(tf) = estimate_tf(profile, feet.0, feet.1, 1e3, 1e-3) {
        if t >= tf {
            return Err(PdeError::BeyondShock { t, tf });
        }
    }
    let (g, mut failures) = characteristics_solve(profile, t, grid.0, grid.1, settings);
    match failures.pop() {
        Some(e) => Err(e),
        None => Ok(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Slope;
    use crate::pde::drift::DEFAULT_MARGIN;

    fn bump(a: f64) -> ProfileSpec {
        ProfileSpec::bump(Slope::new(1.0 / 3.0, 1.0 / 3.0, DEFAULT_MARGIN).unwrap(), [0.0, 0.0], a, 0.6, DEFAULT_MARGIN).unwrap()
    }

    #[test]
    fn affine_translates() {
        let rho = [0.3, 0.4];
        let p = ProfileSpec::Affine { rho };
        let v = v_unchecked(rho);
        for x in [[0.0, 0.0], [1.0, -2.0], [0.3, 0.7]] {
            let c = solve_point(&p, x, 0.8, NewtonSettings::default()).unwrap();
            assert!((c.phi - (rho[0] * x[0] + rho[1] * x[1] - 0.8 * v)).abs() < 1e-13);
        }
        let a = Axis::spanning(-1.0, 1.0, 11).unwrap();
        assert_eq!(estimate_tf(&p, a, a, 100.0, 1e-3), None);
    }

    #[test]
    fn residual_and_gradient_transport() {
        let p = bump(0.25);
        for x in [[0.0, 0.0], [0.2, -0.1], [-0.3, 0.25]] {
            let c = solve_point(&p, x, 0.5, NewtonSettings::default()).unwrap();
            assert!(c.residual <= 1e-9);
            // gradient of phi by central differences equals grad phi0(x0)
            let e = 1e-5;
            let f = |q: [f64; 2]| solve_point(&p, q, 0.5, NewtonSettings::default()).unwrap().phi;
            let g0 = (f([x[0] + e, x[1]]) - f([x[0] - e, x[1]])) / (2.0 * e);
            let g1 = (f([x[0], x[1] + e]) - f([x[0], x[1] - e])) / (2.0 * e);
            assert!((g0 - c.grad[0]).abs() < 1e-6 && (g1 - c.grad[1]).abs() < 1e-6);
        }
    }

    /// Exact first root of `1 + t tr + t^2 det` over the grid.
    fn exact_tf(p: &ProfileSpec, a: Axis) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..a.n {
            for i in 0..a.n {
                let (tr, det) = det_coeffs(p, [a.node(i), a.node(j)]);
                let roots = if det == 0.0 {
                    [-1.0 / tr, f64::INFINITY]
                } else {
                    let disc = tr * tr - 4.0 * det;
                    if disc < 0.0 {
                        [f64::INFINITY; 2]
                    } else {
                        [(-tr - disc.sqrt()) / (2.0 * det), (-tr + disc.sqrt()) / (2.0 * det)]
                    }
                };
                for r in roots {
                    if r > 0.0 {
                        best = best.min(r);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn tf_matches_quadratic_roots_and_scales() {
        let a = Axis::spanning(-1.0, 1.0, 41).unwrap();
        let mut prev = f64::INFINITY;
        for curv in [0.05, 0.1, 0.2] {
            let p = bump(curv);
            let tf = estimate_tf(&p, a, a, 200.0, 1e-3).unwrap();
            assert!((tf - exact_tf(&p, a)).abs() <= 2e-3, "{tf}");
            assert!(tf < prev);
            // small curvature: T_f ~ c / a with c = 1 / |lambda_min(Hv)| at the centre
            assert!((tf * curv - 1.0 / 3.627_598_728_468_436).abs() < 0.03, "{}", tf * curv);
            prev = tf;
        }
    }

    #[test]
    fn beyond_shock_is_refused() {
        let p = bump(0.25);
        let a = Axis::spanning(-0.5, 0.5, 11).unwrap();
        let r = characteristics_checked(&p, 5.0, (a, a), (a, a), NewtonSettings::default());
        assert!(matches!(r, Err(PdeError::BeyondShock { .. })));
    }
}
