//! Discrete Legendre-Fenchel transforms and convex envelopes.
//!
//! `f*(y) = max over finite nodes z of (z . y - f(z))`, evaluated on a dual
//! grid. The double transform `f**` (back on the primal grid) is the lower
//! convex envelope up to the resolution of the dual grid.

use alloc::vec::Vec;

use crate::pde::grid::{Axis, GridFunction1D, GridFunction2D};
use crate::pde::PdeError;

/// How the 2D transform is evaluated. Both give the same maxima; the
/// separable mode maximises over one primal axis at a time.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum LfMode {
    #[default]
    Direct,
    Separable,
}

pub fn legendre_1d(f: &GridFunction1D, dual: Axis) -> Result<GridFunction1D, PdeError> {
    if !f.has_finite() {
        return Err(PdeError::AllInfinite);
    }
    let finite: Vec<(f64, f64)> = f
        .axis
        .nodes()
        .zip(&f.values)
        .filter(|(_, v)| v.is_finite())
        .map(|(z, &v)| (z, v))
        .collect();
    Ok(GridFunction1D::from_fn(dual, |y| {
        finite.iter().map(|&(z, v)| z * y - v).fold(f64::NEG_INFINITY, f64::max)
    }))
}

pub fn legendre_2d(f: &GridFunction2D, dual_x: Axis, dual_y: Axis, mode: LfMode) -> Result<GridFunction2D, PdeError> {
    if !f.has_finite() {
        return Err(PdeError::AllInfinite);
    }
    match mode {
        LfMode::Direct => {
            let mut finite = Vec::new();
            for j in 0..f.y.n {
                for i in 0..f.x.n {
                    let v = f.get(i, j);
                    if v.is_finite() {
                        finite.push((f.x.node(i), f.y.node(j), v));
                    }
                }
            }
            Ok(GridFunction2D::from_fn(dual_x, dual_y, |y| {
                finite
                    .iter()
                    .map(|&(z1, z2, v)| z1 * y[0] + z2 * y[1] - v)
                    .fold(f64::NEG_INFINITY, f64::max)
            }))
        }
        LfMode::Separable => {
            // g(y1, z2) = max_z1 (z1 y1 - f(z1, z2)), then max_z2 (z2 y2 + g)
            let mut g = Vec::with_capacity(dual_x.n * f.y.n);
            for j in 0..f.y.n {
                for a in 0..dual_x.n {
                    let y1 = dual_x.node(a);
                    let mut best = f64::NEG_INFINITY;
                    for i in 0..f.x.n {
                        let v = f.get(i, j);
                        if v.is_finite() {
                            best = best.max(f.x.node(i) * y1 - v);
                        }
                    }
                    g.push(best);
                }
            }
            let mut values = Vec::with_capacity(dual_x.n * dual_y.n);
            for b in 0..dual_y.n {
                let y2 = dual_y.node(b);
                for a in 0..dual_x.n {
                    let mut best = f64::NEG_INFINITY;
                    for j in 0..f.y.n {
                        let gv = g[a + dual_x.n * j];
                        if gv > f64::NEG_INFINITY {
                            best = best.max(f.y.node(j) * y2 + gv);
                        }
                    }
                    values.push(best);
                }
            }
            GridFunction2D::new(dual_x, dual_y, values)
        }
    }
}

/// Dual axis covering the slopes between consecutive finite nodes, with
/// `n` nodes.
pub fn slope_axis_1d(f: &GridFunction1D, n: usize) -> Result<Axis, PdeError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..f.values.len().saturating_sub(1) {
        let (a, b) = (f.values[k], f.values[k + 1]);
        if a.is_finite() && b.is_finite() {
            let s = (b - a) / f.axis.step;
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    if !lo.is_finite() {
        return Err(PdeError::AllInfinite);
    }
    if hi - lo < 1e-12 {
        hi = lo + 1e-6;
        lo -= 1e-6;
    }
    Axis::spanning(lo, hi, n.max(2))
}

/// `f**` on the primal grid through a dual grid of `dual_n` slopes.
pub fn convex_envelope_1d(f: &GridFunction1D, dual_n: usize) -> Result<GridFunction1D, PdeError> {
    let dual = slope_axis_1d(f, dual_n)?;
    let fs = legendre_1d(f, dual)?;
    legendre_1d(&fs, f.axis)
}

/// Upper concave envelope `-(-f)**`.
pub fn concave_envelope_1d(f: &GridFunction1D, dual_n: usize) -> Result<GridFunction1D, PdeError> {
    let neg = GridFunction1D::new(f.axis, f.values.iter().map(|v| -v).collect())?;
    let env = convex_envelope_1d(&neg, dual_n)?;
    GridFunction1D::new(f.axis, env.values.iter().map(|v| -v).collect())
}

/// Dual axes spanning the difference quotients of `f` along each axis.
pub fn slope_axes_2d(f: &GridFunction2D, nx: usize, ny: usize) -> Result<(Axis, Axis), PdeError> {
    let mut b = [[f64::INFINITY, f64::NEG_INFINITY]; 2];
    for j in 0..f.y.n {
        for i in 0..f.x.n {
            let v = f.get(i, j);
            if !v.is_finite() {
                continue;
            }
            if i + 1 < f.x.n && f.get(i + 1, j).is_finite() {
                let s = (f.get(i + 1, j) - v) / f.x.step;
                b[0] = [b[0][0].min(s), b[0][1].max(s)];
            }
            if j + 1 < f.y.n && f.get(i, j + 1).is_finite() {
                let s = (f.get(i, j + 1) - v) / f.y.step;
                b[1] = [b[1][0].min(s), b[1][1].max(s)];
            }
        }
    }
    let mk = |[lo, hi]: [f64; 2], n: usize| {
        if !lo.is_finite() {
            return Err(PdeError::AllInfinite);
        }
        let (lo, hi) = if hi - lo < 1e-12 { (lo - 1e-6, hi + 1e-6) } else { (lo, hi) };
        Axis::spanning(lo, hi, n.max(2))
    };
    Ok((mk(b[0], nx)?, mk(b[1], ny)?))
}

pub fn convex_envelope_2d(f: &GridFunction2D, dual_x: Axis, dual_y: Axis, mode: LfMode) -> Result<GridFunction2D, PdeError> {
    let fs = legendre_2d(f, dual_x, dual_y, mode)?;
    legendre_2d(&fs, f.x, f.y, mode)
}

/// Exact lower convex hull of the finite nodes, interpolated back onto the
/// grid (monotone chain).
pub fn lower_hull_1d(f: &GridFunction1D) -> Result<GridFunction1D, PdeError> {
    let pts: Vec<(f64, f64)> = f
        .axis
        .nodes()
        .zip(&f.values)
        .filter(|(_, v)| v.is_finite())
        .map(|(z, &v)| (z, v))
        .collect();
    if pts.is_empty() {
        return Err(PdeError::AllInfinite);
    }
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the chord a-p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let (first, last) = (pts[0].0, pts[pts.len() - 1].0);
    let mut k = 0;
    Ok(GridFunction1D::from_fn(f.axis, |z| {
        if z < first || z > last {
            return f64::INFINITY;
        }
        while k + 1 < hull.len() && hull[k + 1].0 < z {
            k += 1;
        }
        if hull.len() == 1 {
            return hull[0].1;
        }
        let (a, b) = (hull[k], hull[(k + 1).min(hull.len() - 1)]);
        if b.0 == a.0 {
            a.1
        } else {
            a.1 + (b.1 - a.1) * (z - a.0) / (b.0 - a.0)
        }
    }))
}

/// Runs of nodes where `f - env > tol`, grown outwards to the nodes where
/// `f` touches `env` again (gap below `tol / 100`), as coordinate intervals.
pub fn flat_pieces(f: &GridFunction1D, env: &GridFunction1D, tol: f64) -> Vec<(f64, f64)> {
    let n = f.values.len();
    let gap = |k: usize| {
        let (a, b) = (f.values[k], env.values[k]);
        if a.is_finite() && b.is_finite() {
            a - b
        } else {
            0.0
        }
    };
    // a hull touches exactly; a double transform only up to its own error
    let touch = |k: usize| gap(k) <= (1e-12 * (1.0 + f.values[k].abs())).max(1e-2 * tol);
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut k = 0;
    while k < n {
        if gap(k) > tol {
            let mut lo = k;
            while lo > 0 && !touch(lo) {
                lo -= 1;
            }
            let mut hi = k;
            while hi + 1 < n && !touch(hi) {
                hi += 1;
            }
            let piece = (f.axis.node(lo), f.axis.node(hi));
            if out.last() != Some(&piece) {
                out.push(piece);
            }
            k = hi + 1;
        } else {
            k += 1;
        }
    }
    out
}
