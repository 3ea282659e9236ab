//! Locating gradient discontinuities of a sampled function.

use alloc::vec::Vec;

use crate::pde::grid::GridFunction2D;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GradientJump {
    pub i: usize,
    pub j: usize,
    pub x: [f64; 2],
    /// 0 for a jump of the `x1` difference quotient, 1 for `x2`.
    pub axis: u8,
    /// Forward minus backward difference quotient.
    pub size: f64,
}

/// Upper decile of `|second difference quotient|` over interior nodes and
/// both axes. Jumps sit on a thin set of nodes, so they barely move it.
pub fn curvature_scale(phi: &GridFunction2D) -> f64 {
    let (nx, ny) = (phi.x.n, phi.y.n);
    let mut d2 = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let c = phi.get(i, j);
            if i > 0 && i + 1 < nx {
                d2.push(((phi.get(i + 1, j) - 2.0 * c + phi.get(i - 1, j)) / (phi.x.step * phi.x.step)).abs());
            }
            if j > 0 && j + 1 < ny {
                d2.push(((phi.get(i, j + 1) - 2.0 * c + phi.get(i, j - 1)) / (phi.y.step * phi.y.step)).abs());
            }
        }
    }
    d2.retain(|v| v.is_finite());
    if d2.is_empty() {
        return 0.0;
    }
    d2.sort_by(f64::total_cmp);
    d2[(d2.len() * 9) / 10]
}

/// `10 * resolution * curvature_scale`, plus a floor for rounding noise.
pub fn default_threshold(phi: &GridFunction2D) -> f64 {
    10.0 * phi.x.step.max(phi.y.step) * curvature_scale(phi) + 1e-8
}

/// Interior nodes where forward and backward difference quotients along an
/// axis differ by more than `threshold`.
pub fn detect_gradient_jumps(phi: &GridFunction2D, threshold: f64) -> Vec<GradientJump> {
    let mut out = Vec::new();
    let (nx, ny) = (phi.x.n, phi.y.n);
    for j in 0..ny {
        for i in 0..nx {
            let c = phi.get(i, j);
            if !c.is_finite() {
                continue;
            }
            if i > 0 && i + 1 < nx {
                let size = (phi.get(i + 1, j) - c) / phi.x.step - (c - phi.get(i - 1, j)) / phi.x.step;
                if size.abs() > threshold {
                    out.push(GradientJump { i, j, x: phi.node(i, j), axis: 0, size });
                }
            }
            if j > 0 && j + 1 < ny {
                let size = (phi.get(i, j + 1) - c) / phi.y.step - (c - phi.get(i, j - 1)) / phi.y.step;
                if size.abs() > threshold {
                    out.push(GradientJump { i, j, x: phi.node(i, j), axis: 1, size });
                }
            }
        }
    }
    out
}
