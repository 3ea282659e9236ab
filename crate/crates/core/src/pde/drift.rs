//! The drift function `v(rho) = sin(pi rho1) sin(pi rho2) / (pi sin(pi (rho1 + rho2)))`
//! and its first two derivatives.

use core::f64::consts::PI;

use libm::{cos, sin};

use crate::pde::PdeError;

/// Default distance from the edge of the slope triangle.
pub const DEFAULT_MARGIN: f64 = 0.02;

fn check(rho: [f64; 2], margin: f64) -> Result<(), PdeError> {
    let [a, b] = rho;
    if !(a > 0.0 && b > 0.0 && a + b < 1.0 - margin) || !(a >= margin && b >= margin) {
        return Err(PdeError::Domain { rho1: a, rho2: b });
    }
    Ok(())
}

/// `v` without the domain check.
#[inline]
pub fn v_unchecked(rho: [f64; 2]) -> f64 {
    sin(PI * rho[0]) * sin(PI * rho[1]) / (PI * sin(PI * (rho[0] + rho[1])))
}

#[inline]
pub fn grad_unchecked(rho: [f64; 2]) -> [f64; 2] {
    let s = sin(PI * (rho[0] + rho[1]));
    let s2 = s * s;
    let a = sin(PI * rho[0]);
    let b = sin(PI * rho[1]);
    [b * b / s2, a * a / s2]
}

#[inline]
pub fn hessian_unchecked(rho: [f64; 2]) -> [[f64; 2]; 2] {
    let a = sin(PI * rho[0]);
    let b = sin(PI * rho[1]);
    let s = sin(PI * (rho[0] + rho[1]));
    let c = cos(PI * (rho[0] + rho[1]));
    let s3 = s * s * s;
    let h11 = -2.0 * PI * b * b * c / s3;
    let h22 = -2.0 * PI * a * a * c / s3;
    let h12 = 2.0 * PI * a * b / s3;
    [[h11, h12], [h12, h22]]
}

/// Drift at slope `rho`; fails unless `rho1, rho2 >= margin`, both positive
/// and `rho1 + rho2 < 1 - margin`.
pub fn drift_v(rho: [f64; 2], margin: f64) -> Result<f64, PdeError> {
    check(rho, margin)?;
    Ok(v_unchecked(rho))
}

/// `(sin^2(pi rho2), sin^2(pi rho1)) / sin^2(pi (rho1 + rho2))`.
pub fn grad_v(rho: [f64; 2], margin: f64) -> Result<[f64; 2], PdeError> {
    check(rho, margin)?;
    Ok(grad_unchecked(rho))
}

/// Hessian with its eigenvalues (ascending).
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct HessianInfo {
    pub matrix: [[f64; 2]; 2],
    pub eigenvalues: [f64; 2],
}

impl HessianInfo {
    pub fn det(&self) -> f64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    /// Number of positive and negative eigenvalues.
    pub fn signature(&self) -> (usize, usize) {
        let pos = self.eigenvalues.iter().filter(|&&e| e > 0.0).count();
        let neg = self.eigenvalues.iter().filter(|&&e| e < 0.0).count();
        (pos, neg)
    }
}

pub fn symmetric_eigenvalues(m: [[f64; 2]; 2]) -> [f64; 2] {
    let tr = m[0][0] + m[1][1];
    let d = (m[0][0] - m[1][1]) * 0.5;
    let disc = libm::sqrt(d * d + m[0][1] * m[1][0]);
    [0.5 * tr - disc, 0.5 * tr + disc]
}

pub fn hessian_v(rho: [f64; 2], margin: f64) -> Result<HessianInfo, PdeError> {
    check(rho, margin)?;
    let matrix = hessian_unchecked(rho);
    Ok(HessianInfo {
        matrix,
        eigenvalues: symmetric_eigenvalues(matrix),
    })
}
