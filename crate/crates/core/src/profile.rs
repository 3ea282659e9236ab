//! Analytic initial profiles `phi0` with gradient, Hessian and convex conjugate.

use alloc::vec::Vec;

use thiserror::Error;

use crate::lattice::Slope;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("slope range of profile `{name}` leaves the triangle interior with margin {margin}")]
    SlopeRange { name: &'static str, margin: f64 },
    #[error("invalid profile parameter: {0}")]
    Parameter(&'static str),
}

/// Axis-aligned box of slopes containing the gradient range of a profile.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SlopeBox {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl SlopeBox {
    /// Whether every point of the closed box is inside the triangle with margin `m`.
    pub fn inside_triangle(&self, m: f64) -> bool {
        self.lo[0] >= m && self.lo[1] >= m && self.hi[0] + self.hi[1] <= 1.0 - m
    }

    /// Largest `rho1 + rho2` over the box.
    pub fn max_sum(&self) -> f64 {
        self.hi[0] + self.hi[1]
    }
}

/// Catalog of initial profiles.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum ProfileSpec {
    /// `rho . x`
    Affine { rho: [f64; 2] },
    /// `rho . x + a R^2 (sqrt(1 + |x - c|^2 / R^2) - 1)`: Hessian `a I` at
    /// the centre, gradient confined to the open disc of radius `|a| R`
    /// around `rho`. Convex for `a >= 0`.
    Bump {
        rho: [f64; 2],
        center: [f64; 2],
        a: f64,
        radius: f64,
    },
    /// `max(minus . x, plus . x)`.
    Kink { minus: [f64; 2], plus: [f64; 2] },
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl ProfileSpec {
    pub fn affine(rho: Slope) -> Self {
        ProfileSpec::Affine { rho: rho.as_array() }
    }

    pub fn bump(rho: Slope, center: [f64; 2], a: f64, radius: f64, margin: f64) -> Result<Self, ProfileError> {
        if !(radius > 0.0) || !a.is_finite() {
            return Err(ProfileError::Parameter("bump needs radius > 0 and finite curvature"));
        }
        let p = ProfileSpec::Bump {
            rho: rho.as_array(),
            center,
            a,
            radius,
        };
        p.check(margin)
    }

    pub fn kink(minus: [f64; 2], plus: [f64; 2], margin: f64) -> Result<Self, ProfileError> {
        if minus == plus {
            return Err(ProfileError::Parameter("kink slopes must differ"));
        }
        ProfileSpec::Kink { minus, plus }.check(margin)
    }

    fn check(self, margin: f64) -> Result<Self, ProfileError> {
        if self.slope_box().inside_triangle(margin) {
            Ok(self)
        } else {
            Err(ProfileError::SlopeRange {
                name: self.name(),
                margin,
            })
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProfileSpec::Affine { .. } => "affine",
            ProfileSpec::Bump { .. } => "bump",
            ProfileSpec::Kink { .. } => "kink",
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            ProfileSpec::Bump { a, .. } => *a >= 0.0,
            _ => true,
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        match *self {
            ProfileSpec::Affine { rho } => dot(rho, x),
            ProfileSpec::Bump { rho, center, a, radius } => {
                let u = [x[0] - center[0], x[1] - center[1]];
                let q = dot(u, u) / (radius * radius);
                // sqrt(1+q) - 1 without cancellation
                dot(rho, x) + a * radius * radius * q / (libm::sqrt(1.0 + q) + 1.0)
            }
            ProfileSpec::Kink { minus, plus } => dot(minus, x).max(dot(plus, x)),
        }
    }

    /// Gradient; at a kink the `plus` side is returned on the tie.
    pub fn grad(&self, x: [f64; 2]) -> [f64; 2] {
        match *self {
            ProfileSpec::Affine { rho } => rho,
            ProfileSpec::Bump { rho, center, a, radius } => {
                let u = [x[0] - center[0], x[1] - center[1]];
                let s = libm::sqrt(1.0 + dot(u, u) / (radius * radius));
                [rho[0] + a * u[0] / s, rho[1] + a * u[1] / s]
            }
            ProfileSpec::Kink { minus, plus } => {
                if dot(plus, x) >= dot(minus, x) {
                    plus
                } else {
                    minus
                }
            }
        }
    }

    /// Hessian `[[h11, h12], [h12, h22]]`; zero away from a kink.
    pub fn hess(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        match *self {
            ProfileSpec::Affine { .. } | ProfileSpec::Kink { .. } => [[0.0; 2]; 2],
            ProfileSpec::Bump { center, a, radius, .. } => {
                let u = [x[0] - center[0], x[1] - center[1]];
                let r2 = radius * radius;
                let s = libm::sqrt(1.0 + dot(u, u) / r2);
                let s3 = s * s * s;
                let h11 = a * (1.0 / s - u[0] * u[0] / (r2 * s3));
                let h12 = -a * u[0] * u[1] / (r2 * s3);
                let h22 = a * (1.0 / s - u[1] * u[1] / (r2 * s3));
                [[h11, h12], [h12, h22]]
            }
        }
    }

    /// Largest `rho1 + rho2` over the closed gradient range.
    pub fn max_slope_sum(&self) -> f64 {
        match *self {
            ProfileSpec::Affine { rho } => rho[0] + rho[1],
            ProfileSpec::Bump { rho, a, radius, .. } => rho[0] + rho[1] + core::f64::consts::SQRT_2 * a.abs() * radius,
            ProfileSpec::Kink { minus, plus } => (minus[0] + minus[1]).max(plus[0] + plus[1]),
        }
    }

    /// Bounding box of the closure of the gradient range.
    pub fn slope_box(&self) -> SlopeBox {
        match *self {
            ProfileSpec::Affine { rho } => SlopeBox { lo: rho, hi: rho },
            ProfileSpec::Bump { rho, a, radius, .. } => {
                let r = a.abs() * radius;
                SlopeBox {
                    lo: [rho[0] - r, rho[1] - r],
                    hi: [rho[0] + r, rho[1] + r],
                }
            }
            ProfileSpec::Kink { minus, plus } => SlopeBox {
                lo: [minus[0].min(plus[0]), minus[1].min(plus[1])],
                hi: [minus[0].max(plus[0]), minus[1].max(plus[1])],
            },
        }
    }

    /// Convex conjugate `phi0*(y)`, `+inf` outside the closed gradient range.
    /// Only meaningful for convex profiles.
    pub fn conjugate(&self, y: [f64; 2]) -> f64 {
        match *self {
            ProfileSpec::Affine { rho } => {
                if y == rho {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProfileSpec::Bump { rho, center, a, radius } => {
                let w = [y[0] - rho[0], y[1] - rho[1]];
                let ar = a * radius;
                let d2 = dot(w, w);
                if a == 0.0 {
                    return if d2 == 0.0 { dot(center, w) } else { f64::INFINITY };
                }
                if d2 > ar * ar {
                    return f64::INFINITY;
                }
                dot(center, w) + a * radius * radius - radius * libm::sqrt(ar * ar - d2)
            }
            ProfileSpec::Kink { minus, plus } => {
                let d = [plus[0] - minus[0], plus[1] - minus[1]];
                let w = [y[0] - minus[0], y[1] - minus[1]];
                let dd = dot(d, d);
                let s = dot(w, d) / dd;
                let perp = w[0] * d[1] - w[1] * d[0];
                if (-1e-12..=1.0 + 1e-12).contains(&s) && perp.abs() <= 1e-12 * libm::sqrt(dd) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Points of the closed gradient range paired with the conjugate there.
    ///
    /// Two-dimensional ranges are covered by a `res x res` grid over the
    /// slope box; segments by `res` equispaced points; a single slope by
    /// itself. Points where the conjugate is infinite are dropped.
    pub fn conjugate_samples(&self, res: usize) -> Vec<([f64; 2], f64)> {
        let res = res.max(2);
        let mut out = Vec::new();
        match *self {
            ProfileSpec::Affine { rho } => out.push((rho, 0.0)),
            ProfileSpec::Kink { minus, plus } => {
                for k in 0..res {
                    let s = k as f64 / (res - 1) as f64;
                    let y = [minus[0] + s * (plus[0] - minus[0]), minus[1] + s * (plus[1] - minus[1])];
                    out.push((y, 0.0));
                }
            }
            ProfileSpec::Bump { .. } => {
                let b = self.slope_box();
                for i in 0..res {
                    for j in 0..res {
                        let y = [
                            b.lo[0] + (b.hi[0] - b.lo[0]) * i as f64 / (res - 1) as f64,
                            b.lo[1] + (b.hi[1] - b.lo[1]) * j as f64 / (res - 1) as f64,
                        ];
                        let c = self.conjugate(y);
                        if c.is_finite() {
                            out.push((y, c));
                        }
                    }
                }
            }
        }
        out
    }
}
