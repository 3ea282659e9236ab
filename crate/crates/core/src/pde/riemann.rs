//! One-dimensional Riemann problems.
//!
//! Initial data `phi0(x) = c beta . x + psi0(n . x)` with `psi0(y) = u_- y`
//! for `y < 0` and `u_+ y` for `y > 0` stay one-dimensional:
//! `phi(x, t) = c beta . x + psi(n . x, t)` where `psi` solves the scalar
//! problem with flux `V(s) = v(c beta + s n)`. For `u_- < u_+` the data is
//! convex and `psi(y, t) = max over s in [u_-, u_+] of (s y - t V(s))`; for
//! `u_- > u_+` the max becomes a min over `[u_+, u_-]`.
//!
//! Flat pieces of the convex (resp. concave) envelope of `V` on the slope
//! interval are shocks; everywhere else the gradient spreads as a fan.

use alloc::vec::Vec;

use crate::pde::drift::{drift_v, DEFAULT_MARGIN};
use crate::pde::grid::{Axis, GridFunction1D};
use crate::pde::legendre::{concave_envelope_1d, convex_envelope_1d, flat_pieces, lower_hull_1d};
use crate::pde::PdeError;
use crate::profile::ProfileSpec;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RiemannSpec {
    pub c: f64,
    pub beta: [f64; 2],
    pub n: [f64; 2],
    pub u_minus: f64,
    pub u_plus: f64,
}

fn unit(v: [f64; 2]) -> Option<[f64; 2]> {
    let r = libm::sqrt(v[0] * v[0] + v[1] * v[1]);
    (r > 0.0 && r.is_finite()).then(|| [v[0] / r, v[1] / r])
}

impl RiemannSpec {
    pub fn new(c: f64, beta: [f64; 2], n: [f64; 2], u_minus: f64, u_plus: f64) -> Result<Self, PdeError> {
        let is_unit = |v: [f64; 2]| ((v[0] * v[0] + v[1] * v[1]) - 1.0).abs() < 1e-9;
        if !is_unit(beta) || !is_unit(n) {
            return Err(PdeError::RiemannDomain("beta and n must be unit vectors"));
        }
        if !(c.is_finite() && u_minus.is_finite() && u_plus.is_finite()) {
            return Err(PdeError::RiemannDomain("non-finite parameter"));
        }
        let s = RiemannSpec { c, beta, n, u_minus, u_plus };
        // the slope triangle is convex, so checking the endpoints covers the segment
        for u in [u_minus, u_plus] {
            if drift_v(s.slope(u), DEFAULT_MARGIN).is_err() {
                return Err(PdeError::RiemannDomain("an endpoint slope leaves the triangle"));
            }
        }
        Ok(s)
    }

    /// The data `max(minus . x, plus . x)`.
    pub fn from_kink(minus: [f64; 2], plus: [f64; 2]) -> Result<Self, PdeError> {
        let n = unit([plus[0] - minus[0], plus[1] - minus[1]]).ok_or(PdeError::RiemannDomain("identical slopes"))?;
        let beta = unit(minus).ok_or(PdeError::RiemannDomain("zero base slope"))?;
        let c = libm::sqrt(minus[0] * minus[0] + minus[1] * minus[1]);
        let du = libm::hypot(plus[0] - minus[0], plus[1] - minus[1]);
        RiemannSpec::new(c, beta, n, 0.0, du)
    }

    /// `c beta + s n`.
    pub fn slope(&self, s: f64) -> [f64; 2] {
        [self.c * self.beta[0] + s * self.n[0], self.c * self.beta[1] + s * self.n[1]]
    }

    pub fn flux(&self, s: f64) -> f64 {
        crate::pde::drift::v_unchecked(self.slope(s))
    }

    pub fn is_increasing(&self) -> bool {
        self.u_minus <= self.u_plus
    }

    /// The catalog profile for increasing data.
    pub fn profile(&self) -> Option<ProfileSpec> {
        self.is_increasing().then(|| ProfileSpec::Kink {
            minus: self.slope(self.u_minus),
            plus: self.slope(self.u_plus),
        })
    }

    pub fn initial(&self, x: [f64; 2]) -> f64 {
        let y = self.n[0] * x[0] + self.n[1] * x[1];
        let base = self.c * (self.beta[0] * x[0] + self.beta[1] * x[1]);
        let (a, b) = (self.u_minus * y, self.u_plus * y);
        base + if self.is_increasing() { a.max(b) } else { a.min(b) }
    }

    fn interval(&self) -> (f64, f64) {
        (self.u_minus.min(self.u_plus), self.u_minus.max(self.u_plus))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum WaveKind {
    /// `u_- = u_+`.
    Constant,
    Rarefaction,
    Shock,
}

impl WaveKind {
    pub fn name(self) -> &'static str {
        match self {
            WaveKind::Constant => "constant",
            WaveKind::Rarefaction => "rarefaction",
            WaveKind::Shock => "shock",
        }
    }
}

/// Which envelope computation classifies the flux.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EnvelopeMethod {
    /// Exact hull of the sampled flux.
    Hull,
    /// Double Legendre transform.
    DoubleLegendre,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RiemannOptions {
    /// Nodes of the slope grid.
    pub s_nodes: usize,
    /// Dual nodes for the double transform.
    pub dual_nodes: usize,
    /// Minimal gap between the flux and its envelope that counts as flat.
    pub tol: f64,
}

impl Default for RiemannOptions {
    fn default() -> Self {
        RiemannOptions {
            s_nodes: 2001,
            dual_nodes: 40001,
            tol: 1e-4,
        }
    }
}

/// A shock joining slopes `s_lo < s_hi`, moving at `speed` in `y / t`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ShockWave {
    pub s_lo: f64,
    pub s_hi: f64,
    pub speed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub kind: WaveKind,
    pub flats: Vec<ShockWave>,
}

fn flux_grid(spec: &RiemannSpec, n: usize) -> Result<GridFunction1D, PdeError> {
    let (lo, hi) = spec.interval();
    let axis = if lo == hi { Axis::new(lo, 1.0, 1)? } else { Axis::spanning(lo, hi, n.max(2))? };
    Ok(GridFunction1D::from_fn(axis, |s| spec.flux(s)))
}

/// Flat pieces of the envelope of `V` relevant to the sign of the data.
pub fn classify(spec: &RiemannSpec, opts: RiemannOptions, method: EnvelopeMethod) -> Result<Classification, PdeError> {
    if spec.u_minus == spec.u_plus {
        return Ok(Classification {
            kind: WaveKind::Constant,
            flats: Vec::new(),
        });
    }
    let v = flux_grid(spec, opts.s_nodes)?;
    let inc = spec.is_increasing();
    let (f, env) = match (method, inc) {
        (EnvelopeMethod::Hull, true) => (v.clone(), lower_hull_1d(&v)?),
        (EnvelopeMethod::Hull, false) => {
            let neg = GridFunction1D::new(v.axis, v.values.iter().map(|x| -x).collect())?;
            let h = lower_hull_1d(&neg)?;
            (neg, h)
        }
        (EnvelopeMethod::DoubleLegendre, true) => (v.clone(), convex_envelope_1d(&v, opts.dual_nodes)?),
        (EnvelopeMethod::DoubleLegendre, false) => {
            let env = concave_envelope_1d(&v, opts.dual_nodes)?;
            // compare as a lower envelope of -V
            let neg = |g: &GridFunction1D| GridFunction1D::new(g.axis, g.values.iter().map(|x| -x).collect());
            (neg(&v)?, neg(&env)?)
        }
    };
    let flats: Vec<ShockWave> = flat_pieces(&f, &env, opts.tol)
        .into_iter()
        .map(|(a, b)| ShockWave {
            s_lo: a,
            s_hi: b,
            speed: (spec.flux(b) - spec.flux(a)) / (b - a),
        })
        .collect();
    let kind = if flats.is_empty() { WaveKind::Rarefaction } else { WaveKind::Shock };
    Ok(Classification { kind, flats })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiemannSolution {
    pub t: f64,
    pub psi: GridFunction1D,
    /// The optimal slope, which is the `y`-derivative of `psi` wherever the
    /// optimiser is unique.
    pub u: GridFunction1D,
    pub classification: Classification,
}

/// `psi(y, t)` and `u(y, t)` on the axis `ys`.
pub fn riemann_solve(spec: &RiemannSpec, t: f64, ys: Axis, opts: RiemannOptions) -> Result<RiemannSolution, PdeError> {
    if !(t >= 0.0) {
        return Err(PdeError::Grid("time must be nonnegative"));
    }
    let classification = classify(spec, opts, EnvelopeMethod::Hull)?;
    let v = flux_grid(spec, opts.s_nodes)?;
    let inc = spec.is_increasing();
    let mut psi = Vec::with_capacity(ys.n);
    let mut u = Vec::with_capacity(ys.n);
    for y in ys.nodes() {
        let mut best = if inc { f64::NEG_INFINITY } else { f64::INFINITY };
        let mut arg = v.axis.lo;
        for (s, vs) in v.axis.nodes().zip(&v.values) {
            let val = s * y - t * vs;
            if (inc && val > best) || (!inc && val < best) {
                best = val;
                arg = s;
            }
        }
        psi.push(best);
        u.push(arg);
    }
    Ok(RiemannSolution {
        t,
        psi: GridFunction1D::new(ys, psi)?,
        u: GridFunction1D::new(ys, u)?,
        classification,
    })
}

/// `phi(x, t) = c beta . x + psi(n . x, t)` at a single point.
pub fn riemann_value(spec: &RiemannSpec, x: [f64; 2], t: f64, s_nodes: usize) -> Result<f64, PdeError> {
    let v = flux_grid(spec, s_nodes)?;
    let y = spec.n[0] * x[0] + spec.n[1] * x[1];
    let base = spec.c * (spec.beta[0] * x[0] + spec.beta[1] * x[1]);
    let vals = v.axis.nodes().zip(&v.values).map(|(s, vs)| s * y - t * vs);
    let psi = if spec.is_increasing() {
        vals.fold(f64::NEG_INFINITY, f64::max)
    } else {
        vals.fold(f64::INFINITY, f64::min)
    };
    Ok(base + psi)
}
