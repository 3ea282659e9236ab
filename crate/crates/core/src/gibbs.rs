//! Monte Carlo sampling of stationary tilings on a torus and the equilibrium
//! statistics measured on them.
//!
//! The torus identifies `x` with `x + N e1` and `x + N e2` up to the height
//! shifts `n1` and `n2`, so the tile proportions `(n1, n2, N - n1 - n2) / N`
//! are conserved. The chain adds or removes one unit cube at a uniformly
//! chosen vertex, each with probability 1/2, whenever the increment
//! constraints allow it; the proposal is symmetric, so the uniform measure on
//! the sector is stationary.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::height::{config_from_height, HeightError, HeightField};
use crate::lattice::{Half, LocalizationBox, ParticleConfig, Slope, StarVertex, Window};
use crate::pde::drift::{grad_unchecked, v_unchecked};
use crate::sim::{dependence_region, generate_events, inflow_room, simulate, SimError, SimOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GibbsError {
    #[error("period {n} leaves {n3} particles per line for slope ({rho1}, {rho2}); need at least 2")]
    Infeasible { n: usize, n3: i64, rho1: f64, rho2: f64 },
    #[error("drift run needs at least one seed and positive T")]
    EmptyRun,
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A stepped surface on the `N x N` torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusTiling {
    pub n: usize,
    pub n1: i64,
    pub n2: i64,
    /// Heights on the fundamental domain, index `x1 + N x2`.
    heights: Vec<i64>,
}

impl TorusTiling {
    /// The maximally even surface `floor((n1 x1 + n2 x2) / N)` with
    /// `n_i = round(N rho_i)`.
    pub fn flat(slope: Slope, n: usize) -> Result<Self, GibbsError> {
        let nn = n as i64;
        let n1 = libm::round(n as f64 * slope.rho1) as i64;
        let n2 = libm::round(n as f64 * slope.rho2) as i64;
        let n3 = nn - n1 - n2;
        if n < 2 || n3 < 2 || n1 < 0 || n2 < 0 {
            return Err(GibbsError::Infeasible {
                n,
                n3,
                rho1: slope.rho1,
                rho2: slope.rho2,
            });
        }
        let mut heights = Vec::with_capacity(n * n);
        for x2 in 0..nn {
            for x1 in 0..nn {
                heights.push((n1 * x1 + n2 * x2).div_euclid(nn));
            }
        }
        Ok(TorusTiling { n, n1, n2, heights })
    }

    /// Realised slope `(n1, n2) / N`.
    pub fn slope(&self) -> [f64; 2] {
        [self.n1 as f64 / self.n as f64, self.n2 as f64 / self.n as f64]
    }

    pub fn particles_per_line(&self) -> i64 {
        self.n as i64 - self.n1 - self.n2
    }

    pub fn height(&self, v: StarVertex) -> i64 {
        let nn = self.n as i64;
        let (q1, r1) = (v.x1.div_euclid(nn), v.x1.rem_euclid(nn));
        let (q2, r2) = (v.x2.div_euclid(nn), v.x2.rem_euclid(nn));
        self.heights[(r1 + nn * r2) as usize] + q1 * self.n1 + q2 * self.n2
    }

    /// Height at a fundamental-domain vertex shifted by at most one step
    /// per axis, without the general division.
    #[inline]
    fn near(&self, x1: i64, x2: i64, d1: i64, d2: i64) -> i64 {
        let nn = self.n as i64;
        let (mut y1, mut y2, mut c) = (x1 + d1, x2 + d2, 0);
        if y1 >= nn {
            y1 -= nn;
            c += self.n1;
        } else if y1 < 0 {
            y1 += nn;
            c -= self.n1;
        }
        if y2 >= nn {
            y2 -= nn;
            c += self.n2;
        } else if y2 < 0 {
            y2 += nn;
            c -= self.n2;
        }
        self.heights[(y1 + nn * y2) as usize] + c
    }

    /// Add (`up`) or remove one cube at fundamental-domain vertex `(x1, x2)`
    /// if the six surrounding increments allow it.
    pub fn try_move(&mut self, x1: i64, x2: i64, up: bool) -> bool {
        let nn = self.n as i64;
        let idx = (x1 + nn * x2) as usize;
        let h = self.heights[idx];
        let (fwd, back) = if up { (h + 1, h) } else { (h, h - 1) };
        for (d1, d2) in [(1, 0), (0, 1), (1, 1)] {
            if self.near(x1, x2, d1, d2) != fwd || self.near(x1, x2, -d1, -d2) != back {
                return false;
            }
        }
        self.heights[idx] += if up { 1 } else { -1 };
        true
    }

    /// `sweeps` rounds of `N^2` proposals, each a uniform vertex and a fair
    /// coin for the direction.
    pub fn run<R: Rng>(&mut self, sweeps: u64, rng: &mut R) {
        let n = self.n as u64;
        let proposals = sweeps * n * n;
        for _ in 0..proposals {
            let r = rng.random_range(0..2 * n * n);
            let (v, up) = (r >> 1, r & 1 == 1);
            self.try_move((v % n) as i64, (v / n) as i64, up);
        }
    }

    /// Heights on `window`, unrolled from the torus.
    pub fn unroll(&self, window: &Window) -> HeightField {
        HeightField::from_fn(window, self.height(StarVertex::ORIGIN), |v| self.height(v))
    }

    pub fn to_config(&self, window: &Window) -> Result<ParticleConfig, GibbsError> {
        Ok(config_from_height(&self.unroll(window))?)
    }

    /// Check all increments on the fundamental domain (with wrap-around).
    pub fn is_valid(&self) -> bool {
        let nn = self.n as i64;
        (0..nn).all(|x2| {
            (0..nn).all(|x1| {
                let v = StarVertex::new(x1, x2);
                let h = self.height(v);
                [(1, 0), (0, 1), (1, 1)]
                    .iter()
                    .all(|&(a, b)| (0..=1).contains(&(self.height(v.offset(a, b)) - h)))
            })
        })
    }
}

/// Default number of sweeps before a sample is used: `10 N^2`.
pub fn default_sweeps(n: usize) -> u64 {
    10 * (n * n) as u64
}

/// Run the cube-flip chain from the flat surface.
pub fn sample_gibbs(slope: Slope, n: usize, sweeps: u64, seed: u64) -> Result<TorusTiling, GibbsError> {
    let mut t = TorusTiling::flat(slope, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    t.run(sweeps, &mut rng);
    Ok(t)
}

/// Number of particles of `line` with horizontal coordinate in `[1, r]`.
pub fn density_stats(cfg: &ParticleConfig, line: i64, r: i64) -> u64 {
    cfg.line(line)
        .map(|ln| ln.pos.iter().filter(|&&z| (2..=2 * r).contains(&z)).count() as u64)
        .unwrap_or(0)
}

/// `max |h(x) - h(0) - rho . x|` over `|x1|, |x2| <= lwin`.
pub fn fluctuation_stats(t: &TorusTiling, rho: Slope, lwin: i64) -> f64 {
    let h0 = t.height(StarVertex::ORIGIN) as f64;
    let mut worst: f64 = 0.0;
    for x2 in -lwin..=lwin {
        for x1 in -lwin..=lwin {
            let d = t.height(StarVertex::new(x1, x2)) as f64 - h0 - rho.rho1 * x1 as f64 - rho.rho2 * x2 as f64;
            worst = worst.max(d.abs());
        }
    }
    worst
}

/// Geometry and parameters of one stationary drift run.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DriftSetup {
    pub slope: Slope,
    pub n: usize,
    pub horizon: f64,
    /// Widening beyond the backward characteristics: `ceil(kappa * T)` sites.
    pub kappa: f64,
    pub sweeps: u64,
}

impl DriftSetup {
    pub fn margin(&self) -> i64 {
        libm::ceil(self.kappa * self.horizon) as i64
    }

    /// Probe vertices: a 4 x 4 grid spread over the central half-period.
    pub fn probes(&self) -> Vec<StarVertex> {
        let q = (self.n as i64 / 4).max(1);
        let mut out = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                let line = -q + (2 * q * i) / 3;
                let z2 = -q + (2 * q * j) / 3;
                let z2 = if (z2 - line - 1).rem_euclid(2) == 0 { z2 } else { z2 + 1 };
                out.push(StarVertex::from_line_z(line, Half(z2)).expect("parity"));
            }
        }
        out
    }

    /// Clock box around the probes and the feet of their backward
    /// characteristics, widened by the margin (twice across lines).
    pub fn region(&self) -> LocalizationBox {
        let g = grad_unchecked(self.slope.as_array());
        let t = self.horizon;
        let points: Vec<[f64; 2]> = self
            .probes()
            .iter()
            .flat_map(|v| {
                let p = [v.x1 as f64, v.x2 as f64];
                [p, [p[0] - t * g[0], p[1] - t * g[1]]]
            })
            .collect();
        dependence_region(&points, t, self.kappa)
    }

    /// Window holding the box plus room for particles drawn in from the right.
    pub fn window(&self) -> Window {
        let b = self.region();
        let room = inflow_room(v_unchecked(self.slope.as_array()), self.slope.rho3(), self.horizon);
        Window::around_box(&b, Half(2), Half(2 * room))
    }
}

fn event_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

/// Mean of `J_x(T) / T` over the probes for one seed.
pub fn drift_run(setup: &DriftSetup, seed: u64) -> Result<f64, GibbsError> {
    if !(setup.horizon > 0.0) {
        return Err(GibbsError::EmptyRun);
    }
    let tiling = sample_gibbs(setup.slope, setup.n, setup.sweeps, seed)?;
    let cfg = tiling.to_config(&setup.window())?;
    let stream = generate_events(event_seed(seed), setup.region(), setup.horizon).expect("positive horizon");
    let opts = SimOptions {
        probes: setup.probes(),
        ..Default::default()
    };
    let tr = simulate(&cfg, stream.iter(), &opts)?;
    let total: u64 = tr.crossings.iter().sum();
    Ok(total as f64 / (tr.crossings.len() as f64 * setup.horizon))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DriftEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub per_seed: Vec<f64>,
}

/// Mean and standard error over per-seed estimates.
pub fn summarize_drift(per_seed: Vec<f64>) -> Result<DriftEstimate, GibbsError> {
    if per_seed.is_empty() {
        return Err(GibbsError::EmptyRun);
    }
    let k = per_seed.len() as f64;
    let mean = per_seed.iter().sum::<f64>() / k;
    let var = if per_seed.len() > 1 {
        per_seed.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    Ok(DriftEstimate {
        mean,
        stderr: libm::sqrt(var / k),
        per_seed,
    })
}

/// Stationary drift `v(rho)` estimated over `seeds`.
pub fn drift_estimate(setup: &DriftSetup, seeds: &[u64]) -> Result<DriftEstimate, GibbsError> {
    let per_seed = seeds.iter().map(|&s| drift_run(setup, s)).collect::<Result<Vec<_>, _>>()?;
    summarize_drift(per_seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> Slope {
        Slope::new(1.0 / 3.0, 1.0 / 3.0, 0.02).unwrap()
    }

    #[test]
    fn zero_sweeps_is_flat() {
        let t = sample_gibbs(third(), 12, 0, 1).unwrap();
        assert_eq!(t, TorusTiling::flat(third(), 12).unwrap());
        assert!(t.is_valid());
        assert_eq!(t.particles_per_line(), 4);
    }

    #[test]
    fn infeasible_period() {
        assert!(matches!(
            TorusTiling::flat(Slope::new(0.45, 0.45, 0.02).unwrap(), 10),
            Err(GibbsError::Infeasible { .. })
        ));
    }

    #[test]
    fn move_is_its_own_inverse() {
        let mut t = sample_gibbs(third(), 9, 3, 2).unwrap();
        let before = t.clone();
        let mut tried = 0;
        for x1 in 0..9 {
            for x2 in 0..9 {
                for up in [true, false] {
                    if t.try_move(x1, x2, up) {
                        assert!(t.is_valid());
                        assert!(t.try_move(x1, x2, !up));
                        assert_eq!(t, before);
                        tried += 1;
                    }
                }
            }
        }
        assert!(tried > 0);
    }

    #[test]
    fn chain_preserves_sector() {
        let t = sample_gibbs(third(), 12, 50, 3).unwrap();
        assert!(t.is_valid());
        let w = Window::new(-12, 12, Half(-30), Half(30)).unwrap();
        let cfg = t.to_config(&w).unwrap();
        // 4 particles per period of 12 along every line
        for (i, ln) in cfg.lines.iter().enumerate() {
            let line = cfg.first_line + i as i64;
            let z0 = ln.lo;
            let n = ln.pos.iter().filter(|&&z| z > z0 && z < z0 + 24).count();
            assert_eq!(n, 4, "line {line}");
        }
    }

    #[test]
    fn full_line_density() {
        let w = Window::new(0, 0, Half(-1), Half(21)).unwrap();
        let h = HeightField::from_fn(&w, 0, |v| v.x1 - v.x2);
        // diagonal increments all zero: a particle at every site
        let cfg = config_from_height(&h).unwrap();
        assert_eq!(density_stats(&cfg, 0, 10), 10);
    }

    #[test]
    fn periodic_surface_fluctuation_small() {
        let t = TorusTiling::flat(third(), 30).unwrap();
        assert!(fluctuation_stats(&t, Slope::new(1.0 / 3.0, 1.0 / 3.0, 0.0).unwrap(), 30) <= 1.0);
    }
}
