//! Hydrodynamic-limit experiments: discretise a profile at scale `L`, grow
//! it for time `tL`, and compare `H(floor(xL), tL) / L` with the PDE
//! solution at macroscopic probes.
//!
//! Each `(L, seed)` pair is an independent task ([`run_task`]); callers may
//! run them in any order or in parallel and fold the rows with
//! [`aggregate`].

use alloc::vec::Vec;

use thiserror::Error;

use crate::height::{config_from_height, HeightError, HeightField};
use crate::lattice::{Half, LocalizationBox, ParticleConfig, StarVertex, Window};
use crate::pde::drift::{grad_unchecked, v_unchecked};
use crate::pde::characteristics::{estimate_tf, solve_point, NewtonSettings};
use crate::pde::grid::Axis;
use crate::pde::hopf::SlopeTable;
use crate::pde::riemann::{riemann_value, RiemannSpec};
use crate::pde::PdeError;
use crate::profile::ProfileSpec;
use crate::sim::{dependence_region, generate_events, inflow_room, simulate, SimError, SimOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("experiment: {0}")]
    Config(&'static str),
    #[error("t = {t} exceeds the allowed fraction of the crossing time {tf}")]
    PastCrossing { t: f64, tf: f64 },
    #[error("run needs {sites} clock sites, over the budget of {limit}")]
    Budget { sites: u64, limit: u64 },
    #[error("empty table")]
    EmptyTable,
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Pde(#[from] PdeError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Classical solution by characteristics; requires `t < T_f`.
    Smooth,
    /// Viscosity solution by the Hopf formula; requires convex data.
    Shock,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Smooth => "smooth",
            Mode::Shock => "shock",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub mode: Mode,
    pub profile: ProfileSpec,
    /// Macroscopic time.
    pub t: f64,
    pub scales: Vec<u32>,
    pub probes: Vec<[f64; 2]>,
    pub seeds_per_scale: u32,
    pub base_seed: u64,
    /// The clock box extends `ceil(kappa * t * L)` sites beyond the
    /// backward characteristics of the probes (twice that across lines).
    pub kappa: f64,
    /// How many seeds per scale also run the bracketing pair.
    pub sandwich_seeds: u32,
    /// Upper bound on clock sites per run.
    pub site_budget: u64,
}

/// Smooth runs must stay below this fraction of the estimated crossing time.
pub const SMOOTH_FRACTION: f64 = 0.8;

/// Widening of the clock box around the backward characteristics, in
/// sites per unit of microscopic time.
pub const DEFAULT_KAPPA: f64 = 2.5;
pub const DEFAULT_SITE_BUDGET: u64 = 20_000_000;

/// `n x n` probes on multiples of `step` centred at the origin.
pub fn probe_grid(n: usize, step: f64) -> Vec<[f64; 2]> {
    let c = (n as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push([(i as f64 - c) * step, (j as f64 - c) * step]);
        }
    }
    out
}

/// Drop probes within `half_width` of the line `n . x = offset`.
pub fn outside_strip(probes: &[[f64; 2]], n: [f64; 2], offset: f64, half_width: f64) -> Vec<[f64; 2]> {
    let r = libm::hypot(n[0], n[1]);
    probes
        .iter()
        .copied()
        .filter(|x| ((n[0] * x[0] + n[1] * x[1]) / r - offset).abs() >= half_width)
        .collect()
}

impl Experiment {
    /// Bump at slope `(1/3, 1/3)`, `a = 0.25`, `R = 0.6`, at half its
    /// estimated crossing time.
    pub fn default_smooth() -> Self {
        let profile = ProfileSpec::Bump {
            rho: [1.0 / 3.0, 1.0 / 3.0],
            center: [0.0, 0.0],
            a: 0.25,
            radius: 0.6,
        };
        let tf = crossing_time(&profile).unwrap_or(f64::INFINITY);
        Experiment {
            mode: Mode::Smooth,
            profile,
            t: 0.5 * tf,
            scales: alloc::vec![32, 64, 128],
            probes: probe_grid(5, 0.125),
            seeds_per_scale: 8,
            base_seed: 1,
            kappa: DEFAULT_KAPPA,
            sandwich_seeds: 1,
            site_budget: DEFAULT_SITE_BUDGET,
        }
    }

    /// Kink across the line `x1 = x2` whose flux is concave along the jump,
    /// so the discontinuity persists; probes avoid a strip of half-width 0.1.
    pub fn default_shock() -> Self {
        let d = 0.1;
        let third = 1.0 / 3.0;
        let profile = ProfileSpec::Kink {
            minus: [third - d, third + d],
            plus: [third + d, third - d],
        };
        let n = [core::f64::consts::FRAC_1_SQRT_2, -core::f64::consts::FRAC_1_SQRT_2];
        Experiment {
            mode: Mode::Shock,
            profile,
            t: 0.5,
            scales: alloc::vec![32, 64, 128],
            probes: outside_strip(&probe_grid(5, 0.125), n, 0.0, 0.1),
            seeds_per_scale: 8,
            base_seed: 2,
            kappa: DEFAULT_KAPPA,
            sandwich_seeds: 1,
            site_budget: DEFAULT_SITE_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.probes.is_empty() {
            return Err(HarnessError::Config("no probes"));
        }
        if self.scales.is_empty() || self.scales.contains(&0) {
            return Err(HarnessError::Config("scales must be positive and nonempty"));
        }
        if self.seeds_per_scale == 0 {
            return Err(HarnessError::Config("seeds_per_scale must be positive"));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(HarnessError::Config("t must be finite and nonnegative"));
        }
        if !(self.kappa > 0.0) {
            return Err(HarnessError::Config("kappa must be positive"));
        }
        match self.mode {
            Mode::Smooth => {
                if let Some(tf) = crossing_time(&self.profile) {
                    if self.t > SMOOTH_FRACTION * tf {
                        return Err(HarnessError::PastCrossing { t: self.t, tf });
                    }
                }
            }
            Mode::Shock => {
                if !self.profile.is_convex() {
                    return Err(HarnessError::Config("shock mode needs convex data"));
                }
            }
        }
        Ok(())
    }

    /// Seed of the `k`-th run at scale `l`.
    pub fn run_seed(&self, l: u32, k: u32) -> u64 {
        self.base_seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(((l as u64) << 32) | k as u64)
    }

    pub fn tasks(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for &l in &self.scales {
            for k in 0..self.seeds_per_scale {
                out.push((l, k));
            }
        }
        out
    }
}

/// Crossing time estimated on `[-2, 2]^2`, or `None` when characteristics
/// do not cross before `t = 1000`.
pub fn crossing_time(profile: &ProfileSpec) -> Option<f64> {
    let a = Axis::spanning(-2.0, 2.0, 81).expect("fixed axis");
    estimate_tf(profile, a, a, 1e3, 1e-3)
}

/// PDE values at the probes.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    pub values: Vec<f64>,
    /// Macroscopic points on the backward characteristics of the probes;
    /// the clock box must cover them.
    pub feet: Vec<[f64; 2]>,
    /// For kinks, the largest difference between the Hopf values and the
    /// one-dimensional Riemann reduction.
    pub riemann_gap: Option<f64>,
}

pub fn reference(exp: &Experiment) -> Result<Reference, HarnessError> {
    match exp.mode {
        Mode::Smooth => {
            let pts = exp
                .probes
                .iter()
                .map(|&x| solve_point(&exp.profile, x, exp.t, NewtonSettings::default()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Reference {
                values: pts.iter().map(|c| c.phi).collect(),
                feet: pts.iter().map(|c| c.x0).collect(),
                riemann_gap: None,
            })
        }
        Mode::Shock => {
            let table = SlopeTable::from_profile(&exp.profile, 401)?;
            let values: Vec<f64> = exp.probes.iter().map(|&x| table.evaluate(x, exp.t).0).collect();
            // every slope of the data can reach a probe
            let stride = (table.len() / 16).max(1);
            let mut feet = Vec::new();
            for y in table.points.iter().step_by(stride).chain(table.points.last()) {
                let g = grad_unchecked(*y);
                feet.extend(exp.probes.iter().map(|x| [x[0] - exp.t * g[0], x[1] - exp.t * g[1]]));
            }
            let riemann_gap = match exp.profile {
                ProfileSpec::Kink { minus, plus } => {
                    let spec = RiemannSpec::from_kink(minus, plus)?;
                    let mut gap: f64 = 0.0;
                    for (x, v) in exp.probes.iter().zip(&values) {
                        gap = gap.max((riemann_value(&spec, *x, exp.t, 4001)? - v).abs());
                    }
                    Some(gap)
                }
                _ => None,
            };
            Ok(Reference { values, feet, riemann_gap })
        }
    }
}

/// `floor(x L)` componentwise.
pub fn micro_vertex(x: [f64; 2], l: u32) -> StarVertex {
    let l = l as f64;
    StarVertex::new(libm::floor(x[0] * l) as i64, libm::floor(x[1] * l) as i64)
}

/// Clock box, window and probe vertices for one scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    pub probes: Vec<StarVertex>,
    pub region: LocalizationBox,
    pub window: Window,
}

pub fn geometry(exp: &Experiment, reference: &Reference, l: u32) -> Result<Geometry, HarnessError> {
    let s = l as f64;
    let probes: Vec<StarVertex> = exp.probes.iter().map(|&x| micro_vertex(x, l)).collect();
    let points: Vec<[f64; 2]> = probes
        .iter()
        .map(|v| [v.x1 as f64, v.x2 as f64])
        .chain(reference.feet.iter().map(|x| [x[0] * s, x[1] * s]))
        .collect();
    let horizon = exp.t * s;
    let region = dependence_region(&points, horizon, exp.kappa);
    let sites = region.site_count();
    if sites > exp.site_budget {
        return Err(HarnessError::Budget { sites, limit: exp.site_budget });
    }
    // particles drawn in from the right need room beyond the box
    let sum = exp.profile.max_slope_sum();
    // along a line of fixed rho1 + rho2 the drift peaks on the diagonal
    let v = v_unchecked([0.5 * sum, 0.5 * sum]);
    let room = inflow_room(v, 1.0 - sum, horizon);
    let window = Window::around_box(&region, Half(2), Half(2 * room));
    Ok(Geometry { probes, region, window })
}

/// `floor(L phi0((X + shift) / L)) + offset` on `window`.
pub fn discretize(profile: &ProfileSpec, l: u32, window: &Window, shift: i64, offset: i64) -> Result<ParticleConfig, HarnessError> {
    let s = l as f64;
    let micro = |v: StarVertex| libm::floor(s * profile.eval([(v.x1 + shift) as f64 / s, v.x2 as f64 / s])) as i64 + offset;
    let h = HeightField::from_fn(window, micro(StarVertex::ORIGIN), micro);
    h.check_increments()?;
    Ok(config_from_height(&h)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub scale: u32,
    pub seed: u64,
    pub probe: [f64; 2],
    /// `H(floor(xL), tL) / L`.
    pub simulated: f64,
    pub reference: f64,
    pub error: f64,
    /// Whether the bracketing pair enclosed this height, when it was run.
    pub bracketed: Option<bool>,
}

/// One `(L, seed)` task.
pub fn run_task(exp: &Experiment, reference: &Reference, l: u32, k: u32) -> Result<Vec<ConvergenceRow>, HarnessError> {
    let g = geometry(exp, reference, l)?;
    let seed = exp.run_seed(l, k);
    let horizon = exp.t * l as f64;
    let opts = SimOptions {
        probes: g.probes.clone(),
        ..Default::default()
    };
    let run = |cfg: &ParticleConfig| -> Result<Vec<i64>, HarnessError> {
        if horizon <= 0.0 {
            let tr = simulate(cfg, core::iter::empty(), &opts)?;
            return Ok(tr.final_heights());
        }
        let stream = generate_events(seed, g.region, horizon).map_err(|_| HarnessError::Config("bad horizon"))?;
        Ok(simulate(cfg, stream.iter(), &opts)?.final_heights())
    };
    let heights = run(&discretize(&exp.profile, l, &g.window, 0, 0)?)?;
    let bracket = if k < exp.sandwich_seeds {
        // h(x + e1) - 1 <= h(x) <= h(x - e1) + 1, and the order survives
        // the shared clocks
        let lo = run(&discretize(&exp.profile, l, &g.window, 1, -1)?)?;
        let hi = run(&discretize(&exp.profile, l, &g.window, -1, 1)?)?;
        Some((lo, hi))
    } else {
        None
    };
    let s = l as f64;
    Ok(exp
        .probes
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let simulated = heights[i] as f64 / s;
            ConvergenceRow {
                scale: l,
                seed,
                probe: x,
                simulated,
                reference: reference.values[i],
                error: (simulated - reference.values[i]).abs(),
                bracketed: bracket.as_ref().map(|(lo, hi)| lo[i] <= heights[i] && heights[i] <= hi[i]),
            }
        })
        .collect())
}

/// All tasks in order.
pub fn run_experiment(exp: &Experiment) -> Result<Vec<ConvergenceRow>, HarnessError> {
    exp.validate()?;
    let r = reference(exp)?;
    let mut rows = Vec::new();
    for (l, k) in exp.tasks() {
        rows.extend(run_task(exp, &r, l, k)?);
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSummary {
    pub scale: u32,
    pub rows: usize,
    pub median: f64,
    pub max: f64,
    /// Bracketed rows over rows that ran the bracket.
    pub bracketed: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub scales: Vec<ScaleSummary>,
    pub threshold: f64,
    pub pass: bool,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Per-scale median and max error. Passes iff the medians do not increase
/// along increasing `L` and the last one is at most `threshold`.
pub fn aggregate(rows: &[ConvergenceRow], threshold: f64) -> Result<Summary, HarnessError> {
    if rows.is_empty() {
        return Err(HarnessError::EmptyTable);
    }
    let mut scales: Vec<u32> = rows.iter().map(|r| r.scale).collect();
    scales.sort_unstable();
    scales.dedup();
    let per: Vec<ScaleSummary> = scales
        .iter()
        .map(|&l| {
            let sel: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.scale == l).collect();
            let mut errs: Vec<f64> = sel.iter().map(|r| r.error).collect();
            let max = errs.iter().copied().fold(0.0, f64::max);
            let ran: Vec<bool> = sel.iter().filter_map(|r| r.bracketed).collect();
            ScaleSummary {
                scale: l,
                rows: sel.len(),
                median: median(&mut errs),
                max,
                bracketed: (ran.iter().filter(|&&b| b).count(), ran.len()),
            }
        })
        .collect();
    let monotone = per.windows(2).all(|w| w[1].median <= w[0].median);
    let last = per.last().map(|s| s.median).unwrap_or(f64::INFINITY);
    Ok(Summary {
        pass: monotone && last <= threshold,
        scales: per,
        threshold,
    })
}
