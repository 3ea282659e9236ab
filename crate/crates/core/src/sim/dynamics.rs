//! Sequential application of clock rings.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::height::{height_from_config, HeightError, HeightField};
use crate::lattice::{Label, ParticleConfig, StarVertex, ValidationReport};
use crate::sim::events::Event;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("no particle to the right of site ({line}, {z2}/2) inside the window")]
    WindowExhausted { line: i64, z2: i64 },
    #[error("site ({line}, {z2}/2) or its neighbouring lines are outside the window")]
    OutsideWindow { line: i64, z2: i64 },
    #[error("probe ({x1},{x2}) is outside the window")]
    ProbeOutside { x1: i64, x2: i64 },
    #[error("invalid configuration: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error("events out of order at time {0}")]
    Unordered(f64),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Occupied,
    Blocked,
    Jumped { label: Label, from: i64, to: i64 },
}

/// Apply one ring at doubled coordinate `z2` of `line`.
///
/// An occupied site does nothing. Otherwise the left-most particle to the
/// right of the site jumps there, unless one of its two left neighbours on
/// lines `line +- 1` lies at or to the right of the site.
pub fn step(cfg: &mut ParticleConfig, line: i64, z2: i64) -> Result<StepOutcome, SimError> {
    let outside = SimError::OutsideWindow { line, z2 };
    let (up, down) = match (cfg.line(line + 1), cfg.line(line - 1)) {
        (Some(u), Some(d)) => (u, d),
        _ => return Err(outside),
    };
    let here = cfg.line(line).ok_or(outside.clone())?;
    if z2 <= here.lo || z2 >= here.hi {
        return Err(outside);
    }
    let i = here.pos.partition_point(|&q| q < z2);
    if i < here.pos.len() && here.pos[i] == z2 {
        return Ok(StepOutcome::Occupied);
    }
    if i == here.pos.len() {
        return Err(SimError::WindowExhausted { line, z2 });
    }
    let zp = here.pos[i];
    // the left neighbours (p-1, l+1) and (p, l-1) are the last particles of
    // the adjacent lines to the left of zp
    for (adj, l) in [(up, line + 1), (down, line - 1)] {
        match adj.any_between(z2, zp) {
            Some(true) => return Ok(StepOutcome::Blocked),
            Some(false) => {}
            None => return Err(SimError::WindowExhausted { line: l, z2 }),
        }
    }
    let label = Label::new(here.base + i as i64, line);
    cfg.line_mut(line).expect("line present").pos[i] = z2;
    Ok(StepOutcome::Jumped { label, from: zp, to: z2 })
}

/// Dual vertices whose crossing counters are tracked.
#[derive(Clone, Debug, Default)]
pub struct Probes {
    pub vertices: Vec<StarVertex>,
    // per line: (z2, probe index), sorted by z2
    by_line: Vec<(i64, Vec<(i64, usize)>)>,
}

impl Probes {
    pub fn new(vertices: Vec<StarVertex>) -> Self {
        let mut by_line: Vec<(i64, Vec<(i64, usize)>)> = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            let l = v.line();
            match by_line.binary_search_by_key(&l, |e| e.0) {
                Ok(k) => by_line[k].1.push((v.z().0, i)),
                Err(k) => by_line.insert(k, (l, vec![(v.z().0, i)])),
            }
        }
        for (_, list) in &mut by_line {
            list.sort_unstable();
        }
        Probes { vertices, by_line }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Indices of probes on `line` strictly between `a` and `b` (doubled).
    fn crossed(&self, line: i64, a: i64, b: i64) -> &[(i64, usize)] {
        match self.by_line.binary_search_by_key(&line, |e| e.0) {
            Ok(k) => {
                let list = &self.by_line[k].1;
                let s = list.partition_point(|e| e.0 <= a);
                let t = list.partition_point(|e| e.0 < b);
                &list[s..t.max(s)]
            }
            Err(_) => &[],
        }
    }
}

/// What to record during a run.
#[derive(Clone, Debug, Default)]
pub struct SimOptions {
    pub probes: Vec<StarVertex>,
    /// Times at which probe heights (and optionally snapshots) are recorded.
    pub sample_times: Vec<f64>,
    pub snapshots: bool,
    /// Keep the time of every crossing at each probe.
    pub crossing_times: bool,
    /// Validate the configuration after every executed jump.
    pub validate_each_jump: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub time: f64,
    /// `H(x, time)` at every probe.
    pub heights: Vec<i64>,
    pub snapshot: Option<HeightField>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub initial: ParticleConfig,
    pub final_cfg: ParticleConfig,
    pub probes: Vec<StarVertex>,
    pub initial_heights: Vec<i64>,
    /// `J_x`: number of particles that crossed each probe leftwards.
    pub crossings: Vec<u64>,
    pub crossing_times: Option<Vec<Vec<f64>>>,
    pub samples: Vec<Sample>,
    pub events_applied: u64,
    pub jumps: u64,
}

impl Trajectory {
    /// `H(x,t) = h(x,0) - J_x(t)` at the end of the run.
    pub fn final_heights(&self) -> Vec<i64> {
        self.initial_heights
            .iter()
            .zip(&self.crossings)
            .map(|(h, j)| h - *j as i64)
            .collect()
    }
}

/// Real-unit room needed beyond the right edge of a clock box so that no
/// line runs out of particles to pull in before `horizon`.
///
/// Particles cross a fixed site at rate `v` and sit at density `rho3`, so
/// the count drawn in is about `v T`; five standard deviations of slack
/// plus a few spare gaps are added.
pub fn inflow_room(v: f64, rho3: f64, horizon: f64) -> i64 {
    let n = v * horizon;
    let need = n + 5.0 * libm::sqrt(n) + 6.0;
    libm::ceil(need / rho3.max(1e-3)) as i64 + 4
}

/// Run `events` (time-ordered) from `cfg`.
pub fn simulate<I>(cfg: &ParticleConfig, events: I, opts: &SimOptions) -> Result<Trajectory, SimError>
where
    I: IntoIterator<Item = Event>,
{
    let report = cfg.validate();
    if !report.is_ok() {
        return Err(SimError::Invalid(report));
    }
    let probes = Probes::new(opts.probes.clone());
    let initial_heights = probes
        .vertices
        .iter()
        .map(|&v| cfg.height_at(v).ok_or(SimError::ProbeOutside { x1: v.x1, x2: v.x2 }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut state = cfg.clone();
    let mut crossings = vec![0u64; probes.len()];
    let mut times: Option<Vec<Vec<f64>>> = opts.crossing_times.then(|| vec![Vec::new(); probes.len()]);
    let mut sample_times = opts.sample_times.clone();
    sample_times.sort_by(f64::total_cmp);
    let mut next_sample = 0;
    let mut samples = Vec::with_capacity(sample_times.len());
    let record = |state: &ParticleConfig, time: f64, crossings: &[u64]| -> Result<Sample, SimError> {
        let heights = initial_heights.iter().zip(crossings).map(|(h, j)| h - *j as i64).collect();
        let snapshot = if opts.snapshots {
            Some(height_from_config(state, None)?)
        } else {
            None
        };
        Ok(Sample { time, heights, snapshot })
    };
    let mut last_time = f64::NEG_INFINITY;
    let mut events_applied = 0u64;
    let mut jumps = 0u64;
    for e in events {
        if e.time < last_time {
            return Err(SimError::Unordered(e.time));
        }
        last_time = e.time;
        while next_sample < sample_times.len() && sample_times[next_sample] < e.time {
            samples.push(record(&state, sample_times[next_sample], &crossings)?);
            next_sample += 1;
        }
        events_applied += 1;
        if let StepOutcome::Jumped { label, from, to } = step(&mut state, e.line, e.z2)? {
            jumps += 1;
            for &(_, i) in probes.crossed(label.line, to, from) {
                crossings[i] += 1;
                if let Some(t) = times.as_mut() {
                    t[i].push(e.time);
                }
            }
            if opts.validate_each_jump {
                let r = state.validate();
                if !r.is_ok() {
                    return Err(SimError::Invalid(r));
                }
            }
        }
    }
    while next_sample < sample_times.len() {
        samples.push(record(&state, sample_times[next_sample], &crossings)?);
        next_sample += 1;
    }
    Ok(Trajectory {
        initial: cfg.clone(),
        final_cfg: state,
        probes: probes.vertices,
        initial_heights,
        crossings,
        crossing_times: times,
        samples,
        events_applied,
        jumps,
    })
}
