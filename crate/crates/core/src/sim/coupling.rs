//! Runs of several initial conditions against one clock realisation.

use alloc::vec::Vec;

use thiserror::Error;

use crate::lattice::{Half, LocalizationBox, ParticleConfig, StarVertex};
use crate::sim::dynamics::{simulate, step, SimError, SimOptions};
use crate::sim::events::{Event, EventStream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CouplingError {
    #[error("initial heights are not ordered at ({x1},{x2}): {low} > {high}")]
    NotOrdered { x1: i64, x2: i64, low: i64, high: i64 },
    #[error("initial heights differ at ({x1},{x2})")]
    NotEqual { x1: i64, x2: i64 },
    #[error("vertex ({x1},{x2}) of the comparison region is outside a window")]
    Outside { x1: i64, x2: i64 },
    #[error("propagation radius must be positive")]
    Geometry,
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// When heights are compared during a coupled run.
#[derive(Clone, Debug)]
pub enum Checkpoints {
    /// After every ring.
    EveryEvent,
    /// At the given times (and at the end).
    Times(Vec<f64>),
}

fn heights(cfg: &ParticleConfig, region: &[StarVertex]) -> Result<Vec<i64>, CouplingError> {
    region
        .iter()
        .map(|&v| cfg.height_at(v).ok_or(CouplingError::Outside { x1: v.x1, x2: v.x2 }))
        .collect()
}

/// Step two configurations with the same rings, calling `visit(time, ha, hb)`
/// with their heights on `region` at each checkpoint.
fn run_pair<I, F>(
    a: &ParticleConfig,
    b: &ParticleConfig,
    events: I,
    region: &[StarVertex],
    checkpoints: &Checkpoints,
    mut visit: F,
) -> Result<(), CouplingError>
where
    I: IntoIterator<Item = Event>,
    F: FnMut(f64, &[i64], &[i64]),
{
    let mut sa = a.clone();
    let mut sb = b.clone();
    let mut times = match checkpoints {
        Checkpoints::Times(t) => t.clone(),
        Checkpoints::EveryEvent => Vec::new(),
    };
    times.sort_by(f64::total_cmp);
    let mut k = 0;
    let mut last = 0.0;
    for e in events {
        while k < times.len() && times[k] < e.time {
            visit(times[k], &heights(&sa, region)?, &heights(&sb, region)?);
            k += 1;
        }
        step(&mut sa, e.line, e.z2)?;
        step(&mut sb, e.line, e.z2)?;
        last = e.time;
        if matches!(checkpoints, Checkpoints::EveryEvent) {
            visit(e.time, &heights(&sa, region)?, &heights(&sb, region)?);
        }
    }
    while k < times.len() {
        visit(times[k], &heights(&sa, region)?, &heights(&sb, region)?);
        k += 1;
    }
    visit(last, &heights(&sa, region)?, &heights(&sb, region)?);
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OrderingReport {
    pub comparisons: u64,
    /// `(time, vertex, low, high)` wherever `low > high`.
    pub violations: Vec<(f64, StarVertex, i64, i64)>,
}

impl OrderingReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evolve `low` and `high` with the same rings and compare `H_low <= H_high`
/// on the vertices of `region` (the height region of the box).
pub fn couple_monotone<I>(
    low: &ParticleConfig,
    high: &ParticleConfig,
    events: I,
    region: &LocalizationBox,
    checkpoints: &Checkpoints,
) -> Result<OrderingReport, CouplingError>
where
    I: IntoIterator<Item = Event>,
{
    let verts = region.vertices();
    let hl = heights(low, &verts)?;
    let hh = heights(high, &verts)?;
    for (i, v) in verts.iter().enumerate() {
        if hl[i] > hh[i] {
            return Err(CouplingError::NotOrdered {
                x1: v.x1,
                x2: v.x2,
                low: hl[i],
                high: hh[i],
            });
        }
    }
    let mut report = OrderingReport::default();
    run_pair(low, high, events, &verts, checkpoints, |t, a, b| {
        for i in 0..verts.len() {
            report.comparisons += 1;
            if a[i] > b[i] {
                report.violations.push((t, verts[i], a[i], b[i]));
            }
        }
    })?;
    Ok(report)
}

/// Evolve two configurations whose heights agree on the height region of
/// `region` under rings restricted to `region`; returns the first time and
/// vertex where they differ, if any.
pub fn localized_difference<I>(
    a: &ParticleConfig,
    b: &ParticleConfig,
    events: I,
    region: &LocalizationBox,
    checkpoints: &Checkpoints,
) -> Result<Option<(f64, StarVertex)>, CouplingError>
where
    I: IntoIterator<Item = Event>,
{
    let verts = region.vertices();
    let ha = heights(a, &verts)?;
    let hb = heights(b, &verts)?;
    if let Some(i) = (0..verts.len()).find(|&i| ha[i] != hb[i]) {
        return Err(CouplingError::NotEqual {
            x1: verts[i].x1,
            x2: verts[i].x2,
        });
    }
    let mut first = None;
    run_pair(
        a,
        b,
        events.into_iter().filter(|e| region.contains_site(e.line, e.z2)),
        &verts,
        checkpoints,
        |t, x, y| {
            if first.is_none() {
                if let Some(i) = (0..verts.len()).find(|&i| x[i] != y[i]) {
                    first = Some((t, verts[i]));
                }
            }
        },
    )?;
    Ok(first)
}

/// The box `R_n` around `x`: `z` within `n` and lines within `2n` (open).
pub fn propagation_box(x: StarVertex, n: i64) -> LocalizationBox {
    let l = x.line();
    let z = x.z().0;
    LocalizationBox {
        ell_minus: l - 2 * n,
        ell_plus: l + 2 * n,
        z_minus: Half(z - 2 * n),
        z_plus: Half(z + 2 * n),
    }
}

/// Clock box covering `points` (microscopic `(x1, x2)`, not necessarily
/// integer) widened like [`propagation_box`] with `n = ceil(kappa * horizon)`.
///
/// Influence reaches a vertex mostly along its backward characteristic, so
/// callers pass each probe together with the foot of that characteristic;
/// the widening absorbs the spread around it.
pub fn dependence_region(points: &[[f64; 2]], horizon: f64, kappa: f64) -> LocalizationBox {
    let n = (libm::ceil(kappa * horizon) as i64).max(1);
    let (mut lmin, mut lmax, mut zmin, mut zmax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let (l, z2) = (p[1] - p[0], p[0] + p[1] - 1.0);
        lmin = lmin.min(l);
        lmax = lmax.max(l);
        zmin = zmin.min(z2);
        zmax = zmax.max(z2);
    }
    if points.is_empty() {
        (lmin, lmax, zmin, zmax) = (0.0, 0.0, -1.0, -1.0);
    }
    LocalizationBox {
        ell_minus: libm::floor(lmin) as i64 - 2 * n - 1,
        ell_plus: libm::ceil(lmax) as i64 + 2 * n + 1,
        z_minus: Half(libm::floor(zmin) as i64 - 2 * n - 1),
        z_plus: Half(libm::ceil(zmax) as i64 + 2 * n + 1),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagationOutcome {
    pub agree: bool,
    pub full: Vec<f64>,
    pub local: Vec<f64>,
}

/// Compare the crossing history at `x` over `[0, horizon]` for the rings of
/// `stream` and for the same rings restricted to `R_n` (intersected with the
/// stream's box).
pub fn propagation_check(
    cfg: &ParticleConfig,
    x: StarVertex,
    n: i64,
    stream: &EventStream,
    horizon: f64,
) -> Result<PropagationOutcome, CouplingError> {
    if n <= 0 {
        return Err(CouplingError::Geometry);
    }
    let sub = propagation_box(x, n);
    let opts = SimOptions {
        probes: alloc::vec![x],
        crossing_times: true,
        ..Default::default()
    };
    let full_stream = stream.with_horizon(horizon);
    let full = simulate(cfg, full_stream.iter(), &opts)?;
    let local = simulate(cfg, full_stream.restrict(&sub).iter(), &opts)?;
    let f = full.crossing_times.expect("recorded").remove(0);
    let l = local.crossing_times.expect("recorded").remove(0);
    Ok(PropagationOutcome {
        agree: f == l,
        full: f,
        local: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::height::config_from_profile;
    use crate::lattice::{Slope, Window};
    use crate::profile::ProfileSpec;
    use crate::sim::events::generate_events;

    fn flat(shift_origin: i64) -> ParticleConfig {
        let w = Window::new(-6, 6, Half(-20), Half(40)).unwrap();
        let mut c = config_from_profile(&ProfileSpec::affine(Slope::new(0.3, 0.35, 0.02).unwrap()), 1, &w).unwrap();
        c.origin += shift_origin;
        c
    }

    #[test]
    fn equal_configs_stay_equal() {
        let a = flat(0);
        let b = LocalizationBox::new(-5, 5, Half(-10), Half(10)).unwrap();
        let ev = generate_events(5, b, 3.0).unwrap();
        let rep = couple_monotone(&a, &a, ev.iter(), &b, &Checkpoints::EveryEvent).unwrap();
        assert!(rep.holds());
        assert_eq!(localized_difference(&a, &a, ev.iter(), &b, &Checkpoints::EveryEvent).unwrap(), None);
    }

    #[test]
    fn unordered_start_rejected() {
        let a = flat(0);
        let b = LocalizationBox::new(-5, 5, Half(-10), Half(10)).unwrap();
        let ev = generate_events(5, b, 1.0).unwrap();
        assert!(matches!(
            couple_monotone(&flat(1), &a, ev.iter(), &b, &Checkpoints::EveryEvent),
            Err(CouplingError::NotOrdered { .. })
        ));
    }

    #[test]
    fn covering_sub_box_always_agrees() {
        let c = flat(0);
        let b = LocalizationBox::new(-5, 5, Half(-10), Half(10)).unwrap();
        for seed in 0..5 {
            let ev = generate_events(seed, b, 2.0).unwrap();
            let out = propagation_check(&c, StarVertex::new(1, 1), 20, &ev, 2.0).unwrap();
            assert!(out.agree);
        }
    }
}
