//! Random small instances for property checks: configurations, ordered and
//! locally equal pairs, and tiny ring sets.

use alloc::vec::Vec;

use rand::Rng;

use crate::height::{config_from_height, height_from_profile, HeightField};
use crate::lattice::{Half, LocalizationBox, ParticleConfig, Slope, StarVertex, Window};
use crate::profile::ProfileSpec;
use crate::sim::Event;

/// A uniformly chosen slope with every tile fraction at least `margin`.
pub fn random_slope<R: Rng>(rng: &mut R, margin: f64) -> Slope {
    loop {
        let r1 = rng.random_range(margin..1.0 - 2.0 * margin);
        let r2 = rng.random_range(margin..1.0 - margin - r1);
        if let Ok(s) = Slope::new(r1, r2, margin) {
            return s;
        }
    }
}

/// Heights of a random surface on `window`: the floor of a random affine
/// profile followed by `flips` random cube moves.
pub fn random_heights<R: Rng>(rng: &mut R, window: &Window, flips: usize) -> HeightField {
    let slope = random_slope(rng, 0.1);
    let mut h = height_from_profile(&ProfileSpec::affine(slope), 1, window).expect("affine slopes stay admissible");
    let d = rng.random_range(-3..=3);
    shift_all(&mut h, d);
    random_flips(rng, &mut h, flips, |_| true);
    h
}

/// Add `d` to every stored height and to the origin.
fn shift_all(h: &mut HeightField, d: i64) {
    for row in &mut h.rows {
        for v in &mut row.values {
            *v += d;
        }
    }
    h.origin += d;
}

/// Apply `count` random cube moves at vertices accepted by `allow`.
pub fn random_flips<R: Rng>(rng: &mut R, h: &mut HeightField, count: usize, allow: impl Fn(StarVertex) -> bool) {
    let verts: Vec<StarVertex> = h.vertices().map(|(v, _)| v).filter(|&v| allow(v)).collect();
    if verts.is_empty() {
        return;
    }
    for _ in 0..count {
        let v = verts[rng.random_range(0..verts.len())];
        h.try_flip(v, rng.random_bool(0.5));
    }
}

/// A random valid configuration on `window`.
pub fn random_config<R: Rng>(rng: &mut R, window: &Window, flips: usize) -> ParticleConfig {
    config_from_height(&random_heights(rng, window, flips)).expect("flips keep the increments valid")
}

/// Two configurations with `H_low <= H_high` everywhere on `window`.
pub fn ordered_pair<R: Rng>(rng: &mut R, window: &Window, flips: usize) -> (ParticleConfig, ParticleConfig) {
    let low = random_heights(rng, window, flips);
    let mut high = low.clone();
    let verts: Vec<StarVertex> = high.vertices().map(|(v, _)| v).collect();
    for _ in 0..flips {
        high.try_flip(verts[rng.random_range(0..verts.len())], true);
    }
    if rng.random_bool(0.3) {
        let d = rng.random_range(1..=2);
        shift_all(&mut high, d);
    }
    let low = config_from_height(&low).expect("valid");
    let high = config_from_height(&high).expect("valid");
    (low, high)
}

/// Two configurations whose heights agree on the height region of `region`
/// and differ by random moves outside it.
pub fn locally_equal_pair<R: Rng>(
    rng: &mut R,
    window: &Window,
    region: &LocalizationBox,
    flips: usize,
) -> (ParticleConfig, ParticleConfig) {
    let a = random_heights(rng, window, flips);
    let mut b = a.clone();
    random_flips(rng, &mut b, flips, |v| !region.contains_vertex(v));
    (config_from_height(&a).expect("valid"), config_from_height(&b).expect("valid"))
}

/// Up to `max_events` rings at random sites of `region`, in time order.
pub fn random_events<R: Rng>(rng: &mut R, region: &LocalizationBox, max_events: usize, horizon: f64) -> Vec<Event> {
    let sites: Vec<(i64, i64)> = region
        .dynamic_lines()
        .flat_map(|l| region.site_range(l).step_by(2).map(move |z| (l, z)))
        .collect();
    let k = rng.random_range(0..=max_events);
    let mut out: Vec<Event> = (0..k)
        .map(|_| {
            let (line, z2) = sites[rng.random_range(0..sites.len())];
            Event {
                time: rng.random_range(0.0..horizon),
                line,
                z2,
            }
        })
        .collect();
    out.sort_by(Event::cmp_order);
    out
}

/// Number of particles on the lines of `region` that carry clocks.
pub fn movable_particles(cfg: &ParticleConfig, region: &LocalizationBox) -> usize {
    region
        .dynamic_lines()
        .filter_map(|l| cfg.line(l))
        .map(|ln| ln.pos.len())
        .sum()
}

/// The geometry used for tiny oracle instances: five lines, a short span.
pub fn tiny_geometry() -> (Window, LocalizationBox) {
    let w = Window::new(-2, 2, Half(-8), Half(8)).expect("nonempty");
    let b = LocalizationBox::new(-2, 2, Half(-6), Half(6)).expect("nonempty");
    (w, b)
}
