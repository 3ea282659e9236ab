//! Brute-force evaluation of the variational formula for particle positions.
//!
//! A candidate is a set of rings, each tagged with a particle label of its
//! line. A non-empty candidate is admissible when
//!
//! * it has a unique point of largest space coordinate (the root);
//! * every point `(x, s, q)` and every left neighbour `r` of `q` with
//!   `x < z_r(0)` has exactly one point `(x', s', r)` with `x' < x`, `s' <= s`;
//! * every non-root point `(x', s', r)` is required by some point
//!   `(x, s, q)` with `r` a left neighbour of `q`, `x < z_r(0)`, `x > x'`,
//!   `s >= s'`.
//!
//! The position of `q` at time `T` is the minimum of its initial position
//! and the root coordinates of admissible candidates rooted at `q`.
//!
//! Each ring carries at most one label, and only labels whose initial
//! position lies strictly to the right of the ring are tried: a point left of
//! its own particle's start can never be required, and a root at or right
//! of it never improves the minimum.

use alloc::vec::Vec;

use thiserror::Error;

use crate::lattice::{neighbor_labels, Label, ParticleConfig};
use crate::sim::events::Event;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("instance too large: {candidates} label assignments exceed the guard {limit}")]
    TooLarge { candidates: f64, limit: f64 },
}

/// Upper bound on the number of label assignments explored.
pub const DEFAULT_GUARD: f64 = 5.0e6;

#[derive(Copy, Clone)]
struct Point {
    x: i64,
    s: f64,
    label: Label,
}

/// Initial position of a label; `None` when the label is not stored.
/// Labels below the stored range sit left of every stored coordinate and
/// impose no requirement; labels above sit right of every stored coordinate.
#[derive(Copy, Clone)]
enum Start {
    At(i64),
    LeftOfWindow,
    RightOfWindow,
}

fn start(cfg: &ParticleConfig, label: Label) -> Start {
    match cfg.line(label.line) {
        None => Start::LeftOfWindow,
        Some(ln) => match ln.position(label.p) {
            Some(z) => Start::At(z),
            None if label.p < ln.base => Start::LeftOfWindow,
            None => Start::RightOfWindow,
        },
    }
}

fn required(cfg: &ParticleConfig, x: i64, r: Label) -> bool {
    match start(cfg, r) {
        Start::At(z) => x < z,
        Start::LeftOfWindow => false,
        Start::RightOfWindow => true,
    }
}

/// Positions at time `horizon` of every stored particle, as `(label, doubled z)`.
pub fn variational_oracle(
    cfg: &ParticleConfig,
    events: &[Event],
    horizon: f64,
    guard: f64,
) -> Result<Vec<(Label, i64)>, OracleError> {
    let mut evs: Vec<Event> = events.iter().copied().filter(|e| e.time <= horizon).collect();
    evs.sort_by(Event::cmp_order);
    let options: Vec<Vec<Label>> = evs
        .iter()
        .map(|e| match cfg.line(e.line) {
            Some(ln) => ln
                .labels()
                .filter(|&p| ln.position(p).is_some_and(|z| z > e.z2))
                .map(|p| Label::new(p, e.line))
                .collect(),
            None => Vec::new(),
        })
        .collect();
    let candidates: f64 = options.iter().map(|o| (o.len() + 1) as f64).product();
    if candidates > guard {
        return Err(OracleError::TooLarge { candidates, limit: guard });
    }
    let mut best: Vec<(Label, i64)> = cfg.particles().collect();
    let mut chosen: Vec<Point> = Vec::with_capacity(evs.len());
    search(cfg, &evs, &options, 0, &mut chosen, &mut best);
    Ok(best)
}

fn search(
    cfg: &ParticleConfig,
    evs: &[Event],
    options: &[Vec<Label>],
    i: usize,
    chosen: &mut Vec<Point>,
    best: &mut Vec<(Label, i64)>,
) {
    if i == evs.len() {
        evaluate(cfg, chosen, best);
        return;
    }
    search(cfg, evs, options, i + 1, chosen, best);
    let e = evs[i];
    for &q in &options[i] {
        // requirements only look at earlier points: rings are time-ordered
        let ok = neighbor_labels(q.p, q.line).iter().all(|&r| {
            !required(cfg, e.z2, r)
                || chosen
                    .iter()
                    .filter(|w| w.label == r && w.x < e.z2 && w.s <= e.time)
                    .count()
                    == 1
        });
        if ok {
            chosen.push(Point {
                x: e.z2,
                s: e.time,
                label: q,
            });
            search(cfg, evs, options, i + 1, chosen, best);
            chosen.pop();
        }
    }
}

fn evaluate(cfg: &ParticleConfig, xi: &[Point], best: &mut [(Label, i64)]) {
    if xi.is_empty() {
        return;
    }
    let x0 = xi.iter().map(|w| w.x).max().expect("non-empty");
    let mut roots = xi.iter().filter(|w| w.x == x0);
    let root = *roots.next().expect("max exists");
    if roots.next().is_some() {
        return;
    }
    for w in xi {
        if w.x == x0 {
            continue;
        }
        let justified = xi.iter().any(|u| {
            neighbor_labels(u.label.p, u.label.line).contains(&w.label)
                && required(cfg, u.x, w.label)
                && u.x > w.x
                && u.s >= w.s
        });
        if !justified {
            return;
        }
    }
    if let Some(slot) = best.iter_mut().find(|(l, _)| *l == root.label) {
        if x0 < slot.1 {
            slot.1 = x0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ParticleLine;
    use alloc::vec;

    fn cfg() -> ParticleConfig {
        ParticleConfig::new(
            -1,
            vec![
                ParticleLine {
                    base: 0,
                    lo: -12,
                    hi: 20,
                    pos: vec![-7, 3, 9, 15],
                },
                ParticleLine {
                    base: 0,
                    lo: -11,
                    hi: 19,
                    pos: vec![-4, 6, 12],
                },
                ParticleLine {
                    base: -1,
                    lo: -12,
                    hi: 20,
                    pos: vec![-9, -1, 7, 13],
                },
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn no_events_keeps_positions() {
        let c = cfg();
        let out = variational_oracle(&c, &[], 1.0, DEFAULT_GUARD).unwrap();
        assert_eq!(out, c.particles().collect::<Vec<_>>());
    }

    #[test]
    fn single_admissible_ring_moves_particle() {
        let c = cfg();
        let out = variational_oracle(&c, &[Event { time: 0.3, line: 0, z2: 4 }], 1.0, DEFAULT_GUARD).unwrap();
        let moved: Vec<_> = out.iter().filter(|(l, z)| c.position(*l).unwrap().0 != *z).collect();
        assert_eq!(moved, vec![&(Label::new(1, 0), 4)]);
    }

    #[test]
    fn blocked_ring_does_nothing() {
        let c = cfg();
        let out = variational_oracle(&c, &[Event { time: 0.3, line: 0, z2: 2 }], 1.0, DEFAULT_GUARD).unwrap();
        assert_eq!(out, c.particles().collect::<Vec<_>>());
    }

    #[test]
    fn ring_after_horizon_ignored() {
        let c = cfg();
        let out = variational_oracle(&c, &[Event { time: 2.0, line: 0, z2: 4 }], 1.0, DEFAULT_GUARD).unwrap();
        assert_eq!(out, c.particles().collect::<Vec<_>>());
    }
}
