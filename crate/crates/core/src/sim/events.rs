//! Seeded Poisson clock realisations.
//!
//! Each site carries its own rate-1 Poisson process. Sites of a line are
//! grouped in blocks of [`BLOCK`] consecutive sites and time is cut into unit
//! slabs. The points of a block in slab `k` are drawn as one rate-`BLOCK`
//! process whose points are marked with a uniform site of the block, from a
//! ChaCha8 stream keyed by the seed, the block and `k` only. Marking splits
//! it into independent rate-1 processes per site. A stream over a sub-box, or
//! over a shorter horizon, therefore contains exactly the events of the larger
//! stream that fall inside it.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use thiserror::Error;

use crate::lattice::LocalizationBox;

/// One clock ring at doubled coordinate `z2` of `line`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Event {
    pub time: f64,
    pub line: i64,
    pub z2: i64,
}

impl Event {
    pub fn cmp_order(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.line.cmp(&other.line))
            .then(self.z2.cmp(&other.z2))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EventError {
    #[error("horizon must be finite and non-negative, got {0}")]
    Horizon(f64),
}

const SLAB_WORD_SHIFT: u32 = 20;

/// Sites per block.
pub const BLOCK: i64 = 32;

/// The clock rings at the sites of a box up to a horizon, generated lazily.
#[derive(Clone, Debug, PartialEq)]
pub struct EventStream {
    pub seed: u64,
    pub region: LocalizationBox,
    pub horizon: f64,
}

/// Rings with `ell_minus < line < ell_plus`, `z_minus <= z <= z_plus` and
/// `time <= horizon`.
pub fn generate_events(seed: u64, region: LocalizationBox, horizon: f64) -> Result<EventStream, EventError> {
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(EventError::Horizon(horizon));
    }
    Ok(EventStream { seed, region, horizon })
}

/// Index of site `z2` along `line`; consecutive sites differ by one.
fn site_index(line: i64, z2: i64) -> i64 {
    (z2 - line.rem_euclid(2)).div_euclid(2)
}

fn block_stream(line: i64, block: i64) -> u64 {
    ((line as i32 as u32 as u64) << 32) | (block as i32 as u32 as u64)
}

impl EventStream {
    fn key(&self) -> [u8; 32] {
        let base = ChaCha8Rng::seed_from_u64(self.seed);
        base.get_seed()
    }

    pub fn slab_count(&self) -> u64 {
        libm::ceil(self.horizon) as u64
    }

    /// Rings of block `b` of `line` inside slab `k` that land on sites in
    /// `lo..=hi` (site indices), in increasing time.
    #[allow(clippy::too_many_arguments)]
    fn block_slab(key: &[u8; 32], line: i64, b: i64, lo: i64, hi: i64, k: u64, horizon: f64, out: &mut Vec<Event>) {
        let mut rng = ChaCha8Rng::from_seed(*key);
        rng.set_stream(block_stream(line, b));
        rng.set_word_pos((k as u128) << SLAB_WORD_SHIFT);
        let end = (k + 1) as f64;
        let parity = line.rem_euclid(2);
        let mut t = k as f64;
        loop {
            let gap: f64 = rng.sample(Exp1);
            t += gap / BLOCK as f64;
            if t >= end || t > horizon {
                break;
            }
            let j = b * BLOCK + rng.random_range(0..BLOCK);
            if (lo..=hi).contains(&j) {
                out.push(Event { time: t, line, z2: 2 * j + parity });
            }
        }
    }

    /// All rings of slab `k` (times in `[k, k+1)`), sorted.
    pub fn slab(&self, k: u64) -> Vec<Event> {
        let mut out = Vec::new();
        if (k as f64) > self.horizon {
            return out;
        }
        let key = self.key();
        for line in self.region.dynamic_lines() {
            let r = self.region.site_range(line);
            if r.is_empty() {
                continue;
            }
            let (lo, hi) = (site_index(line, *r.start()), site_index(line, *r.end()));
            for b in lo.div_euclid(BLOCK)..=hi.div_euclid(BLOCK) {
                Self::block_slab(&key, line, b, lo, hi, k, self.horizon, &mut out);
            }
        }
        sort_slab(out, k as f64)
    }

    pub fn iter(&self) -> EventIter<'_> {
        EventIter {
            stream: self,
            slab: 0,
            buf: Vec::new(),
            pos: 0,
        }
    }

    pub fn to_vec(&self) -> Vec<Event> {
        self.iter().collect()
    }

    /// The same realisation seen through a smaller box (intersection).
    pub fn restrict(&self, sub: &LocalizationBox) -> EventStream {
        let r = &self.region;
        let region = LocalizationBox {
            ell_minus: r.ell_minus.max(sub.ell_minus),
            ell_plus: r.ell_plus.min(sub.ell_plus),
            z_minus: r.z_minus.max(sub.z_minus),
            z_plus: r.z_plus.min(sub.z_plus),
        };
        EventStream {
            seed: self.seed,
            region,
            horizon: self.horizon,
        }
    }

    pub fn with_horizon(&self, horizon: f64) -> EventStream {
        EventStream {
            horizon: horizon.min(self.horizon),
            ..self.clone()
        }
    }

    pub fn expected_len(&self) -> f64 {
        self.region.site_count() as f64 * self.horizon
    }
}

/// Sort events of the slab starting at `start`. Times are uniform on the
/// slab, so a bucket pass by time followed by small sorts is linear on
/// average and gives the same order as a full sort.
fn sort_slab(events: Vec<Event>, start: f64) -> Vec<Event> {
    let n = events.len();
    let nb = (n / 4).max(1);
    let bucket = |e: &Event| (((e.time - start) * nb as f64) as usize).min(nb - 1);
    let mut offsets = alloc::vec![0usize; nb + 1];
    for e in &events {
        offsets[bucket(e) + 1] += 1;
    }
    for b in 0..nb {
        offsets[b + 1] += offsets[b];
    }
    let mut fill = offsets.clone();
    let mut out = alloc::vec![Event { time: 0.0, line: 0, z2: 0 }; n];
    for e in events {
        let b = bucket(&e);
        out[fill[b]] = e;
        fill[b] += 1;
    }
    for b in 0..nb {
        out[offsets[b]..offsets[b + 1]].sort_unstable_by(Event::cmp_order);
    }
    out
}

pub struct EventIter<'a> {
    stream: &'a EventStream,
    slab: u64,
    buf: Vec<Event>,
    pos: usize,
}

impl Iterator for EventIter<'_> {
    type Item = Event;

    fn next(&mut self) -> Option<Event> {
        while self.pos >= self.buf.len() {
            if self.slab >= self.stream.slab_count().max(1) || (self.slab as f64) > self.stream.horizon {
                return None;
            }
            self.buf = self.stream.slab(self.slab);
            self.pos = 0;
            self.slab += 1;
        }
        let e = self.buf[self.pos];
        self.pos += 1;
        Some(e)
    }
}
