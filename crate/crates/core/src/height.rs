//! Height functions on the dual lattice and their correspondence with
//! particle configurations.
//!
//! For a dual vertex `x` on line `l`, let `p(x)` be the label of the
//! left-most particle of line `l` to the right of `x`. Then
//! `h(x) = origin + x1 - p(x)`; the three unit increments follow:
//! `h(x + (1,1)) - h(x)` is `0` when the site between the two vertices holds
//! a particle and `1` otherwise, and the increments along `(1,0)` and `(0,1)`
//! are read off interlacement.

use alloc::vec::Vec;

use thiserror::Error;

use crate::lattice::{snap_down, snap_up, Half, LatticeError, ParticleConfig, ParticleLine, StarVertex, Window};
use crate::profile::ProfileSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeightError {
    #[error("increment {delta} along {dir} at ({x1},{x2}) is outside {{0,1}}")]
    Increment {
        x1: i64,
        x2: i64,
        dir: &'static str,
        delta: i64,
    },
    #[error("vertex ({x1},{x2}) is outside the height window")]
    OutsideWindow { x1: i64, x2: i64 },
    #[error("line {line} is not covered by the configuration")]
    MissingLine { line: i64 },
    #[error("profile slope ({0}, {1}) escapes the admissible triangle")]
    SlopeEscapes(f64, f64),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Heights along one line: vertex `k` sits at doubled coordinate `first_z2 + 2k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeightRow {
    pub first_z2: i64,
    pub values: Vec<i64>,
}

impl HeightRow {
    pub fn last_z2(&self) -> i64 {
        self.first_z2 + 2 * (self.values.len() as i64 - 1)
    }

    fn get(&self, z2: i64) -> Option<i64> {
        let d = z2 - self.first_z2;
        if d < 0 || d % 2 != 0 {
            return None;
        }
        self.values.get((d / 2) as usize).copied()
    }
}

/// Integer heights on consecutive lines of the dual lattice.
///
/// `origin` is the additive constant shared with [`ParticleConfig`]: it is the
/// height at `(0,0)` under the usual labelling anchor, whether or not that
/// vertex is stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeightField {
    pub first_line: i64,
    pub rows: Vec<HeightRow>,
    pub origin: i64,
}

impl HeightField {
    /// Tabulate `f` on every vertex of `window`.
    pub fn from_fn(window: &Window, origin: i64, mut f: impl FnMut(StarVertex) -> i64) -> Self {
        let mut rows = Vec::with_capacity((window.line_hi - window.line_lo + 1) as usize);
        for line in window.line_lo..=window.line_hi {
            let (lo, hi) = window.vertex_span(line);
            let mut values = Vec::with_capacity(((hi - lo) / 2 + 1).max(0) as usize);
            let mut z = lo;
            while z <= hi {
                values.push(f(StarVertex::from_line_z(line, Half(z)).expect("parity")));
                z += 2;
            }
            rows.push(HeightRow { first_z2: lo, values });
        }
        HeightField {
            first_line: window.line_lo,
            rows,
            origin,
        }
    }

    pub fn last_line(&self) -> i64 {
        self.first_line + self.rows.len() as i64 - 1
    }

    pub fn row(&self, line: i64) -> Option<&HeightRow> {
        let i = line - self.first_line;
        if i < 0 {
            return None;
        }
        self.rows.get(i as usize)
    }

    pub fn get(&self, v: StarVertex) -> Option<i64> {
        self.row(v.line())?.get(v.z().0)
    }

    pub fn set(&mut self, v: StarVertex, value: i64) -> Result<(), HeightError> {
        let i = v.line() - self.first_line;
        let row = (i >= 0)
            .then(|| self.rows.get_mut(i as usize))
            .flatten()
            .ok_or(HeightError::OutsideWindow { x1: v.x1, x2: v.x2 })?;
        let d = v.z().0 - row.first_z2;
        if d < 0 || d / 2 >= row.values.len() as i64 {
            return Err(HeightError::OutsideWindow { x1: v.x1, x2: v.x2 });
        }
        row.values[(d / 2) as usize] = value;
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = (StarVertex, i64)> + '_ {
        self.rows.iter().enumerate().flat_map(move |(i, row)| {
            let line = self.first_line + i as i64;
            row.values.iter().enumerate().map(move |(k, &h)| {
                let v = StarVertex::from_line_z(line, Half(row.first_z2 + 2 * k as i64)).expect("parity");
                (v, h)
            })
        })
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.values.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Check that every increment along `(1,0)`, `(0,1)` and `(1,1)` between
    /// stored vertices lies in `{0,1}`.
    pub fn check_increments(&self) -> Result<(), HeightError> {
        for (v, h) in self.vertices() {
            for (dir, d1, d2) in [("(1,0)", 1, 0), ("(0,1)", 0, 1), ("(1,1)", 1, 1)] {
                if let Some(g) = self.get(v.offset(d1, d2)) {
                    let delta = g - h;
                    if delta != 0 && delta != 1 {
                        return Err(HeightError::Increment {
                            x1: v.x1,
                            x2: v.x2,
                            dir,
                            delta,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Raise (`up = true`) or lower the height at `v` by one if the increment
    /// constraints with all stored neighbours still hold; returns whether the
    /// move happened. This adds or removes one unit cube of the stepped surface.
    pub fn try_flip(&mut self, v: StarVertex, up: bool) -> bool {
        let Some(h) = self.get(v) else { return false };
        let new = if up { h + 1 } else { h - 1 };
        for (d1, d2) in [(1, 0), (0, 1), (1, 1)] {
            if let Some(g) = self.get(v.offset(d1, d2)) {
                if !(0..=1).contains(&(g - new)) {
                    return false;
                }
            }
            if let Some(g) = self.get(v.offset(-d1, -d2)) {
                if !(0..=1).contains(&(new - g)) {
                    return false;
                }
            }
        }
        self.set(v, new).is_ok()
    }
}

/// Heights of `cfg` on every vertex inside its line spans.
///
/// With `anchor = Some((v, c))` the additive constant is shifted so that the
/// height at `v` equals `c`; the returned field then carries the matching
/// origin.
pub fn height_from_config(cfg: &ParticleConfig, anchor: Option<(StarVertex, i64)>) -> Result<HeightField, HeightError> {
    let report = cfg.validate();
    if !report.is_ok() {
        return Err(LatticeError::Invalid(report).into());
    }
    let mut origin = cfg.origin;
    if let Some((v, c)) = anchor {
        let p = cfg.label_right_of(v).ok_or(HeightError::OutsideWindow { x1: v.x1, x2: v.x2 })?;
        origin = c - v.x1 + p;
    }
    let mut rows = Vec::with_capacity(cfg.lines.len());
    for (i, ln) in cfg.lines.iter().enumerate() {
        let line = cfg.first_line + i as i64;
        let mut values = Vec::with_capacity(((ln.hi - ln.lo) / 2 + 1) as usize);
        let mut p = ln.base;
        let mut k = 0usize;
        let mut z = ln.lo;
        while z <= ln.hi {
            while k < ln.pos.len() && ln.pos[k] < z {
                k += 1;
                p += 1;
            }
            let x1 = (z + 1 - line) / 2;
            values.push(origin + x1 - p);
            z += 2;
        }
        rows.push(HeightRow { first_z2: ln.lo, values });
    }
    Ok(HeightField {
        first_line: cfg.first_line,
        rows,
        origin,
    })
}

/// Read particle occupancy back from the diagonal increments of `h`.
pub fn config_from_height(h: &HeightField) -> Result<ParticleConfig, HeightError> {
    h.check_increments()?;
    let mut lines = Vec::with_capacity(h.rows.len());
    for (i, row) in h.rows.iter().enumerate() {
        let line = h.first_line + i as i64;
        if row.values.len() < 2 {
            return Err(LatticeError::EmptyWindow.into());
        }
        let mut pos = Vec::new();
        for k in 0..row.values.len() - 1 {
            if row.values[k + 1] == row.values[k] {
                pos.push(row.first_z2 + 2 * k as i64 + 1);
            }
        }
        let x1 = (row.first_z2 + 1 - line) / 2;
        let base = h.origin + x1 - row.values[0];
        lines.push(ParticleLine {
            base,
            lo: row.first_z2,
            hi: row.last_z2(),
            pos,
        });
    }
    let cfg = ParticleConfig::from_parts(h.first_line, lines, h.origin);
    let report = cfg.validate();
    if !report.is_ok() {
        return Err(LatticeError::Invalid(report).into());
    }
    Ok(cfg)
}

/// The floor discretisation `floor(L * phi0(x / L))` on `window`, as heights.
pub fn height_from_profile(profile: &ProfileSpec, scale: u32, window: &Window) -> Result<HeightField, HeightError> {
    let l = scale as f64;
    let micro = |v: StarVertex| libm::floor(l * profile.eval([v.x1 as f64 / l, v.x2 as f64 / l])) as i64;
    let origin = micro(StarVertex::ORIGIN);
    let h = HeightField::from_fn(window, origin, micro);
    match h.check_increments() {
        Ok(()) => Ok(h),
        Err(HeightError::Increment { x1, x2, .. }) => {
            let g = profile.grad([x1 as f64 / l, x2 as f64 / l]);
            Err(HeightError::SlopeEscapes(g[0], g[1]))
        }
        Err(e) => Err(e),
    }
}

/// Particle configuration of the floor discretisation of `profile` at scale `L`.
pub fn config_from_profile(profile: &ProfileSpec, scale: u32, window: &Window) -> Result<ParticleConfig, HeightError> {
    config_from_height(&height_from_profile(profile, scale, window)?)
}

/// Window covering `[z_lo, z_hi]` on lines `[line_lo, line_hi]`, with both
/// ends snapped outward to dual-lattice coordinates on every line.
pub fn covering_window(line_lo: i64, line_hi: i64, z_lo: Half, z_hi: Half) -> Result<Window, LatticeError> {
    let lo = (line_lo..=line_hi).map(|l| snap_down(z_lo.0, l + 1)).min().unwrap_or(z_lo.0);
    let hi = (line_lo..=line_hi).map(|l| snap_up(z_hi.0, l + 1)).max().unwrap_or(z_hi.0);
    Window::new(line_lo, line_hi, Half(lo), Half(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Label, Slope};
    use alloc::vec;

    fn affine(r1: f64, r2: f64) -> ProfileSpec {
        ProfileSpec::affine(Slope::new(r1, r2, 0.0).unwrap())
    }

    /// Heights by walking from the origin and applying the line-change
    /// rules literally: at `x` on line `l`, let `p` be the right-most particle
    /// to its left; `x + (0,1)` gains 1 iff it lies left of particle
    /// `(p, l+1)`, `x + (1,0)` gains 1 iff it lies left of `(p+1, l-1)`.
    fn brute_heights(cfg: &ParticleConfig, v: StarVertex) -> i64 {
        let left_label = |x: StarVertex| {
            let ln = cfg.line(x.line()).unwrap();
            let z = x.z().0;
            let mut p = None;
            for q in ln.labels() {
                if ln.position(q).unwrap() < z {
                    p = Some(q);
                }
            }
            p.unwrap_or(ln.base - 1)
        };
        let pos = |label: Label| cfg.position(label).unwrap().0;
        let delta2 = |x: StarVertex| {
            let p = left_label(x);
            let y = x.offset(0, 1);
            i64::from(y.z().0 < pos(Label::new(p, x.line() + 1)))
        };
        let delta1 = |x: StarVertex| {
            let p = left_label(x);
            let y = x.offset(1, 0);
            i64::from(y.z().0 < pos(Label::new(p + 1, x.line() - 1)))
        };
        let mut cur = StarVertex::ORIGIN;
        let mut h = cfg.origin;
        while cur.x1 != v.x1 {
            if v.x1 > cur.x1 {
                h += delta1(cur);
                cur = cur.offset(1, 0);
            } else {
                cur = cur.offset(-1, 0);
                h -= delta1(cur);
            }
        }
        while cur.x2 != v.x2 {
            if v.x2 > cur.x2 {
                h += delta2(cur);
                cur = cur.offset(0, 1);
            } else {
                cur = cur.offset(0, -1);
                h -= delta2(cur);
            }
        }
        h
    }

    fn small_config() -> ParticleConfig {
        let w = Window::new(-3, 3, Half(-9), Half(9)).unwrap();
        config_from_profile(&affine(1.0 / 3.0, 1.0 / 3.0), 1, &w).unwrap()
    }

    #[test]
    fn anchor_value_is_respected() {
        let cfg = small_config();
        let h = height_from_config(&cfg, Some((StarVertex::new(1, 2), 17))).unwrap();
        assert_eq!(h.get(StarVertex::new(1, 2)), Some(17));
    }

    #[test]
    fn increments_follow_rules() {
        let cfg = small_config();
        let h = height_from_config(&cfg, None).unwrap();
        h.check_increments().unwrap();
        for (v, val) in h.vertices() {
            if v.x1.abs() <= 2 && v.x2.abs() <= 2 {
                assert_eq!(val, brute_heights(&cfg, v), "at {v:?}");
            }
        }
    }

    #[test]
    fn one_particle_three_lines() {
        // single particle at (0, z=1/2... ) on line 0 -> z2 = 0
        let lines = vec![
            ParticleLine { base: 0, lo: -6, hi: 6, pos: vec![-3, 5] },
            ParticleLine { base: 0, lo: -5, hi: 5, pos: vec![0] },
            ParticleLine { base: -1, lo: -6, hi: 6, pos: vec![-5, 3] },
        ];
        let cfg = ParticleConfig::new(-1, lines, 0).unwrap();
        let h = height_from_config(&cfg, None).unwrap();
        // diagonal increments on line 0: vertices at z2 = -5..5; particle at 0
        let row = h.row(0).unwrap();
        let diffs: Vec<i64> = row.values.windows(2).map(|w| w[1] - w[0]).collect();
        assert_eq!(diffs, vec![1, 1, 0, 1, 1]);
        assert_eq!(h.get(StarVertex::ORIGIN), Some(0));
        h.check_increments().unwrap();
    }

    #[test]
    fn empty_window_has_diagonal_one() {
        let w = Window::new(0, 0, Half(-5), Half(5)).unwrap();
        let h = HeightField::from_fn(&w, 0, |v| v.x1);
        let cfg = config_from_height(&h).unwrap();
        assert_eq!(cfg.particle_count(), 0);
    }

    #[test]
    fn round_trip_profile() {
        let cfg = small_config();
        let h = height_from_config(&cfg, None).unwrap();
        assert_eq!(config_from_height(&h).unwrap(), cfg);
    }

    #[test]
    fn affine_density() {
        let w = Window::new(-4, 4, Half(-61), Half(61)).unwrap();
        let cfg = config_from_profile(&affine(1.0 / 3.0, 1.0 / 3.0), 12, &w).unwrap();
        for ln in &cfg.lines {
            let span = (ln.hi - ln.lo) as f64 / 2.0;
            let density = ln.pos.len() as f64 / span;
            assert!((density - 1.0 / 3.0).abs() <= 1.5 / span, "{density}");
        }
    }

    #[test]
    fn anchor_label_convention() {
        let cfg = small_config();
        // particle (0,0) is the left-most with z >= 0 on line 0
        let z = cfg.position(Label::new(0, 0)).unwrap();
        assert!(z.0 >= 0);
        assert!(cfg.position(Label::new(-1, 0)).unwrap().0 < 0);
    }

    #[test]
    fn flip_respects_constraints() {
        let w = Window::new(-2, 2, Half(-7), Half(7)).unwrap();
        let mut h = height_from_profile(&affine(0.3, 0.4), 1, &w).unwrap();
        let vs: Vec<StarVertex> = h.vertices().map(|(v, _)| v).collect();
        let mut moved = 0;
        for (i, v) in vs.iter().enumerate() {
            if h.try_flip(*v, i % 2 == 0) {
                moved += 1;
            }
            h.check_increments().unwrap();
        }
        assert!(moved > 0);
    }
}
