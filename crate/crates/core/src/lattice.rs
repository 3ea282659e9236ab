//! Particle sites, dual-lattice coordinates and interlaced configurations.
//!
//! Horizontal coordinates are half-integers. They are stored doubled
//! ([`Half`]) so that parity rules are integer arithmetic: a particle site on
//! line `l` has doubled coordinate `z2 ≡ l (mod 2)` and a vertex of the dual
//! lattice on line `l` has `z2 ≡ l + 1 (mod 2)`.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// A half-integer stored as twice its value.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(pub i64);

impl Half {
    pub const fn from_doubled(d: i64) -> Self {
        Half(d)
    }

    pub const fn from_int(i: i64) -> Self {
        Half(2 * i)
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 * 0.5
    }

    /// Largest half-integer `<= v`.
    pub fn floor_f64(v: f64) -> Self {
        Half(libm::floor(2.0 * v) as i64)
    }

    pub fn ceil_f64(v: f64) -> Self {
        Half(libm::ceil(2.0 * v) as i64)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("horizontal coordinate {z} has the wrong parity for line {line}")]
    Parity { line: i64, z: Half },
    #[error("empty localization box: lines ({ell_minus}, {ell_plus}), z [{z_minus}, {z_plus}]")]
    EmptyBox {
        ell_minus: i64,
        ell_plus: i64,
        z_minus: Half,
        z_plus: Half,
    },
    #[error("slope ({rho1}, {rho2}) is not at distance >= {margin} from the boundary of the triangle")]
    SlopeOutsideTriangle { rho1: f64, rho2: f64, margin: f64 },
    #[error("window too small: line {line} holds {count} particles, need at least {needed}")]
    WindowTooSmall {
        line: i64,
        count: usize,
        needed: usize,
    },
    #[error("gap order k must be positive")]
    ZeroGapOrder,
    #[error("invalid configuration: {0}")]
    Invalid(ValidationReport),
    #[error("empty window")]
    EmptyWindow,
}

/// A possible particle position `(l, z)` with `z ∈ Z + (l mod 2)/2`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteCoord {
    pub line: i64,
    pub z: Half,
}

impl SiteCoord {
    pub fn new(line: i64, z: Half) -> Result<Self, LatticeError> {
        if (z.0 - line).rem_euclid(2) != 0 {
            return Err(LatticeError::Parity { line, z });
        }
        Ok(SiteCoord { line, z })
    }
}

/// A vertex of the dual lattice in its integer coordinates `(x1, x2)`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StarVertex {
    pub x1: i64,
    pub x2: i64,
}

impl StarVertex {
    pub const ORIGIN: StarVertex = StarVertex { x1: 0, x2: 0 };

    pub const fn new(x1: i64, x2: i64) -> Self {
        StarVertex { x1, x2 }
    }

    pub const fn line(self) -> i64 {
        self.x2 - self.x1
    }

    pub const fn z(self) -> Half {
        Half(self.x1 + self.x2 - 1)
    }

    /// Inverse of `(line, z)`; fails when `z` is not a dual-lattice coordinate on `line`.
    pub fn from_line_z(line: i64, z: Half) -> Result<Self, LatticeError> {
        let s = z.0 + 1;
        if (s - line).rem_euclid(2) != 0 {
            return Err(LatticeError::Parity { line, z });
        }
        Ok(StarVertex {
            x1: (s - line) / 2,
            x2: (s + line) / 2,
        })
    }

    pub const fn offset(self, d1: i64, d2: i64) -> Self {
        StarVertex {
            x1: self.x1 + d1,
            x2: self.x2 + d2,
        }
    }
}

/// Line index and horizontal coordinate of a dual-lattice vertex.
pub fn star_coords(v: StarVertex) -> (i64, Half) {
    (v.line(), v.z())
}

/// A particle label `(p, l)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub p: i64,
    pub line: i64,
}

impl Label {
    pub const fn new(p: i64, line: i64) -> Self {
        Label { p, line }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.line)
    }
}

/// The two particles directly to the left of `(p, l)` on lines `l + 1` and `l - 1`.
pub fn neighbor_labels(p: i64, line: i64) -> [Label; 2] {
    [Label::new(p - 1, line + 1), Label::new(p, line - 1)]
}

/// A slope strictly inside the triangle `{rho1 > 0, rho2 > 0, rho1 + rho2 < 1}`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Slope {
    pub rho1: f64,
    pub rho2: f64,
}

impl Slope {
    pub const DEFAULT_MARGIN: f64 = 0.02;

    /// Requires `rho1, rho2 >= margin` and `rho1 + rho2 <= 1 - margin`.
    pub fn new(rho1: f64, rho2: f64, margin: f64) -> Result<Self, LatticeError> {
        let ok = rho1.is_finite()
            && rho2.is_finite()
            && rho1 >= margin
            && rho2 >= margin
            && rho1 + rho2 <= 1.0 - margin
            && rho1 > 0.0
            && rho2 > 0.0
            && rho1 + rho2 < 1.0;
        if ok {
            Ok(Slope { rho1, rho2 })
        } else {
            Err(LatticeError::SlopeOutsideTriangle { rho1, rho2, margin })
        }
    }

    pub fn rho3(self) -> f64 {
        1.0 - self.rho1 - self.rho2
    }

    pub fn as_array(self) -> [f64; 2] {
        [self.rho1, self.rho2]
    }
}

/// Clocks ring only at sites with `ell_minus < l < ell_plus` and
/// `z_minus <= z <= z_plus`; the matching height region is
/// `l ∈ [ell_minus, ell_plus]`, `z ∈ [z_minus, z_plus]`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalizationBox {
    pub ell_minus: i64,
    pub ell_plus: i64,
    pub z_minus: Half,
    pub z_plus: Half,
}

impl LocalizationBox {
    pub fn new(ell_minus: i64, ell_plus: i64, z_minus: Half, z_plus: Half) -> Result<Self, LatticeError> {
        if ell_minus >= ell_plus || z_minus >= z_plus {
            return Err(LatticeError::EmptyBox {
                ell_minus,
                ell_plus,
                z_minus,
                z_plus,
            });
        }
        Ok(LocalizationBox {
            ell_minus,
            ell_plus,
            z_minus,
            z_plus,
        })
    }

    pub fn contains_site(&self, line: i64, z2: i64) -> bool {
        self.ell_minus < line && line < self.ell_plus && self.z_minus.0 <= z2 && z2 <= self.z_plus.0
    }

    /// Membership in the height region `D(ell_minus, ell_plus, z_minus, z_plus)`.
    pub fn contains_vertex(&self, v: StarVertex) -> bool {
        let l = v.line();
        let z = v.z().0;
        self.ell_minus <= l && l <= self.ell_plus && self.z_minus.0 <= z && z <= self.z_plus.0
    }

    /// Doubled site coordinates on `line` inside the box, in increasing order.
    pub fn site_range(&self, line: i64) -> core::ops::RangeInclusive<i64> {
        let lo = snap_up(self.z_minus.0, line);
        let hi = snap_down(self.z_plus.0, line);
        lo..=hi
    }

    pub fn dynamic_lines(&self) -> core::ops::Range<i64> {
        (self.ell_minus + 1)..self.ell_plus
    }

    pub fn site_count(&self) -> u64 {
        self.dynamic_lines()
            .map(|l| {
                let r = self.site_range(l);
                if r.end() < r.start() {
                    0
                } else {
                    ((r.end() - r.start()) / 2 + 1) as u64
                }
            })
            .sum()
    }

    /// Vertices of the height region, line by line.
    pub fn vertices(&self) -> Vec<StarVertex> {
        let mut out = Vec::new();
        for l in self.ell_minus..=self.ell_plus {
            let lo = snap_up(self.z_minus.0, l + 1);
            let hi = snap_down(self.z_plus.0, l + 1);
            let mut z = lo;
            while z <= hi {
                out.push(StarVertex::from_line_z(l, Half(z)).expect("parity"));
                z += 2;
            }
        }
        out
    }
}

/// Smallest value `>= v` congruent to `parity` mod 2.
pub(crate) fn snap_up(v: i64, parity: i64) -> i64 {
    if (v - parity).rem_euclid(2) == 0 {
        v
    } else {
        v + 1
    }
}

pub(crate) fn snap_down(v: i64, parity: i64) -> i64 {
    if (v - parity).rem_euclid(2) == 0 {
        v
    } else {
        v - 1
    }
}

/// A rectangle of lines `[line_lo, line_hi]` and horizontal range `[z_lo, z_hi]`.
///
/// On each line the window covers the dual-lattice vertices inside the range;
/// the particle sites it determines are the ones strictly between the first
/// and the last of those vertices.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub line_lo: i64,
    pub line_hi: i64,
    pub z_lo: Half,
    pub z_hi: Half,
}

impl Window {
    pub fn new(line_lo: i64, line_hi: i64, z_lo: Half, z_hi: Half) -> Result<Self, LatticeError> {
        // every line needs at least two vertices
        if line_lo > line_hi || z_hi.0 - z_lo.0 < 3 {
            return Err(LatticeError::EmptyWindow);
        }
        Ok(Window {
            line_lo,
            line_hi,
            z_lo,
            z_hi,
        })
    }

    /// Doubled coordinates of the first and last dual-lattice vertex on `line`.
    pub fn vertex_span(&self, line: i64) -> (i64, i64) {
        (snap_up(self.z_lo.0, line + 1), snap_down(self.z_hi.0, line + 1))
    }

    /// Smallest window whose every line covers the height region of `b`,
    /// widened by `extra_left`/`extra_right` (half-integers) in z.
    pub fn around_box(b: &LocalizationBox, extra_left: Half, extra_right: Half) -> Self {
        Window {
            line_lo: b.ell_minus,
            line_hi: b.ell_plus,
            z_lo: Half(b.z_minus.0 - 1 - extra_left.0),
            z_hi: Half(b.z_plus.0 + 1 + extra_right.0),
        }
    }
}

/// The particles of one line over a known horizontal span.
///
/// `lo` and `hi` are doubled dual-lattice coordinates; every particle with
/// `lo < z < hi` is listed in `pos` (doubled, strictly increasing) and `base`
/// is the label of the first particle to the right of `lo`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParticleLine {
    pub base: i64,
    pub lo: i64,
    pub hi: i64,
    pub pos: Vec<i64>,
}

impl ParticleLine {
    /// Label of the left-most particle strictly to the right of `z2`
    /// (`z2` must lie in `[lo, hi]`).
    pub fn label_right_of(&self, z2: i64) -> Option<i64> {
        if z2 < self.lo || z2 > self.hi {
            return None;
        }
        Some(self.base + self.pos.partition_point(|&q| q < z2) as i64)
    }

    pub fn position(&self, p: i64) -> Option<i64> {
        let i = p.checked_sub(self.base)?;
        if i < 0 {
            return None;
        }
        self.pos.get(i as usize).copied()
    }

    pub fn labels(&self) -> core::ops::Range<i64> {
        self.base..self.base + self.pos.len() as i64
    }

    pub fn is_occupied(&self, z2: i64) -> bool {
        self.pos.binary_search(&z2).is_ok()
    }

    /// Any particle strictly inside `(a, b)`; `None` when the span does not cover it.
    pub fn any_between(&self, a: i64, b: i64) -> Option<bool> {
        if a < self.lo || b > self.hi {
            // partially known interval: a particle seen inside still answers yes
            let i = self.pos.partition_point(|&q| q <= a);
            if i < self.pos.len() && self.pos[i] < b {
                return Some(true);
            }
            return None;
        }
        let i = self.pos.partition_point(|&q| q <= a);
        Some(i < self.pos.len() && self.pos[i] < b)
    }

    fn bound(&self, p: i64) -> Bound {
        match self.position(p) {
            Some(z) => Bound::Exact(z),
            None if p < self.base => Bound::Below(self.lo),
            None => Bound::Above(self.hi),
        }
    }
}

#[derive(Copy, Clone, Debug)]
enum Bound {
    Exact(i64),
    /// strictly less than
    Below(i64),
    /// strictly greater than
    Above(i64),
}

/// `true` when `a < b` is impossible given what is known.
fn definitely_not_less(a: Bound, b: Bound) -> bool {
    use Bound::*;
    match (a, b) {
        (Exact(x), Exact(y)) => x >= y,
        (Above(h), Exact(y)) => y <= h,
        (Exact(x), Below(l)) => x >= l,
        (Above(h), Below(l)) => h >= l,
        _ => false,
    }
}

/// What went wrong with a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Span endpoints must be dual-lattice coordinates with `lo < hi`.
    Span { line: i64 },
    Parity { label: Label },
    OutsideSpan { label: Label },
    /// Two particles on one line at the same or decreasing position.
    NotIncreasing { label: Label },
    /// `z(p,l) < z(p,l+1) < z(p+1,l)` fails around this particle.
    Interlacing { label: Label, other_line: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Span { line } => write!(f, "bad span on line {line}"),
            Violation::Parity { label } => write!(f, "parity of particle {label}"),
            Violation::OutsideSpan { label } => write!(f, "particle {label} outside its line span"),
            Violation::NotIncreasing { label } => write!(f, "positions not strictly increasing at {label}"),
            Violation::Interlacing { label, other_line } => {
                write!(f, "interlacing broken at {label} against line {other_line}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Particle positions on a contiguous range of lines.
///
/// Labels follow the normalisation `z(p,l) < z(p,l+1) < z(p+1,l)`. The height
/// of the configuration at a dual vertex `x` is `origin + x1 - p(x)`, where
/// `p(x)` is the label of the left-most particle to the right of `x` on its
/// line; with the usual anchor (particle `(0,0)` is the left-most one on line
/// 0 with non-negative position) `origin` is the height at `(0,0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParticleConfig {
    pub first_line: i64,
    pub lines: Vec<ParticleLine>,
    pub origin: i64,
}

impl ParticleConfig {
    /// Assemble without checking; see [`ParticleConfig::validate`].
    pub fn from_parts(first_line: i64, lines: Vec<ParticleLine>, origin: i64) -> Self {
        ParticleConfig {
            first_line,
            lines,
            origin,
        }
    }

    pub fn new(first_line: i64, lines: Vec<ParticleLine>, origin: i64) -> Result<Self, LatticeError> {
        let cfg = Self::from_parts(first_line, lines, origin);
        let report = cfg.validate();
        if report.is_ok() {
            Ok(cfg)
        } else {
            Err(LatticeError::Invalid(report))
        }
    }

    pub fn last_line(&self) -> i64 {
        self.first_line + self.lines.len() as i64 - 1
    }

    pub fn line(&self, l: i64) -> Option<&ParticleLine> {
        let i = l.checked_sub(self.first_line)?;
        if i < 0 {
            return None;
        }
        self.lines.get(i as usize)
    }

    pub fn line_mut(&mut self, l: i64) -> Option<&mut ParticleLine> {
        let i = l.checked_sub(self.first_line)?;
        if i < 0 {
            return None;
        }
        self.lines.get_mut(i as usize)
    }

    pub fn position(&self, label: Label) -> Option<Half> {
        self.line(label.line)?.position(label.p).map(Half)
    }

    pub fn particle_count(&self) -> usize {
        self.lines.iter().map(|l| l.pos.len()).sum()
    }

    /// Iterate `(label, doubled position)` over all stored particles.
    pub fn particles(&self) -> impl Iterator<Item = (Label, i64)> + '_ {
        self.lines.iter().enumerate().flat_map(move |(i, ln)| {
            let line = self.first_line + i as i64;
            ln.pos
                .iter()
                .enumerate()
                .map(move |(k, &z)| (Label::new(ln.base + k as i64, line), z))
        })
    }

    /// `p(x)`: label of the left-most particle to the right of `x`.
    pub fn label_right_of(&self, v: StarVertex) -> Option<i64> {
        self.line(v.line())?.label_right_of(v.z().0)
    }

    /// Height at `v`, when `v` lies inside its line's span.
    pub fn height_at(&self, v: StarVertex) -> Option<i64> {
        self.label_right_of(v).map(|p| self.origin + v.x1 - p)
    }

    /// Check every invariant and report each violation with its particle.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, ln) in self.lines.iter().enumerate() {
            let line = self.first_line + i as i64;
            if (ln.lo - line - 1).rem_euclid(2) != 0 || (ln.hi - line - 1).rem_euclid(2) != 0 || ln.lo >= ln.hi {
                violations.push(Violation::Span { line });
            }
            for (k, &z) in ln.pos.iter().enumerate() {
                let label = Label::new(ln.base + k as i64, line);
                if (z - line).rem_euclid(2) != 0 {
                    violations.push(Violation::Parity { label });
                }
                if z <= ln.lo || z >= ln.hi {
                    violations.push(Violation::OutsideSpan { label });
                }
                if k > 0 && ln.pos[k - 1] >= z {
                    violations.push(Violation::NotIncreasing { label });
                }
            }
        }
        for i in 0..self.lines.len().saturating_sub(1) {
            let line = self.first_line + i as i64;
            let a = &self.lines[i];
            let b = &self.lines[i + 1];
            // z(p,l) < z(p,l+1) < z(p+1,l), read from both sides
            for p in a.labels() {
                let here = a.bound(p);
                if definitely_not_less(b.bound(p - 1), here) || definitely_not_less(here, b.bound(p)) {
                    violations.push(Violation::Interlacing {
                        label: Label::new(p, line),
                        other_line: line + 1,
                    });
                }
            }
            for q in b.labels() {
                let here = b.bound(q);
                if definitely_not_less(a.bound(q), here) || definitely_not_less(here, a.bound(q + 1)) {
                    violations.push(Violation::Interlacing {
                        label: Label::new(q, line + 1),
                        other_line: line,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// `max over lines and labels of (z(p,l) - z(p-k,l)) / k`.
    pub fn max_gap(&self, k: usize) -> Result<f64, LatticeError> {
        if k == 0 {
            return Err(LatticeError::ZeroGapOrder);
        }
        let mut best = f64::NEG_INFINITY;
        for (i, ln) in self.lines.iter().enumerate() {
            if ln.pos.len() < k + 1 {
                return Err(LatticeError::WindowTooSmall {
                    line: self.first_line + i as i64,
                    count: ln.pos.len(),
                    needed: k + 1,
                });
            }
            for w in ln.pos.windows(k + 1) {
                let g = (w[k] - w[0]) as f64 * 0.5 / k as f64;
                if g > best {
                    best = g;
                }
            }
        }
        Ok(best)
    }

    /// Membership in `Omega_M` restricted to the stored window: every gap
    /// order from 1 up to the shortest line.
    pub fn in_omega_m(&self, m: f64) -> bool {
        let kmax = self.lines.iter().map(|l| l.pos.len()).min().unwrap_or(0);
        (1..kmax).all(|k| self.max_gap(k).map(|g| g <= m).unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line(base: i64, lo: i64, hi: i64, pos: &[i64]) -> ParticleLine {
        ParticleLine {
            base,
            lo,
            hi,
            pos: pos.to_vec(),
        }
    }

    #[test]
    fn star_coordinates() {
        assert_eq!(star_coords(StarVertex::new(0, 0)), (0, Half(-1)));
        assert_eq!(star_coords(StarVertex::new(0, 1)), (1, Half(0)));
        assert_eq!(star_coords(StarVertex::new(2, 3)), (1, Half(4)));
        assert_eq!(Half(-1).to_string(), "-1/2");
    }

    #[test]
    fn star_coords_injective_with_parity() {
        let mut seen = std::collections::HashSet::new();
        for x1 in -12..12 {
            for x2 in -12..12 {
                let v = StarVertex::new(x1, x2);
                let (l, z) = star_coords(v);
                assert_eq!((z.0 - l - 1).rem_euclid(2), 0);
                assert!(seen.insert((l, z)));
                assert_eq!(StarVertex::from_line_z(l, z).unwrap(), v);
            }
        }
    }

    #[test]
    fn neighbor_label_arithmetic() {
        assert_eq!(neighbor_labels(0, 0), [Label::new(-1, 1), Label::new(0, -1)]);
        assert_eq!(neighbor_labels(5, 2), [Label::new(4, 3), Label::new(5, 1)]);
        // (p-1, l+1) sees (p, l) as the line-below partner of its right neighbour
        let [up, _] = neighbor_labels(7, 3);
        let [_, down] = neighbor_labels(up.p + 1, up.line);
        assert_eq!(down, Label::new(7, 3));
    }

    #[test]
    fn site_parity() {
        assert!(SiteCoord::new(0, Half(4)).is_ok());
        assert!(SiteCoord::new(1, Half(3)).is_ok());
        assert!(SiteCoord::new(1, Half(4)).is_err());
    }

    #[test]
    fn two_line_config_ok() {
        // z(0,0)=0, z(0,1)=1/2, z(1,0)=2
        let cfg = ParticleConfig::from_parts(0, vec![line(0, -1, 5, &[0, 4]), line(0, -2, 6, &[1])], 0);
        assert!(cfg.validate().is_ok(), "{}", cfg.validate());
    }

    #[test]
    fn duplicate_position_reported() {
        let cfg = ParticleConfig::from_parts(0, vec![line(0, -1, 9, &[0, 0, 4])], 0);
        let r = cfg.validate();
        assert!(r.violations.contains(&Violation::NotIncreasing { label: Label::new(1, 0) }));
    }

    #[test]
    fn interlacing_violation_reported() {
        // z(0,1) = 5/2 > z(1,0) = 2
        let cfg = ParticleConfig::from_parts(0, vec![line(0, -1, 7, &[0, 4]), line(0, -2, 8, &[5])], 0);
        let r = cfg.validate();
        assert!(!r.is_ok());
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Interlacing { label, .. } if *label == Label::new(0, 1))));
    }

    #[test]
    fn missing_particle_is_caught() {
        // line 1 span covers (0, 2) but holds no particle there
        let cfg = ParticleConfig::from_parts(0, vec![line(0, -1, 9, &[0, 4]), line(1, -2, 10, &[5])], 0);
        assert!(!cfg.validate().is_ok());
    }

    #[test]
    fn max_gap_even_spacing() {
        let cfg = ParticleConfig::from_parts(0, vec![line(0, -1, 41, &[0, 6, 12, 18, 24, 30])], 0);
        assert_eq!(cfg.max_gap(1).unwrap(), 3.0);
        assert_eq!(cfg.max_gap(3).unwrap(), 3.0);
        assert!(matches!(cfg.max_gap(6), Err(LatticeError::WindowTooSmall { .. })));
        assert!(cfg.in_omega_m(3.0));
        assert!(!cfg.in_omega_m(2.5));
    }

    #[test]
    fn box_geometry() {
        let b = LocalizationBox::new(-2, 2, Half(-4), Half(4)).unwrap();
        assert!(b.contains_site(0, 4));
        assert!(!b.contains_site(2, 0));
        assert!(b.contains_vertex(StarVertex::from_line_z(2, Half(-3)).unwrap()));
        // lines -1,0,1; line 0 has sites -4..4 step 2 (5), odd lines -3..3 (4 each)
        assert_eq!(b.site_count(), 13);
        assert!(LocalizationBox::new(1, 1, Half(0), Half(2)).is_err());
    }

    #[test]
    fn slope_margin() {
        assert!(Slope::new(1.0 / 3.0, 1.0 / 3.0, 0.02).is_ok());
        assert!(Slope::new(0.6, 0.5, 0.02).is_err());
        assert!(Slope::new(0.01, 0.5, 0.02).is_err());
    }
}
