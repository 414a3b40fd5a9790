//! Detection, classification and measurement of localizations (still lifes,
//! oscillators, gliders) and emitters, plus the exhaustive small-pattern
//! search.

mod classify;
mod components;
mod emitter;
mod search;
mod soup;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::lattice::BBox;
use crate::pattern::catalog::{EntryKind, Measurements};
use crate::pattern::{CanonicalMode, Pattern};
use crate::symmetry::Symmetry;

pub use classify::{classify_isolated, ClassifyOptions};
pub use components::{components, torus_components, TorusComponent, SEPARATION_GAP};
pub use emitter::{detect_emitter, EmitterKind, EmitterOptions, EmitterRecord, Emission};
pub use search::{
    name_results, search, search_localizations, Found, SearchError, SearchOptions, ENUMERATION_GUARD,
};
pub use soup::{soup_census, torus_residue, Residue, SoupCensus, SoupError, SoupOptions, SoupVerdict, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalizationKind {
    StillLife,
    Oscillator,
    Glider,
}

impl LocalizationKind {
    pub fn entry_kind(self) -> EntryKind {
        match self {
            LocalizationKind::StillLife => EntryKind::StillLife,
            LocalizationKind::Oscillator => EntryKind::Oscillator,
            LocalizationKind::Glider => EntryKind::Glider,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Move {
    None,
    Orthogonal,
    Diagonal,
    Oblique,
}

impl Move {
    pub fn of(dx: i64, dy: i64) -> Move {
        match (dx, dy) {
            (0, 0) => Move::None,
            (0, _) | (_, 0) => Move::Orthogonal,
            _ if dx.abs() == dy.abs() => Move::Diagonal,
            _ => Move::Oblique,
        }
    }
}

/// Glider speed `translation / period` in units of c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Speed {
    pub translation: i64,
    pub period: usize,
}

impl fmt::Display for Speed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (t, p) = (self.translation, self.period as i64);
        if t > 0 && p % t == 0 {
            return write!(f, "c/{}", p / t);
        }
        let g = gcd(t, p).max(1);
        write!(f, "{}c/{}", t / g, p / g)
    }
}

impl Serialize for Speed {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / gcd(a as i64, b as i64) as usize * b
}

/// One phase of a localization: its shape and the world offset of its
/// origin relative to phase 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Phase {
    pub pattern: Pattern,
    pub offset: (i64, i64),
}

/// A measured still life, oscillator or glider.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalizationRecord {
    pub kind: LocalizationKind,
    pub period: usize,
    /// Displacement per period.
    pub dx: i64,
    pub dy: i64,
    /// The `period` consecutive phases, starting with phase 0.
    pub phases: Vec<Phase>,
    pub volume: i64,
    pub weight: usize,
}

/// One row of the measurement tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub volume: i64,
    pub translation: i64,
    pub period: usize,
    pub speed: Option<Speed>,
    pub weight: usize,
    #[serde(rename = "move")]
    pub move_: Move,
}

/// Table measurements of a phase cycle: weight is the maximum live-cell
/// count, volume the area of the union of all phase boxes in the frame of
/// phase 0.
pub fn measure_localization(phases: &[Phase], dx: i64, dy: i64) -> TableRow {
    let period = phases.len().max(1);
    let translation = dx.abs().max(dy.abs());
    TableRow {
        volume: union_box(phases).map_or(0, |b| b.area()),
        translation,
        period,
        speed: (translation != 0).then_some(Speed { translation, period }),
        weight: phases.iter().map(|p| p.pattern.weight()).max().unwrap_or(0),
        move_: Move::of(dx, dy),
    }
}

fn union_box(phases: &[Phase]) -> Option<BBox> {
    phases
        .iter()
        .filter_map(|p| p.pattern.bbox_at(p.offset.0, p.offset.1))
        .reduce(|a, b| a.union(&b))
}

impl LocalizationRecord {
    /// Builds a record from a phase cycle; `phases[0].offset` should be
    /// (0, 0).
    pub fn from_phases(phases: Vec<Phase>, dx: i64, dy: i64) -> LocalizationRecord {
        let row = measure_localization(&phases, dx, dy);
        let kind = if (dx, dy) != (0, 0) {
            LocalizationKind::Glider
        } else if phases.len() > 1 {
            LocalizationKind::Oscillator
        } else {
            LocalizationKind::StillLife
        };
        LocalizationRecord { kind, period: phases.len(), dx, dy, phases, volume: row.volume, weight: row.weight }
    }

    pub fn translation(&self) -> i64 {
        self.dx.abs().max(self.dy.abs())
    }

    pub fn speed(&self) -> Option<Speed> {
        self.row().speed
    }

    pub fn move_kind(&self) -> Move {
        Move::of(self.dx, self.dy)
    }

    pub fn row(&self) -> TableRow {
        measure_localization(&self.phases, self.dx, self.dy)
    }

    pub fn is_mobile(&self) -> bool {
        self.kind == LocalizationKind::Glider
    }

    pub fn phase0(&self) -> &Pattern {
        &self.phases[0].pattern
    }

    pub fn measurements(&self) -> Measurements {
        Measurements {
            period: self.period,
            dx: self.dx,
            dy: self.dy,
            translation: self.translation(),
            volume: self.volume,
            weight: self.weight,
        }
    }

    /// Box of the union of all phases, relative to phase 0's origin.
    pub fn volume_box(&self) -> BBox {
        union_box(&self.phases).expect("records have live cells")
    }

    /// The record seen through a symmetry; phase offsets and displacement are
    /// transformed along with the shapes.
    pub fn transformed(&self, sym: Symmetry) -> LocalizationRecord {
        let world = |p: &Phase| -> Vec<(i64, i64)> {
            p.pattern.translated(p.offset.0, p.offset.1).map(|c| sym.apply(c)).collect()
        };
        let mut phases = Vec::with_capacity(self.period);
        let mut base = (0, 0);
        for (i, p) in self.phases.iter().enumerate() {
            let (pattern, off) = Pattern::normalized(world(p));
            if i == 0 {
                base = off;
            }
            phases.push(Phase { pattern, offset: (off.0 - base.0, off.1 - base.1) });
        }
        let (dx, dy) = sym.apply((self.dx, self.dy));
        LocalizationRecord::from_phases(phases, dx, dy)
    }

    /// The cycle started at phase `k`, re-measured in that phase's frame.
    pub fn rephased(&self, k: usize) -> LocalizationRecord {
        let k = k % self.period;
        let base = self.phases[k].offset;
        let phases = (0..self.period)
            .map(|i| {
                let j = (k + i) % self.period;
                let wrap = if k + i >= self.period { (self.dx, self.dy) } else { (0, 0) };
                let p = &self.phases[j];
                Phase {
                    pattern: p.pattern.clone(),
                    offset: (p.offset.0 + wrap.0 - base.0, p.offset.1 + wrap.1 - base.1),
                }
            })
            .collect();
        LocalizationRecord::from_phases(phases, self.dx, self.dy)
    }

    /// Identity of the localization up to the symmetry group of `mode`: the
    /// smallest shape sequence over group images and cyclic phase shifts.
    /// Returns the key, the symmetry and the starting phase that produce it.
    pub fn canonical_cycle(&self, mode: CanonicalMode) -> (Vec<Pattern>, Symmetry, usize) {
        let group: &[Symmetry] = match mode {
            CanonicalMode::Translation => &[Symmetry::Identity],
            CanonicalMode::Rotation => &Symmetry::ROTATIONS,
            CanonicalMode::FullSymmetry => &Symmetry::ALL,
        };
        let mut best: Option<(Vec<Pattern>, Symmetry, usize)> = None;
        for &sym in group {
            let images: Vec<Pattern> = self.phases.iter().map(|p| p.pattern.transformed(sym)).collect();
            for k in 0..self.period {
                let seq: Vec<Pattern> = (0..self.period).map(|i| images[(k + i) % self.period].clone()).collect();
                if best.as_ref().is_none_or(|b| seq < b.0) {
                    best = Some((seq, sym, k));
                }
            }
        }
        best.unwrap()
    }

    /// The canonical orientation and phase of this localization under
    /// `mode`.
    pub fn canonical_record(&self, mode: CanonicalMode) -> LocalizationRecord {
        let (_, sym, k) = self.canonical_cycle(mode);
        self.rephased(k).transformed(sym)
    }

    /// True if the mirror image is not a rotation of this localization.
    pub fn is_chiral(&self) -> bool {
        let mirrored = self.transformed(Symmetry::FlipX);
        mirrored.canonical_cycle(CanonicalMode::Rotation).0 != self.canonical_cycle(CanonicalMode::Rotation).0
    }

    /// Position of phase `t` (any non-negative time) relative to phase 0.
    pub fn offset_at(&self, t: usize) -> (i64, i64) {
        let cycles = (t / self.period) as i64;
        let p = &self.phases[t % self.period];
        (p.offset.0 + cycles * self.dx, p.offset.1 + cycles * self.dy)
    }

    /// Shape and world box at time `t` when phase 0 sits at `origin`.
    pub fn box_at(&self, origin: (i64, i64), t: usize) -> BBox {
        let (ox, oy) = self.offset_at(t);
        self.phases[t % self.period].pattern.bbox_at(origin.0 + ox, origin.1 + oy).expect("non-empty phase")
    }
}

#[derive(Serialize)]
struct RecordView<'a> {
    kind: LocalizationKind,
    period: usize,
    dx: i64,
    dy: i64,
    translation: i64,
    speed: Option<Speed>,
    volume: i64,
    weight: usize,
    #[serde(rename = "move")]
    move_: Move,
    phases: &'a [Phase],
}

impl Serialize for LocalizationRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RecordView {
            kind: self.kind,
            period: self.period,
            dx: self.dx,
            dy: self.dy,
            translation: self.translation(),
            speed: self.speed(),
            volume: self.volume,
            weight: self.weight,
            move_: self.move_kind(),
            phases: &self.phases,
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Dies,
    StillLife,
    Oscillator,
    Glider,
    Emitter,
    UnboundedGrowth,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("verdicts serialize");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FateRecord {
    Localization(LocalizationRecord),
    Emitter(EmitterRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FateReport {
    pub verdict: Verdict,
    pub record: Option<FateRecord>,
    /// Generations simulated before the verdict.
    pub steps: usize,
    pub reason: String,
}

impl FateReport {
    pub(crate) fn new(verdict: Verdict, steps: usize, reason: impl Into<String>) -> FateReport {
        FateReport { verdict, record: None, steps, reason: reason.into() }
    }

    pub fn localization(&self) -> Option<&LocalizationRecord> {
        match &self.record {
            Some(FateRecord::Localization(r)) => Some(r),
            _ => None,
        }
    }

    pub fn emitter(&self) -> Option<&EmitterRecord> {
        match &self.record {
            Some(FateRecord::Emitter(r)) => Some(r),
            _ => None,
        }
    }

    pub fn is_localization(&self) -> bool {
        matches!(self.verdict, Verdict::StillLife | Verdict::Oscillator | Verdict::Glider)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phase(rows: &str, offset: (i64, i64)) -> Phase {
        Phase { pattern: Pattern::from_rows(rows), offset }
    }

    #[test]
    fn move_classes() {
        assert_eq!(Move::of(0, 0), Move::None);
        assert_eq!(Move::of(0, -1), Move::Orthogonal);
        assert_eq!(Move::of(2, -2), Move::Diagonal);
        assert_eq!(Move::of(2, 1), Move::Oblique);
    }

    #[test]
    fn speed_rendering() {
        assert_eq!(Speed { translation: 1, period: 1 }.to_string(), "c/1");
        assert_eq!(Speed { translation: 2, period: 4 }.to_string(), "c/2");
        assert_eq!(Speed { translation: 2, period: 8 }.to_string(), "c/4");
        assert_eq!(Speed { translation: 3, period: 4 }.to_string(), "3c/4");
        assert_eq!(Speed { translation: 2, period: 6 }.to_string(), "c/3");
        assert_eq!(Speed { translation: 4, period: 6 }.to_string(), "2c/3");
    }

    #[test]
    fn o1_row() {
        let phases = vec![phase("O./.O", (0, 0)), phase(".O/O.", (0, 0))];
        let row = measure_localization(&phases, 0, 0);
        assert_eq!((row.volume, row.translation, row.period, row.speed, row.weight), (4, 0, 2, None, 2));
        assert_eq!(row.move_, Move::None);
    }

    #[test]
    fn union_volume_of_offset_dominoes() {
        // A 1x2 and a 2x1 domino sharing one cell: union box is 2x2.
        let phases = vec![phase("OO", (0, 0)), phase("O/O", (1, 0))];
        assert_eq!(measure_localization(&phases, 0, 0).volume, 4);
        let phases = vec![phase("OO", (0, 0)), phase("O/O", (1, 1))];
        assert_eq!(measure_localization(&phases, 0, 0).volume, 2 * 3);
    }

    #[test]
    fn rephase_and_transform_keep_measurements() {
        let phases = vec![phase("OO", (0, 0)), phase("O/O", (1, 0)), phase("OOO", (0, 1))];
        let r = LocalizationRecord::from_phases(phases, 3, 0);
        assert_eq!(r.kind, LocalizationKind::Glider);
        let back = r.rephased(1).rephased(2);
        assert_eq!(back, r);
        for sym in Symmetry::ALL {
            let t = r.transformed(sym);
            assert_eq!(t.weight, r.weight);
            assert_eq!(t.translation(), r.translation());
            assert_eq!(t.transformed(sym.inverse()), r);
        }
        assert_eq!(r.offset_at(4), (1 + 3, 0));
    }
}
