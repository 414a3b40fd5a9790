//! Staged collisions between localizations and classification of what comes
//! out.
//!
//! A run evolves the combined configuration until it splits into
//! components that are each a known localization, already in their cycle,
//! and pairwise receding. The survivors are then compared with the incoming
//! participants.

mod census;
mod decompose;
mod scan;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    classify_isolated, components, lcm, ClassifyOptions, FateReport, LocalizationRecord, SEPARATION_GAP,
};
use crate::lattice::{BBox, Grid, GridError};
use crate::pattern::catalog::CatalogEntry;
use crate::pattern::{CanonicalMode, Pattern};
use crate::rule::RuleSpec;
use crate::symmetry::Symmetry;

pub use census::{catastrophe_census, CatastropheCensus, TripleFate};
pub use decompose::{decompose, Component};
pub use scan::{scan_collisions, Geometry, ScanKey, ScanSpec};

#[derive(Debug, Error)]
pub enum CollisionError {
    #[error("participants {a} and {b} start at Chebyshev distance {gap}; at least {SEPARATION_GAP} is required")]
    Gap { a: usize, b: usize, gap: i64 },
    #[error("participant {0} has no live cells")]
    Empty(usize),
    #[error("participant {0} died while being advanced to its phase")]
    DiedInPreparation(usize),
    #[error("{0} does not move")]
    NotMobile(String),
    #[error("{0} is not stationary")]
    NotStationary(String),
    #[error("{0} is not a localization under this rule")]
    NotLocalization(String),
    #[error("empty scan range")]
    EmptyRange,
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionVerdict {
    Annihilation,
    SolitonLike,
    Transformation,
    Multiplication,
    Reduction,
    Eaten,
    Delay,
    UnboundedGrowth,
    StationaryResidue,
    Undecided,
}

impl std::fmt::Display for CollisionVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&s)
    }
}

/// One pattern taking part in a collision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Participant {
    pub name: String,
    /// Shape before the transform and phase advance.
    pub pattern: Pattern,
    pub transform: Symmetry,
    /// World position of the top-left corner of the prepared shape.
    pub offset: (i64, i64),
    /// Steps the transformed pattern is evolved alone before placement.
    pub phase: usize,
}

impl Participant {
    pub fn new(name: impl Into<String>, pattern: Pattern, transform: Symmetry, offset: (i64, i64), phase: usize) -> Self {
        Participant { name: name.into(), pattern, transform, offset, phase }
    }

    pub fn from_entry(entry: &CatalogEntry, transform: Symmetry, offset: (i64, i64), phase: usize) -> Self {
        Participant::new(entry.name.clone(), entry.pattern.clone(), transform, offset, phase)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionSetup {
    pub participants: Vec<Participant>,
    pub rule: RuleSpec,
    pub max_steps: usize,
    /// Side cap of the stored region.
    pub cap: usize,
    /// Budget for classifying components.
    pub classify: ClassifyOptions,
    /// Population above this multiple of the initial one counts as growth.
    pub growth_factor: u64,
    /// Steps between resolution checks.
    pub check_every: usize,
}

impl CollisionSetup {
    pub fn new(rule: RuleSpec, participants: Vec<Participant>) -> CollisionSetup {
        CollisionSetup {
            participants,
            rule,
            max_steps: 1024,
            cap: 1024,
            classify: ClassifyOptions { max_period: 16, max_steps: 256, box_cap: 64, ..ClassifyOptions::default() },
            growth_factor: 50,
            check_every: 4,
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    /// Live cells of every participant at step 0.
    pub fn initial_cells(&self) -> Result<Vec<(i64, i64)>, CollisionError> {
        Ok(self.prepare()?.into_iter().flat_map(|p| p.cells).collect())
    }

    fn prepare(&self) -> Result<Vec<Prepared>, CollisionError> {
        let mut out: Vec<Prepared> = Vec::with_capacity(self.participants.len());
        for (i, part) in self.participants.iter().enumerate() {
            if part.pattern.is_empty() {
                return Err(CollisionError::Empty(i));
            }
            let shape = prepared_shape(&part.pattern, part.transform, part.phase, &self.rule)
                .map_err(|e| match e {
                    CollisionError::Empty(_) => CollisionError::DiedInPreparation(i),
                    other => other,
                })?;
            let report = classify_isolated(&shape, &self.rule, &self.classify);
            let record = in_cycle(&report).cloned();
            let cells: Vec<(i64, i64)> = shape.translated(part.offset.0, part.offset.1).collect();
            let bbox = shape.bbox_at(part.offset.0, part.offset.1).unwrap();
            for (j, other) in out.iter().enumerate() {
                let gap = other.bbox.gap(&bbox);
                if gap < SEPARATION_GAP {
                    return Err(CollisionError::Gap { a: j, b: i, gap });
                }
            }
            out.push(Prepared { cells, bbox, origin: part.offset, record });
        }
        Ok(out)
    }
}

/// The transformed pattern evolved `phase` steps alone, normalized.
pub fn prepared_shape(pattern: &Pattern, transform: Symmetry, phase: usize, rule: &RuleSpec) -> Result<Pattern, CollisionError> {
    let shape = pattern.transformed(transform);
    if phase == 0 {
        return Ok(shape);
    }
    let mut grid = shape.to_grid(0, 0, crate::lattice::DEFAULT_UNBOUNDED_CAP)?;
    for _ in 0..phase {
        grid.advance(rule)?;
    }
    let (p, _) = Pattern::from_grid(&grid);
    if p.is_empty() {
        return Err(CollisionError::Empty(0));
    }
    Ok(p)
}

struct Prepared {
    cells: Vec<(i64, i64)>,
    bbox: BBox,
    origin: (i64, i64),
    record: Option<LocalizationRecord>,
}

/// The record of a localization whose initial shape is already one of its
/// phases.
pub(crate) fn in_cycle(report: &FateReport) -> Option<&LocalizationRecord> {
    report.localization().filter(|r| report.steps == r.period)
}

/// Identity of a localization type: shape cycle up to all eight symmetries.
pub fn type_key(record: &LocalizationRecord) -> Vec<Pattern> {
    record.canonical_cycle(CanonicalMode::FullSymmetry).0
}

/// True if both records are the same localization in any orientation.
pub fn same_type(a: &LocalizationRecord, b: &LocalizationRecord) -> bool {
    a.period == b.period && a.weight == b.weight && type_key(a) == type_key(b)
}

type Key = (Vec<Pattern>, i64, i64, usize);

fn key(record: &LocalizationRecord) -> Key {
    (type_key(record), record.dx, record.dy, record.period)
}

/// A localization present when the collision resolved; its phase 0 is the
/// shape at that step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Survivor {
    pub kind: crate::analysis::LocalizationKind,
    pub period: usize,
    pub dx: i64,
    pub dy: i64,
    pub origin: (i64, i64),
    pub shape: Pattern,
    #[serde(skip)]
    pub record: LocalizationRecord,
}

impl Survivor {
    fn new(record: LocalizationRecord, origin: (i64, i64)) -> Survivor {
        Survivor {
            kind: record.kind,
            period: record.period,
            dx: record.dx,
            dy: record.dy,
            origin,
            shape: record.phase0().clone(),
            record,
        }
    }

    pub fn is_mobile(&self) -> bool {
        self.record.is_mobile()
    }

    /// World box at `t` steps after resolution.
    pub fn box_at(&self, t: usize) -> BBox {
        self.record.box_at(self.origin, t)
    }
}

/// How a survivor differs from its participant's unobstructed flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Shift {
    pub participant: usize,
    pub survivor: usize,
    /// Steps the survivor lags behind the control (negative: ahead).
    pub delay: i64,
    /// Remaining displacement once the delay is taken out; across the track
    /// for gliders, the full displacement for stationary ones.
    pub offset: (i64, i64),
    /// Set when no phase of the control lines up with the survivor along
    /// its track.
    pub unmatched: bool,
}

impl Shift {
    pub fn is_zero(&self) -> bool {
        !self.unmatched && self.delay == 0 && self.offset == (0, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionOutcome {
    pub verdict: CollisionVerdict,
    pub survivors: Vec<Survivor>,
    pub shifts: Vec<Shift>,
    /// Step at which the verdict was reached.
    pub steps: usize,
    pub population: u64,
    pub reason: String,
}

impl CollisionOutcome {
    fn bare(verdict: CollisionVerdict, steps: usize, population: u64, reason: impl Into<String>) -> Self {
        CollisionOutcome { verdict, survivors: Vec::new(), shifts: Vec::new(), steps, population, reason: reason.into() }
    }

    /// Survivors of the same type as `record`, in any orientation.
    pub fn count_of(&self, record: &LocalizationRecord) -> usize {
        self.survivors.iter().filter(|s| same_type(&s.record, record)).count()
    }

    pub fn gliders(&self) -> impl Iterator<Item = &Survivor> {
        self.survivors.iter().filter(|s| s.is_mobile())
    }
}

/// Longest horizon (steps) for the receding check.
const MAX_HORIZON: usize = 240;

/// Evolves the setup and classifies its outcome.
pub fn run_collision(setup: &CollisionSetup) -> Result<CollisionOutcome, CollisionError> {
    let prepared = setup.prepare()?;
    if prepared.is_empty() {
        return Ok(CollisionOutcome::bare(CollisionVerdict::Annihilation, 0, 0, "no participants"));
    }
    let mut grid = Grid::from_cells(prepared.iter().flat_map(|p| p.cells.iter().copied()), setup.cap)?;
    let initial = grid.population().max(1);
    let mut cache: HashMap<Pattern, FateReport> = HashMap::new();
    let every = setup.check_every.max(1);
    for t in 0..=setup.max_steps {
        if t > 0 {
            match grid.advance(&setup.rule) {
                Ok(()) => {}
                Err(GridError::CapExceeded { .. }) => {
                    return Ok(CollisionOutcome::bare(
                        CollisionVerdict::UnboundedGrowth,
                        t,
                        grid.population(),
                        "stored region exceeded its cap",
                    ));
                }
                Err(e) => return Err(e.into()),
            }
        }
        let population = grid.population();
        if population == 0 {
            return Ok(CollisionOutcome::bare(CollisionVerdict::Annihilation, t, 0, format!("empty at step {t}")));
        }
        if population > setup.growth_factor.saturating_mul(initial) {
            return Ok(CollisionOutcome::bare(
                CollisionVerdict::UnboundedGrowth,
                t,
                population,
                format!("population exceeded {} times the initial one", setup.growth_factor),
            ));
        }
        if t % every != 0 && t != setup.max_steps {
            continue;
        }
        if let Some(survivors) = resolve(&grid, setup, &mut cache) {
            return Ok(judge(&prepared, survivors, t, population));
        }
    }
    Ok(CollisionOutcome::bare(CollisionVerdict::Undecided, setup.max_steps, grid.population(), "step budget exhausted"))
}

/// Survivors once every component is a localization in its cycle and all
/// pairs keep receding; `None` while the configuration is still settling.
///
/// A component that would grow on its own does not decide anything: two
/// growing fragments can meet and cancel, so growth is judged on the whole
/// configuration instead.
fn resolve(grid: &Grid, setup: &CollisionSetup, cache: &mut HashMap<Pattern, FateReport>) -> Option<Vec<Survivor>> {
    let mut survivors = Vec::new();
    for comp in components(&grid.live_cells(), SEPARATION_GAP) {
        let (pattern, origin) = Pattern::normalized(comp);
        let report = cache
            .entry(pattern)
            .or_insert_with_key(|p| classify_isolated(p, &setup.rule, &setup.classify));
        survivors.push(Survivor::new(in_cycle(report)?.clone(), origin));
    }
    let horizon = survivors.iter().fold(1, |acc, s| lcm(acc, s.period)).min(MAX_HORIZON);
    for i in 0..survivors.len() {
        for j in i + 1..survivors.len() {
            let gap = |k: usize| survivors[i].box_at(k).gap(&survivors[j].box_at(k));
            for k in 0..=horizon {
                let (now, later) = (gap(k), gap(k + horizon));
                if now < SEPARATION_GAP || later < now {
                    return None;
                }
            }
        }
    }
    Some(survivors)
}

fn sorted_keys<'a, I: Iterator<Item = &'a LocalizationRecord>>(records: I) -> Vec<Key> {
    let mut keys: Vec<Key> = records.map(key).collect();
    keys.sort();
    keys
}

fn judge(prepared: &[Prepared], survivors: Vec<Survivor>, t: usize, population: u64) -> CollisionOutcome {
    let mut outcome = CollisionOutcome {
        verdict: CollisionVerdict::Transformation,
        survivors,
        shifts: Vec::new(),
        steps: t,
        population,
        reason: String::new(),
    };
    let incoming: Option<Vec<&LocalizationRecord>> = prepared.iter().map(|p| p.record.as_ref()).collect();
    let Some(incoming) = incoming else {
        outcome.verdict = if outcome.survivors.iter().any(Survivor::is_mobile) {
            CollisionVerdict::Transformation
        } else {
            CollisionVerdict::StationaryResidue
        };
        outcome.reason = "some participant is not a localization".into();
        return outcome;
    };
    let in_mobile = incoming.iter().filter(|r| r.is_mobile()).count();
    let out_mobile = outcome.survivors.iter().filter(|s| s.is_mobile()).count();

    if sorted_keys(incoming.iter().copied()) == sorted_keys(outcome.survivors.iter().map(|s| &s.record)) {
        outcome.shifts = match_shifts(prepared, &outcome.survivors, t, |_| true);
        let moved = outcome.shifts.iter().filter(|s| !s.is_zero()).count();
        outcome.verdict = if moved == 1 { CollisionVerdict::Delay } else { CollisionVerdict::SolitonLike };
        outcome.reason = format!("{moved} participant(s) displaced against the control");
        return outcome;
    }
    if out_mobile == 0 {
        let stationary_in = sorted_keys(incoming.iter().copied().filter(|r| !r.is_mobile()));
        let out = sorted_keys(outcome.survivors.iter().map(|s| &s.record));
        if in_mobile > 0 && !stationary_in.is_empty() && stationary_in == out {
            outcome.verdict = CollisionVerdict::Eaten;
            outcome.shifts = match_shifts(prepared, &outcome.survivors, t, |r| !r.is_mobile());
            outcome.reason = "stationary participants restored, mobile ones destroyed".into();
        } else {
            outcome.verdict = CollisionVerdict::StationaryResidue;
            outcome.reason = "only stationary survivors".into();
        }
        return outcome;
    }
    let incoming_glider_types: Vec<Vec<Pattern>> =
        incoming.iter().filter(|r| r.is_mobile()).map(|r| type_key(r)).collect();
    let all_incoming_type = outcome
        .survivors
        .iter()
        .all(|s| s.is_mobile() && incoming_glider_types.contains(&type_key(&s.record)));
    outcome.verdict = if all_incoming_type && out_mobile > in_mobile {
        CollisionVerdict::Multiplication
    } else if out_mobile < in_mobile {
        CollisionVerdict::Reduction
    } else {
        CollisionVerdict::Transformation
    };
    outcome.reason = format!("{in_mobile} glider(s) in, {out_mobile} out");
    outcome
}

/// Pairs each participant selected by `filter` with the closest unused
/// survivor of the same type and velocity.
fn match_shifts(
    prepared: &[Prepared],
    survivors: &[Survivor],
    t: usize,
    filter: impl Fn(&LocalizationRecord) -> bool,
) -> Vec<Shift> {
    let mut used = vec![false; survivors.len()];
    let mut shifts = Vec::new();
    for (i, prep) in prepared.iter().enumerate() {
        let Some(rec) = prep.record.as_ref().filter(|r| filter(r)) else { continue };
        let k = key(rec);
        let best = survivors
            .iter()
            .enumerate()
            .filter(|(j, s)| !used[*j] && key(&s.record) == k)
            .map(|(j, s)| {
                let mut shift = measure_shift(rec, prep.origin, s, t);
                shift.participant = i;
                shift.survivor = j;
                shift
            })
            .min_by_key(|s| (s.unmatched, s.delay.abs() + s.offset.0.abs() + s.offset.1.abs()));
        if let Some(shift) = best {
            used[shift.survivor] = true;
            shifts.push(shift);
        }
    }
    shifts
}

/// Compares a survivor at step `t` with the control flight of `rec` placed
/// at `origin`: the smallest lag whose phase matches and whose residual
/// displacement has no component along the velocity.
fn measure_shift(rec: &LocalizationRecord, origin: (i64, i64), s: &Survivor, t: usize) -> Shift {
    let window = (4 * rec.period + 16) as i64;
    let control = |time: usize| -> (&Pattern, (i64, i64)) {
        let off = rec.offset_at(time);
        (&rec.phases[time % rec.period].pattern, (origin.0 + off.0, origin.1 + off.1))
    };
    let mut best: Option<Shift> = None;
    for lag in 0..=window {
        for delay in [lag, -lag] {
            let time = t as i64 - delay;
            if time < 0 || (lag == 0 && delay < 0) {
                continue;
            }
            let (shape, at) = control(time as usize);
            if *shape != s.shape {
                continue;
            }
            let r = (s.origin.0 - at.0, s.origin.1 - at.1);
            if r.0 * rec.dx + r.1 * rec.dy == 0 {
                best = Some(Shift { participant: 0, survivor: 0, delay, offset: r, unmatched: false });
                break;
            }
        }
        if best.is_some() {
            break;
        }
    }
    best.unwrap_or_else(|| {
        let (_, at) = control(t);
        Shift { participant: 0, survivor: 0, delay: 0, offset: (s.origin.0 - at.0, s.origin.1 - at.1), unmatched: true }
    })
}
