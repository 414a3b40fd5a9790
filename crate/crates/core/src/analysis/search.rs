//! Exhaustive enumeration of small patterns, keeping the ones that settle
//! into still lifes, oscillators or gliders.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use super::{classify_isolated, components, ClassifyOptions, LocalizationKind, LocalizationRecord, SEPARATION_GAP};
use crate::pattern::catalog::{CatalogEntry, Provenance};
use crate::pattern::{CanonicalMode, Pattern};
use crate::rule::RuleSpec;
use crate::symmetry::Symmetry;
use crate::zoo::{self, ZooKind};

/// Largest number of candidate patterns a search may enumerate.
pub const ENUMERATION_GUARD: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("{count} candidate patterns exceed the enumeration guard of {guard}")]
    Guard { count: u128, guard: u128 },
    #[error("search box {0}x{1} is empty")]
    EmptyBox(i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub width: i64,
    pub height: i64,
    pub max_live: usize,
    pub max_period: usize,
    pub max_steps: usize,
    /// Keep results whose phases split into independent parts (for example
    /// two distant o1). Off by default.
    pub keep_composites: bool,
}

impl SearchOptions {
    pub fn new(width: i64, height: i64, max_live: usize, max_period: usize) -> SearchOptions {
        SearchOptions { width, height, max_live, max_period, max_steps: 512, keep_composites: false }
    }
}

/// A distinct localization found by the search, in canonical orientation and
/// phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Found {
    pub record: LocalizationRecord,
    /// Mirror image is not a rotation of it (only meaningful for gliders,
    /// which are kept apart from their mirror images).
    pub chiral: bool,
    /// Number of enumerated candidates that settled into it.
    pub seeds: usize,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn candidate_count(cells: u128, max_live: usize) -> u128 {
    (1..=max_live as u128).map(|k| binomial(cells, k)).sum()
}

fn is_composite(record: &LocalizationRecord) -> bool {
    record.phases.iter().any(|p| components(p.pattern.cells(), SEPARATION_GAP).len() > 1)
}

/// Mode under which results are considered the same: gliders keep their
/// handedness, everything else is identified up to all square symmetries.
fn dedup_mode(kind: LocalizationKind) -> CanonicalMode {
    match kind {
        LocalizationKind::Glider => CanonicalMode::Rotation,
        _ => CanonicalMode::FullSymmetry,
    }
}

/// True when no other symmetry image that also fits the box sorts before
/// `p`; the rule is isotropic, so only these representatives are evolved.
fn is_box_representative(p: &Pattern, w: i64, h: i64) -> bool {
    Symmetry::ALL[1..].iter().all(|&s| {
        let img = p.transformed(s);
        img.width() > w || img.height() > h || img.cells() >= p.cells()
    })
}

/// Visits every index set of size 1..=max_live whose smallest element is
/// `first`.
fn enumerate_from(first: usize, n: usize, max_live: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(chosen: &mut Vec<usize>, next: usize, n: usize, max_live: usize, visit: &mut impl FnMut(&[usize])) {
        visit(chosen);
        if chosen.len() == max_live {
            return;
        }
        for i in next..n {
            chosen.push(i);
            rec(chosen, i + 1, n, max_live, visit);
            chosen.pop();
        }
    }
    let mut chosen = vec![first];
    rec(&mut chosen, first + 1, n, max_live, visit);
}

/// Enumerates every pattern of at most `max_live` cells fitting the box,
/// classifies each, and returns the distinct localizations sorted by weight,
/// then volume.
pub fn search(rule: &RuleSpec, opts: &SearchOptions) -> Result<Vec<Found>, SearchError> {
    let (w, h) = (opts.width, opts.height);
    if w <= 0 || h <= 0 {
        return Err(SearchError::EmptyBox(w, h));
    }
    let n = (w * h) as usize;
    let count = candidate_count(n as u128, opts.max_live);
    if count > ENUMERATION_GUARD {
        return Err(SearchError::Guard { count, guard: ENUMERATION_GUARD });
    }
    let classify = ClassifyOptions::default().with_max_period(opts.max_period).with_max_steps(opts.max_steps);

    // Normalized candidates have a cell in row 0, so the first (row-major)
    // cell lies in row 0.
    let batches: Vec<Vec<LocalizationRecord>> = (0..w as usize)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            enumerate_from(first, n, opts.max_live, &mut |chosen| {
                let cells: Vec<(i64, i64)> = chosen.iter().map(|&i| ((i as i64) % w, (i as i64) / w)).collect();
                if !cells.iter().any(|c| c.0 == 0) {
                    return;
                }
                let p = Pattern::from_cells(cells);
                if !is_box_representative(&p, w, h) {
                    return;
                }
                let report = classify_isolated(&p, rule, &classify);
                if let Some(rec) = report.localization() {
                    if rec.period <= opts.max_period {
                        out.push(rec.clone());
                    }
                }
            });
            out
        })
        .collect();

    let mut distinct: BTreeMap<(LocalizationKind, Vec<Pattern>), (LocalizationRecord, usize)> = BTreeMap::new();
    let mut add = |rec: LocalizationRecord| {
        let mode = dedup_mode(rec.kind);
        let key = (rec.kind, rec.canonical_cycle(mode).0);
        distinct.entry(key).or_insert_with(|| (rec.canonical_record(mode), 0)).1 += 1;
    };
    for rec in batches.into_iter().flatten() {
        if !opts.keep_composites && is_composite(&rec) {
            continue;
        }
        if rec.kind == LocalizationKind::Glider {
            // Only one of each mirror pair was enumerated.
            add(rec.transformed(Symmetry::FlipX));
        }
        add(rec);
    }

    let mut found: Vec<Found> = distinct
        .into_values()
        .map(|(canonical, seeds)| {
            // Re-derive the record from its phase 0 so every result is
            // exactly what classify_isolated reports for the stored shape.
            let report = classify_isolated(canonical.phase0(), rule, &classify);
            let record = report.localization().cloned().unwrap_or(canonical);
            let chiral = record.kind == LocalizationKind::Glider && record.is_chiral();
            Found { record, chiral, seeds }
        })
        .collect();
    found.sort_by(|a, b| {
        (a.record.weight, a.record.volume, a.record.kind, a.record.period)
            .cmp(&(b.record.weight, b.record.volume, b.record.kind, b.record.period))
            .then_with(|| a.record.phases.iter().map(|p| &p.pattern).cmp(b.record.phases.iter().map(|p| &p.pattern)))
    });
    Ok(found)
}

/// Names search results. Under the Diffusion Rule, names come from the
/// reference tables by matching kind, period, translation, volume and
/// weight; when several rows match, chiral mirror pairs take the first
/// names and the entries are flagged ambiguous. Everything else gets a
/// descriptive name such as `glider-p1-w4-v8-1`.
pub fn name_results(rule: &RuleSpec, found: &[Found]) -> Vec<CatalogEntry> {
    let use_tables = *rule == RuleSpec::diffusion();
    let mut groups: BTreeMap<(LocalizationKind, usize, i64, i64, usize), Vec<usize>> = BTreeMap::new();
    for (i, f) in found.iter().enumerate() {
        let r = &f.record;
        groups.entry((r.kind, r.period, r.translation(), r.volume, r.weight)).or_default().push(i);
    }

    let mut names: Vec<Option<(String, bool, Option<String>)>> = vec![None; found.len()];
    let mut generic: HashMap<String, usize> = HashMap::new();
    for ((kind, period, translation, volume, weight), mut members) in groups {
        let zoo_kind = match kind {
            LocalizationKind::Glider => Some(ZooKind::Glider),
            LocalizationKind::Oscillator => Some(ZooKind::Oscillator),
            LocalizationKind::StillLife => None,
        };
        let rows: Vec<&str> = if use_tables {
            zoo::all_rows()
                .filter(|r| {
                    Some(r.kind) == zoo_kind
                        && r.period == period
                        && r.translation == translation
                        && r.volume == volume
                        && r.weight == weight
                })
                .map(|r| r.name)
                .collect()
        } else {
            Vec::new()
        };
        // Mirror pairs first and adjacent, then achiral shapes.
        members.sort_by_key(|&i| (!found[i].chiral, found[i].record.canonical_cycle(CanonicalMode::FullSymmetry).0));
        let mut table_names = rows.iter();
        let mut previous: Option<(&Found, String)> = None;
        for i in members {
            let f = &found[i];
            let (name, ambiguous) = match table_names.next() {
                Some(row) => (row.to_string(), rows.len() > 1),
                None => {
                    let prefix = match kind {
                        LocalizationKind::StillLife => "sl".to_string(),
                        LocalizationKind::Oscillator => format!("osc-p{period}"),
                        LocalizationKind::Glider => format!("glider-p{period}"),
                    };
                    let stem = format!("{prefix}-w{weight}-v{volume}");
                    let k = generic.entry(stem.clone()).or_insert(0);
                    *k += 1;
                    (format!("{stem}-{k}"), false)
                }
            };
            let mut note = None;
            if let Some((prev, prev_name)) = &previous {
                if f.chiral && prev.chiral && is_mirror(&prev.record, &f.record) {
                    note = Some(format!("mirror image of {prev_name}"));
                }
            }
            previous = Some((f, name.clone()));
            names[i] = Some((name, ambiguous, note));
        }
    }

    found
        .iter()
        .zip(names)
        .map(|(f, named)| {
            let (name, ambiguous, note) = named.expect("every result is named");
            let mut e = CatalogEntry::new(name, f.record.phase0().clone(), *rule, Provenance::Searched);
            e.kind = f.record.kind.entry_kind();
            e.claimed = Some(f.record.measurements());
            e.ambiguous = ambiguous;
            e.note = note;
            e
        })
        .collect()
}

fn is_mirror(a: &LocalizationRecord, b: &LocalizationRecord) -> bool {
    a.transformed(Symmetry::FlipX).canonical_cycle(CanonicalMode::Rotation).0
        == b.canonical_cycle(CanonicalMode::Rotation).0
}

/// [`search`] followed by [`name_results`].
pub fn search_localizations(
    rule: &RuleSpec,
    (width, height): (i64, i64),
    max_live: usize,
    max_period: usize,
) -> Result<Vec<CatalogEntry>, SearchError> {
    let found = search(rule, &SearchOptions::new(width, height, max_live, max_period))?;
    Ok(name_results(rule, &found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Move;

    #[test]
    fn guard_and_empty_box() {
        let opts = SearchOptions::new(20, 20, 8, 4);
        assert!(matches!(search(&RuleSpec::diffusion(), &opts), Err(SearchError::Guard { .. })));
        let opts = SearchOptions::new(0, 3, 2, 4);
        assert!(matches!(search(&RuleSpec::diffusion(), &opts), Err(SearchError::EmptyBox(0, 3))));
    }

    #[test]
    fn one_cell_box_has_no_gliders() {
        for rule in [RuleSpec::diffusion(), RuleSpec::life(), RuleSpec::new(1, 1, 0, 8).unwrap()] {
            let found = search(&rule, &SearchOptions::new(1, 1, 1, 4)).unwrap();
            assert!(found.iter().all(|f| f.record.kind != LocalizationKind::Glider));
        }
    }

    #[test]
    fn counts_candidates() {
        assert_eq!(candidate_count(36, 4), 36 + 630 + 7140 + 58905);
        assert_eq!(candidate_count(3, 5), 7);
    }

    #[test]
    fn small_diffusion_search() {
        // A 4x4 box with 4 cells already holds g1 and o1.
        let found = search(&RuleSpec::diffusion(), &SearchOptions::new(4, 4, 4, 4)).unwrap();
        let g1 = found.iter().find(|f| f.record.kind == LocalizationKind::Glider && f.record.volume == 8).unwrap();
        assert_eq!((g1.record.period, g1.record.weight, g1.record.move_kind()), (1, 4, Move::Orthogonal));
        assert!(!g1.chiral);
        assert!(found.iter().any(|f| f.record.kind == LocalizationKind::Oscillator && f.record.volume == 4));
        // Sorted by weight, then volume.
        let keys: Vec<_> = found.iter().map(|f| (f.record.weight, f.record.volume)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        // Results re-verify exactly.
        for f in &found {
            let again = classify_isolated(f.record.phase0(), &RuleSpec::diffusion(), &ClassifyOptions::default());
            assert_eq!(again.localization(), Some(&f.record));
        }
    }
}
