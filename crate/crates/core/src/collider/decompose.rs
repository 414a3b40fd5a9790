//! Splitting a configuration into separately classified components.

use serde::Serialize;

use crate::analysis::{classify_isolated, components, ClassifyOptions, FateReport, SEPARATION_GAP};
use crate::lattice::{BBox, Grid};
use crate::pattern::Pattern;
use crate::rule::RuleSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub pattern: Pattern,
    /// World position of the pattern's top-left corner.
    pub origin: (i64, i64),
    pub report: FateReport,
}

/// Rounds of merging components that would come within the separation gap
/// of each other.
const RETRIES: usize = 4;
/// Steps ahead checked for re-merging.
const HORIZON: usize = 16;

/// Components at Chebyshev gap ≥ 3, each classified alone. Components whose
/// predicted flights come closer than the gap within a short horizon are
/// merged and classified together.
pub fn decompose(grid: &Grid, rule: &RuleSpec, opts: &ClassifyOptions) -> Vec<Component> {
    let mut groups: Vec<Vec<(i64, i64)>> = components(&grid.live_cells(), SEPARATION_GAP);
    let mut out = classify_all(&groups, rule, opts);
    for _ in 0..RETRIES {
        let Some((i, j)) = first_meeting(&out) else { break };
        let merged: Vec<(i64, i64)> = groups[i].iter().chain(&groups[j]).copied().collect();
        groups.remove(j);
        groups[i] = merged;
        out = classify_all(&groups, rule, opts);
    }
    out
}

fn classify_all(groups: &[Vec<(i64, i64)>], rule: &RuleSpec, opts: &ClassifyOptions) -> Vec<Component> {
    groups
        .iter()
        .map(|cells| {
            let (pattern, origin) = Pattern::normalized(cells.iter().copied());
            let report = classify_isolated(&pattern, rule, opts);
            Component { pattern, origin, report }
        })
        .collect()
}

/// Box of a component `t` steps ahead: exact for localizations already in
/// their cycle, otherwise the current box grown by `t` (light cone).
fn predicted(c: &Component, t: usize) -> BBox {
    match c.report.localization().filter(|r| c.report.steps == r.period) {
        Some(r) => r.box_at(c.origin, t),
        None => {
            let b = c.pattern.bbox_at(c.origin.0, c.origin.1).unwrap();
            let t = t as i64;
            BBox { min_x: b.min_x - t, min_y: b.min_y - t, max_x: b.max_x + t, max_y: b.max_y + t }
        }
    }
}

fn first_meeting(comps: &[Component]) -> Option<(usize, usize)> {
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            if (1..=HORIZON).any(|t| predicted(&comps[i], t).gap(&predicted(&comps[j], t)) < SEPARATION_GAP) {
                return Some((i, j));
            }
        }
    }
    None
}
