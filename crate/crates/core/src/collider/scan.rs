//! Exhaustive scans over relative placements and phases of two patterns.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{prepared_shape, run_collision, CollisionError, CollisionOutcome, CollisionSetup, Participant};
use crate::analysis::{classify_isolated, ClassifyOptions, LocalizationRecord};
use crate::pattern::catalog::CatalogEntry;
use crate::rule::RuleSpec;
use crate::symmetry::Symmetry;

/// Relative arrangement of the two patterns. The first one always travels
/// east (or south-east for diagonal movers).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    /// The second pattern travels west and starts east of the first.
    HeadOn,
    /// The second pattern travels north and starts south-east of the first.
    OrthogonalCross,
    /// The second pattern is stationary and sits east of the first.
    MobileVsStationary,
}

impl std::str::FromStr for Geometry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "head-on" => Ok(Geometry::HeadOn),
            "orthogonal-cross" => Ok(Geometry::OrthogonalCross),
            "mobile-vs-stationary" => Ok(Geometry::MobileVsStationary),
            _ => Err(format!("unknown geometry {s:?}; expected head-on, orthogonal-cross or mobile-vs-stationary")),
        }
    }
}

/// One point of a scan. `gap` counts empty columns between the two
/// bounding boxes; `lateral` shifts the second pattern down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScanKey {
    pub lateral: i64,
    pub gap: i64,
    pub phase_a: usize,
    pub phase_b: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub geometry: Geometry,
    pub lateral: RangeInclusive<i64>,
    pub gap: RangeInclusive<i64>,
    pub max_steps: usize,
}

impl ScanSpec {
    pub fn new(geometry: Geometry, lateral: RangeInclusive<i64>, gap: RangeInclusive<i64>) -> ScanSpec {
        ScanSpec { geometry, lateral, gap, max_steps: 512 }
    }

    /// The collision staged at `key`.
    pub fn setup(
        &self,
        a: &CatalogEntry,
        b: &CatalogEntry,
        rule: &RuleSpec,
        key: ScanKey,
    ) -> Result<CollisionSetup, CollisionError> {
        let (ta, tb) = self.transforms(a, b, rule)?;
        stage(self, a, b, ta, tb, rule, key)
    }

    fn transforms(
        &self,
        a: &CatalogEntry,
        b: &CatalogEntry,
        rule: &RuleSpec,
    ) -> Result<(Symmetry, Symmetry), CollisionError> {
        let ra = record(a, rule)?;
        if !ra.is_mobile() {
            return Err(CollisionError::NotMobile(a.name.clone()));
        }
        let rb = record(b, rule)?;
        let ta = orient(&ra, |x, y| x > 0 && y >= 0);
        let tb = match self.geometry {
            Geometry::HeadOn => {
                if !rb.is_mobile() {
                    return Err(CollisionError::NotMobile(b.name.clone()));
                }
                orient(&rb, |x, y| x < 0 && y <= 0)
            }
            Geometry::OrthogonalCross => {
                if !rb.is_mobile() {
                    return Err(CollisionError::NotMobile(b.name.clone()));
                }
                orient(&rb, |x, y| y < 0 && x >= 0)
            }
            Geometry::MobileVsStationary => {
                if rb.is_mobile() {
                    return Err(CollisionError::NotStationary(b.name.clone()));
                }
                Symmetry::Identity
            }
        };
        Ok((ta, tb))
    }
}

fn record(entry: &CatalogEntry, rule: &RuleSpec) -> Result<LocalizationRecord, CollisionError> {
    classify_isolated(&entry.pattern, rule, &ClassifyOptions::default())
        .localization()
        .cloned()
        .ok_or_else(|| CollisionError::NotLocalization(entry.name.clone()))
}

/// First rotation whose image of the velocity satisfies `want`.
fn orient(rec: &LocalizationRecord, want: impl Fn(i64, i64) -> bool) -> Symmetry {
    Symmetry::ROTATIONS
        .into_iter()
        .find(|s| {
            let (x, y) = s.apply((rec.dx, rec.dy));
            want(x, y)
        })
        .unwrap_or(Symmetry::Identity)
}

fn stage(
    spec: &ScanSpec,
    a: &CatalogEntry,
    b: &CatalogEntry,
    ta: Symmetry,
    tb: Symmetry,
    rule: &RuleSpec,
    key: ScanKey,
) -> Result<CollisionSetup, CollisionError> {
    let sa = prepared_shape(&a.pattern, ta, key.phase_a, rule)?;
    let x = sa.width() + key.gap;
    let y = match spec.geometry {
        Geometry::HeadOn | Geometry::MobileVsStationary => key.lateral,
        Geometry::OrthogonalCross => sa.height() + key.gap + key.lateral,
    };
    let participants = vec![
        Participant::from_entry(a, ta, (0, 0), key.phase_a),
        Participant::from_entry(b, tb, (x, y), key.phase_b),
    ];
    Ok(CollisionSetup::new(*rule, participants).with_max_steps(spec.max_steps))
}

/// Runs every setup in the ranges, over all phases of both patterns. Points
/// are independent and run in parallel; the map is ordered by key.
pub fn scan_collisions(
    a: &CatalogEntry,
    b: &CatalogEntry,
    rule: &RuleSpec,
    spec: &ScanSpec,
) -> Result<BTreeMap<ScanKey, CollisionOutcome>, CollisionError> {
    if spec.lateral.is_empty() || spec.gap.is_empty() {
        return Err(CollisionError::EmptyRange);
    }
    let (ta, tb) = spec.transforms(a, b, rule)?;
    let (pa, pb) = (record(a, rule)?.period, record(b, rule)?.period);
    let mut keys = Vec::new();
    for lateral in spec.lateral.clone() {
        for gap in spec.gap.clone() {
            for phase_a in 0..pa {
                for phase_b in 0..pb {
                    keys.push(ScanKey { lateral, gap, phase_a, phase_b });
                }
            }
        }
    }
    keys.into_par_iter()
        .map(|key| {
            let setup = stage(spec, a, b, ta, tb, rule, key)?;
            Ok((key, run_collision(&setup)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::catalog::Catalog;

    #[test]
    fn empty_ranges_rejected() {
        let cat = Catalog::builtin();
        let (g, o) = (cat.get("g1").unwrap(), cat.get("o1").unwrap());
        #[allow(clippy::reversed_empty_ranges)]
        let spec = ScanSpec::new(Geometry::HeadOn, 1..=0, 2..=4);
        assert!(matches!(scan_collisions(g, o, &RuleSpec::diffusion(), &spec), Err(CollisionError::EmptyRange)));
    }

    #[test]
    fn geometry_checks_mobility() {
        let cat = Catalog::builtin();
        let (g, o) = (cat.get("g1").unwrap(), cat.get("o1").unwrap());
        let spec = ScanSpec::new(Geometry::HeadOn, 0..=0, 2..=2);
        assert!(matches!(scan_collisions(g, o, &RuleSpec::diffusion(), &spec), Err(CollisionError::NotMobile(_))));
        let spec = ScanSpec::new(Geometry::MobileVsStationary, 0..=0, 2..=2);
        assert!(matches!(scan_collisions(g, g, &RuleSpec::diffusion(), &spec), Err(CollisionError::NotStationary(_))));
    }

    #[test]
    fn head_on_places_second_pattern_east_moving_west() {
        let cat = Catalog::builtin();
        let g = cat.get("g4").unwrap();
        let spec = ScanSpec::new(Geometry::HeadOn, 0..=0, 5..=5);
        let key = ScanKey { lateral: 0, gap: 5, phase_a: 0, phase_b: 0 };
        let setup = spec.setup(g, g, &RuleSpec::diffusion(), key).unwrap();
        let a = &setup.participants[0];
        let b = &setup.participants[1];
        let ra = record(g, &RuleSpec::diffusion()).unwrap().transformed(a.transform);
        let rb = record(g, &RuleSpec::diffusion()).unwrap().transformed(b.transform);
        assert!(ra.dx > 0 && ra.dy == 0);
        assert!(rb.dx < 0 && rb.dy == 0);
        let wa = g.pattern.transformed(a.transform).width();
        assert_eq!(b.offset, (wa + 5, 0));
    }
}
