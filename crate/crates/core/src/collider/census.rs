//! Fate of every three-cell placement inside a 3×3 block.

use serde::Serialize;

use crate::analysis::{classify_isolated, ClassifyOptions, Verdict};
use crate::pattern::Pattern;
use crate::rule::RuleSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleFate {
    pub cells: [(i64, i64); 3],
    pub collinear: bool,
    pub verdict: Verdict,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatastropheCensus {
    pub rule: RuleSpec,
    pub fates: Vec<TripleFate>,
}

impl CatastropheCensus {
    pub fn growing(&self) -> usize {
        self.fates.iter().filter(|f| f.verdict == Verdict::UnboundedGrowth).count()
    }

    /// Share of placements that grow without bound.
    pub fn fraction(&self) -> f64 {
        self.growing() as f64 / self.fates.len() as f64
    }

    /// Counts per (collinear, verdict).
    pub fn breakdown(&self) -> Vec<(bool, Verdict, usize)> {
        let mut out: Vec<(bool, Verdict, usize)> = Vec::new();
        for f in &self.fates {
            match out.iter_mut().find(|(c, v, _)| *c == f.collinear && *v == f.verdict) {
                Some(slot) => slot.2 += 1,
                None => out.push((f.collinear, f.verdict, 1)),
            }
        }
        out.sort_by_key(|&(c, v, _)| (c, v as u8));
        out
    }
}

fn collinear(c: &[(i64, i64); 3]) -> bool {
    let (a, b, d) = (c[0], c[1], c[2]);
    (b.0 - a.0) * (d.1 - a.1) == (b.1 - a.1) * (d.0 - a.0)
}

/// Classifies all C(9,3) = 84 placements in isolation.
pub fn catastrophe_census(rule: &RuleSpec, opts: &ClassifyOptions) -> CatastropheCensus {
    let block: Vec<(i64, i64)> = (0..3).flat_map(|y| (0..3).map(move |x| (x, y))).collect();
    let mut fates = Vec::with_capacity(84);
    for i in 0..9 {
        for j in i + 1..9 {
            for k in j + 1..9 {
                let cells = [block[i], block[j], block[k]];
                let report = classify_isolated(&Pattern::from_cells(cells), rule, opts);
                fates.push(TripleFate { cells, collinear: collinear(&cells), verdict: report.verdict, steps: report.steps });
            }
        }
    }
    CatastropheCensus { rule: *rule, fates }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighty_four_placements_eight_collinear() {
        let c = catastrophe_census(&RuleSpec::diffusion(), &ClassifyOptions::default());
        assert_eq!(c.fates.len(), 84);
        assert_eq!(c.fates.iter().filter(|f| f.collinear).count(), 8);
        assert_eq!(c.breakdown().iter().map(|b| b.2).sum::<usize>(), 84);
    }

    #[test]
    fn collinear_triples_never_grow() {
        let c = catastrophe_census(&RuleSpec::diffusion(), &ClassifyOptions::default());
        assert!(c.fates.iter().filter(|f| f.collinear).all(|f| f.verdict != Verdict::UnboundedGrowth));
    }
}
