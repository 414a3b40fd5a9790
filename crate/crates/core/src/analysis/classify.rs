//! Fate of a single pattern on an empty unbounded plane.

use std::collections::VecDeque;

use super::{FateRecord, FateReport, LocalizationRecord, Phase, Verdict};
use crate::lattice::GridError;
use crate::pattern::Pattern;
use crate::rule::RuleSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyOptions {
    /// Largest period (and glider period) looked for.
    pub max_period: usize,
    pub max_steps: usize,
    /// Bounding-box side above which the pattern counts as growing.
    pub box_cap: i64,
    /// Population above `growth_factor` times the initial weight counts as
    /// growing.
    pub growth_factor: u64,
    /// Consecutive steps of strictly increasing bounding-box semiperimeter
    /// that count as growing.
    pub monotone_window: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { max_period: 16, max_steps: 1024, box_cap: 256, growth_factor: 50, monotone_window: 64 }
    }
}

impl ClassifyOptions {
    pub fn with_max_period(self, max_period: usize) -> Self {
        ClassifyOptions { max_period, ..self }
    }

    pub fn with_max_steps(self, max_steps: usize) -> Self {
        ClassifyOptions { max_steps, ..self }
    }
}

/// Evolves `pattern` alone and reports the first of: extinction, a repeat
/// (up to translation) within `max_period` steps, a growth trigger, or budget
/// exhaustion.
pub fn classify_isolated(pattern: &Pattern, rule: &RuleSpec, opts: &ClassifyOptions) -> FateReport {
    if pattern.is_empty() {
        return FateReport::new(Verdict::Dies, 0, "empty pattern");
    }
    let max_period = opts.max_period.max(1);
    let cap = (opts.box_cap.max(1) as usize) * 2 + 64;
    let mut grid = match pattern.to_grid(0, 0, cap) {
        Ok(g) => g,
        Err(e) => return FateReport::new(Verdict::Undecided, 0, e.to_string()),
    };
    let initial = pattern.weight() as u64;
    let mut history: VecDeque<(Pattern, (i64, i64))> = VecDeque::with_capacity(max_period + 1);
    history.push_back((pattern.clone(), (0, 0)));
    let mut last_semi = pattern.width() + pattern.height();
    let mut rising = 0usize;

    for t in 1..=opts.max_steps {
        match grid.advance(rule) {
            Ok(()) => {}
            Err(GridError::CapExceeded { .. }) => {
                return FateReport::new(Verdict::UnboundedGrowth, t, "stored window exceeded its cap");
            }
            Err(e) => return FateReport::new(Verdict::Undecided, t, e.to_string()),
        }
        if grid.is_empty() {
            return FateReport::new(Verdict::Dies, t, format!("extinct at generation {t}"));
        }
        let (current, offset) = Pattern::from_grid(&grid);

        // history[i] holds generation t - len + i.
        let len = history.len();
        for lag in 1..=len {
            let (past, past_offset) = &history[len - lag];
            if *past == current {
                let start = len - lag;
                let phases = history
                    .iter()
                    .skip(start)
                    .map(|(p, o)| Phase { pattern: p.clone(), offset: (o.0 - past_offset.0, o.1 - past_offset.1) })
                    .collect();
                let record =
                    LocalizationRecord::from_phases(phases, offset.0 - past_offset.0, offset.1 - past_offset.1);
                let verdict = match record.kind {
                    super::LocalizationKind::StillLife => Verdict::StillLife,
                    super::LocalizationKind::Oscillator => Verdict::Oscillator,
                    super::LocalizationKind::Glider => Verdict::Glider,
                };
                let reason = format!("repeats with period {lag} from generation {}", t - lag);
                return FateReport { verdict, record: Some(FateRecord::Localization(record)), steps: t, reason };
            }
        }

        let semi = current.width() + current.height();
        rising = if semi > last_semi { rising + 1 } else { 0 };
        last_semi = semi;
        if current.width() > opts.box_cap || current.height() > opts.box_cap {
            return FateReport::new(Verdict::UnboundedGrowth, t, format!("bounding box exceeded {}", opts.box_cap));
        }
        if current.weight() as u64 > opts.growth_factor.saturating_mul(initial) {
            return FateReport::new(
                Verdict::UnboundedGrowth,
                t,
                format!("population exceeded {} times the initial weight", opts.growth_factor),
            );
        }
        if rising >= opts.monotone_window {
            return FateReport::new(
                Verdict::UnboundedGrowth,
                t,
                format!("semiperimeter rose for {} consecutive steps", opts.monotone_window),
            );
        }

        if history.len() == max_period {
            history.pop_front();
        }
        history.push_back((current, offset));
    }
    FateReport::new(Verdict::Undecided, opts.max_steps, "step budget exhausted")
}
