//! Guns, puffer trains and puffer-guns: a periodic core that keeps emitting
//! gliders or depositing stationary localizations.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use super::{
    classify_isolated, components, ClassifyOptions, FateRecord, FateReport, LocalizationKind, LocalizationRecord,
    Speed, Verdict, SEPARATION_GAP,
};
use crate::pattern::{CanonicalMode, Pattern};
use crate::rule::RuleSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterOptions {
    pub steps: usize,
    /// Largest core period looked for.
    pub max_period: usize,
    /// Least coefficient of determination for the linear population fit.
    pub min_r_squared: f64,
    /// Budget for classifying individual components.
    pub component: ClassifyOptions,
}

impl Default for EmitterOptions {
    fn default() -> Self {
        EmitterOptions {
            steps: 256,
            max_period: 64,
            min_r_squared: 0.8,
            component: ClassifyOptions { max_steps: 128, box_cap: 64, ..ClassifyOptions::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmitterKind {
    /// Emits gliders only.
    Gun,
    /// Leaves stationary localizations only.
    Puffer,
    PufferGun,
}

/// One kind of emitted localization and how many were present at the end of
/// the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Emission {
    pub kind: LocalizationKind,
    pub period: usize,
    pub dx: i64,
    pub dy: i64,
    pub volume: i64,
    pub weight: usize,
    pub count: usize,
    /// Canonical phase 0.
    pub shape: Pattern,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmitterRecord {
    pub kind: EmitterKind,
    pub core_period: usize,
    pub core_dx: i64,
    pub core_dy: i64,
    pub speed: Option<Speed>,
    /// Core shape at the end of the run.
    pub core: Pattern,
    pub emissions: Vec<Emission>,
    /// Summary of the stationary residue, e.g. `"12 x osc-p2-w2-v4"`.
    pub debris: String,
    /// Slope of the least-squares population line, cells per step.
    pub growth_rate: f64,
    pub growth_intercept: f64,
    pub r_squared: f64,
}

struct Snapshot {
    core: Vec<(i64, i64)>,
    emitted: Vec<LocalizationRecord>,
}

fn centroid(cells: &[(i64, i64)]) -> (f64, f64) {
    let n = cells.len().max(1) as f64;
    let (sx, sy) = cells.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x as f64, b + y as f64));
    (sx / n, sy / n)
}

/// Least-squares line through the points: slope, intercept, R².
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, my, 0.0);
    }
    let a = sxy / sxx;
    let r2 = if syy == 0.0 { 0.0 } else { sxy * sxy / (sxx * syy) };
    (a, my - a * mx, r2)
}

/// Classifies `pattern` as an emitter when its population grows linearly and
/// a tracked core repeats with some period once emitted localizations are
/// set aside. Anything else gets the isolated classification.
pub fn detect_emitter(pattern: &Pattern, rule: &RuleSpec, opts: &EmitterOptions) -> FateReport {
    let isolated = ClassifyOptions { max_steps: opts.steps, ..ClassifyOptions::default() }
        .with_max_period(opts.max_period.max(16));
    let plain = classify_isolated(pattern, rule, &isolated);
    if matches!(plain.verdict, Verdict::Dies | Verdict::StillLife | Verdict::Oscillator | Verdict::Glider) {
        return plain;
    }
    let fallback = |why: &str| FateReport { reason: format!("{}; not an emitter: {why}", plain.reason), ..plain.clone() };

    let window = 2 * opts.max_period + 1;
    if opts.steps < window {
        return fallback("run too short for the core period window");
    }
    let mut grid = match pattern.to_grid(0, 0, crate::lattice::DEFAULT_UNBOUNDED_CAP) {
        Ok(g) => g,
        Err(e) => return fallback(&e.to_string()),
    };
    let mut populations = vec![grid.population() as f64];
    let mut tracked = centroid(pattern.cells());
    let mut trail: VecDeque<(f64, f64)> = VecDeque::new();
    let mut tail: VecDeque<Vec<Vec<(i64, i64)>>> = VecDeque::new();
    for t in 1..=opts.steps {
        if let Err(e) = grid.advance(rule) {
            return fallback(&e.to_string());
        }
        populations.push(grid.population() as f64);
        let cells = grid.live_cells();
        if cells.is_empty() {
            return fallback("pattern died");
        }
        let comps = components(&cells, SEPARATION_GAP);
        let nearest = comps
            .iter()
            .map(|c| centroid(c))
            .min_by(|a, b| {
                let da = (a.0 - tracked.0).powi(2) + (a.1 - tracked.1).powi(2);
                let db = (b.0 - tracked.0).powi(2) + (b.1 - tracked.1).powi(2);
                da.total_cmp(&db)
            })
            .unwrap();
        tracked = nearest;
        if t + window > opts.steps {
            trail.push_back(tracked);
            tail.push_back(comps);
        }
    }

    let span = (trail.len() - 1) as f64;
    let (first, last) = (trail[0], trail[trail.len() - 1]);
    let core_velocity = ((last.0 - first.0) / span, (last.1 - first.1) / span);

    let mut cache: HashMap<Pattern, Option<LocalizationRecord>> = HashMap::new();
    let mut classify_component = |cells: &[(i64, i64)]| -> Option<LocalizationRecord> {
        let p = Pattern::from_cells(cells.iter().copied());
        cache
            .entry(p)
            .or_insert_with_key(|p| classify_isolated(p, rule, &opts.component).localization().cloned())
            .clone()
    };
    let snapshots: Vec<Snapshot> = tail
        .iter()
        .map(|comps| {
            let mut core = Vec::new();
            let mut emitted = Vec::new();
            for c in comps {
                match classify_component(c) {
                    Some(rec) if rec.phases[0].pattern == Pattern::from_cells(c.iter().copied()) => {
                        let v = (rec.dx as f64 / rec.period as f64, rec.dy as f64 / rec.period as f64);
                        let dv = ((v.0 - core_velocity.0).powi(2) + (v.1 - core_velocity.1).powi(2)).sqrt();
                        if dv > 0.05 {
                            emitted.push(rec);
                        } else {
                            core.extend_from_slice(c);
                        }
                    }
                    _ => core.extend_from_slice(c),
                }
            }
            Snapshot { core, emitted }
        })
        .collect();

    let cores: Vec<(Pattern, (i64, i64))> = snapshots.iter().map(|s| Pattern::normalized(s.core.iter().copied())).collect();
    let end = cores.len() - 1;
    let periodic = (1..=opts.max_period).find_map(|p| {
        let d = (cores[end].1 .0 - cores[end - p].1 .0, cores[end].1 .1 - cores[end - p].1 .1);
        let holds = (end + 1 - p..=end).all(|t| {
            t >= p
                && cores[t].0 == cores[t - p].0
                && !cores[t].0.is_empty()
                && (cores[t].1 .0 - cores[t - p].1 .0, cores[t].1 .1 - cores[t - p].1 .1) == d
        });
        holds.then_some((p, d))
    });
    let Some((core_period, (core_dx, core_dy))) = periodic else {
        return FateReport {
            verdict: Verdict::Undecided,
            reason: "population grows linearly but no periodic core was tracked".into(),
            ..plain
        };
    };

    // Fit the second half of the population trace, sampled once per core
    // period so the core's own oscillation does not blur the line.
    let last_t = populations.len() - 1;
    let mut samples: Vec<usize> = (0..).map(|k| last_t - k * core_period).take_while(|&t| t >= last_t / 2).collect();
    if samples.len() < 3 {
        samples = (last_t / 2..=last_t).collect();
    }
    samples.reverse();
    let xs: Vec<f64> = samples.iter().map(|&t| t as f64).collect();
    let ys: Vec<f64> = samples.iter().map(|&t| populations[t]).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    if !(slope > 0.0) || r2 < opts.min_r_squared {
        return fallback(&format!("population is not linear (slope {slope:.3}, r² {r2:.3})"));
    }

    let last = &snapshots[end];
    let mut kinds: BTreeMap<(LocalizationKind, Vec<Pattern>), (LocalizationRecord, usize)> = BTreeMap::new();
    for rec in &last.emitted {
        let key = (rec.kind, rec.canonical_cycle(CanonicalMode::FullSymmetry).0);
        kinds.entry(key).or_insert_with(|| (rec.canonical_record(CanonicalMode::FullSymmetry), 0)).1 += 1;
    }
    if kinds.is_empty() {
        return FateReport { verdict: Verdict::Undecided, reason: "periodic core without emissions".into(), ..plain };
    }
    let emissions: Vec<Emission> = kinds
        .into_values()
        .map(|(rec, count)| Emission {
            kind: rec.kind,
            period: rec.period,
            dx: rec.dx,
            dy: rec.dy,
            volume: rec.volume,
            weight: rec.weight,
            count,
            shape: rec.phase0().clone(),
        })
        .collect();
    let mobile = emissions.iter().any(|e| e.kind == LocalizationKind::Glider);
    let stationary = emissions.iter().any(|e| e.kind != LocalizationKind::Glider);
    let kind = match (mobile, stationary) {
        (true, false) => EmitterKind::Gun,
        (false, true) => EmitterKind::Puffer,
        _ => EmitterKind::PufferGun,
    };
    let debris = emissions
        .iter()
        .filter(|e| e.kind != LocalizationKind::Glider)
        .map(|e| format!("{} x p{} w{} v{}", e.count, e.period, e.weight, e.volume))
        .collect::<Vec<_>>()
        .join(", ");
    let translation = core_dx.abs().max(core_dy.abs());
    let record = EmitterRecord {
        kind,
        core_period,
        core_dx,
        core_dy,
        speed: (translation > 0).then_some(Speed { translation, period: core_period }),
        core: cores[end].0.clone(),
        emissions,
        debris,
        growth_rate: slope,
        growth_intercept: intercept,
        r_squared: r2,
    };
    FateReport {
        verdict: Verdict::Emitter,
        record: Some(FateRecord::Emitter(record)),
        steps: opts.steps,
        reason: format!("core repeats with period {core_period}; population grows {slope:.3} cells per step"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_rle;
    use crate::zoo;

    const GOSPER: &str = "x = 36, y = 9, rule = B3/S23\n24bo$22bobo$12b2o6b2o12b2o$11bo3bo4b2o12b2o$2o8bo5bo3b2o$\
                          2o8bo3bob2o4bobo$10bo5bo7bo$11bo3bo$12b2o!";

    #[test]
    fn gosper_gun_is_a_gun() {
        let (gun, rule) = parse_rle(GOSPER).unwrap();
        let report = detect_emitter(&gun, &rule.unwrap(), &EmitterOptions::default());
        assert_eq!(report.verdict, Verdict::Emitter, "{}", report.reason);
        let rec = report.emitter().unwrap();
        assert_eq!(rec.kind, EmitterKind::Gun);
        assert_eq!((rec.core_period, rec.core_dx, rec.core_dy), (30, 0, 0));
        assert_eq!(rec.emissions.len(), 1);
        let g = &rec.emissions[0];
        assert_eq!((g.period, g.dx.abs(), g.dy.abs(), g.weight), (4, 1, 1, 5));
        assert!((rec.growth_rate - 5.0 / 30.0).abs() < 0.05);
    }

    #[test]
    fn glider_stream_is_not_an_emitter() {
        let g1 = zoo::builtin("g1").unwrap();
        let rec = classify_isolated(&g1, &RuleSpec::diffusion(), &Default::default()).localization().cloned().unwrap();
        let (ux, uy) = (rec.dx, rec.dy);
        let spacing = 6;
        let cells: Vec<_> = (0..5).flat_map(|k| g1.translated(-k * spacing * ux, -k * spacing * uy)).collect();
        let report = detect_emitter(&Pattern::from_cells(cells), &RuleSpec::diffusion(), &EmitterOptions::default());
        assert_ne!(report.verdict, Verdict::Emitter);
        assert_eq!(report.verdict, Verdict::Glider);
    }

    #[test]
    fn linear_fit_exact() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (a, b, r2) = linear_fit(&xs, &ys);
        assert!((a - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
