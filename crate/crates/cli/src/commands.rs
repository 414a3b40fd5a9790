use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use difflife::analysis::{search_localizations, soup_census, torus_residue, ClassifyOptions, SoupOptions, SoupVerdict};
use difflife::collider::{catastrophe_census, run_collision, scan_collisions, CollisionOutcome, Geometry, ScanKey, ScanSpec};
use difflife::gates::{eval_gate, frozen, synthesize_gate, GateBlueprint, GateName, MemoryCell, ScanBudget};
use difflife::meanfield::{build_polynomial, monte_carlo_density};
use difflife::pattern::catalog::read_pattern;
use difflife::{write_rle, Catalog, Grid};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{out_dir, write_json, write_pbm, Header, JsonLines};
use crate::{Common, Usage};

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let dim = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad dimension {t:?}: {e}"));
    let (w, h) = (dim(w)?, dim(h)?);
    if w == 0 || h == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok((w, h))
}

fn parse_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let num = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("bad bound {t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s:?}"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|v| v..=v),
    }
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is outside [0, 1]"))
    }
}

fn catalog(extra: &Option<PathBuf>) -> Result<Catalog> {
    let mut cat = Catalog::builtin();
    if let Some(dir) = extra {
        for e in Catalog::load(dir)?.entries() {
            cat.upsert(e.clone())?;
        }
    }
    Ok(cat)
}

#[derive(Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    common: Common,
    /// Pattern file (.rle or .cells), centred on the torus.
    #[arg(long, conflicts_with = "density", required_unless_present = "density")]
    pattern: Option<PathBuf>,
    /// Random soup of this density instead of a pattern.
    #[arg(long, value_parser = parse_probability)]
    density: Option<f64>,
    #[arg(long, default_value = "200x200", value_parser = parse_size)]
    size: (usize, usize),
    #[arg(long, default_value_t = 18)]
    steps: usize,
    /// Snapshot every this many steps (the last step is always written).
    #[arg(long)]
    stride: Option<usize>,
}

#[derive(Serialize)]
struct EvolveReport {
    source: String,
    width: usize,
    height: usize,
    steps: usize,
    stride: usize,
    snapshots: Vec<String>,
    population: Vec<u64>,
    residue: difflife::analysis::Residue,
    verdict: SoupVerdict,
}

pub fn evolve(a: EvolveArgs) -> Result<()> {
    let (w, h) = a.size;
    let stride = a.stride.unwrap_or(a.steps.max(1));
    if stride == 0 {
        bail!(Usage("--stride must be positive".into()));
    }
    let dir = out_dir(&a.common.out)?;
    let rule = a.common.rule;
    let (mut grid, source) = match (&a.pattern, a.density) {
        (Some(path), _) => {
            let (pattern, _) = read_pattern(path)?;
            if pattern.width() > w as i64 || pattern.height() > h as i64 {
                bail!("pattern is {}x{}, larger than the {w}x{h} torus", pattern.width(), pattern.height());
            }
            let (x0, y0) = ((w as i64 - pattern.width()) / 2, (h as i64 - pattern.height()) / 2);
            let mut grid = Grid::toroidal(w, h)?;
            for (x, y) in pattern.translated(x0, y0) {
                grid.set(x, y, true)?;
            }
            (grid, path.display().to_string())
        }
        (None, Some(d)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
            (Grid::bernoulli_torus(w, h, d, &mut rng)?, format!("soup d={d}"))
        }
        (None, None) => bail!(Usage("give --pattern or --density".into())),
    };
    let mut snapshots = Vec::new();
    let mut population = vec![grid.population()];
    let snap = |grid: &Grid, t: usize, snapshots: &mut Vec<String>| -> Result<()> {
        let name = format!("evolve-{t:05}.pbm");
        write_pbm(&dir.join(&name), grid)?;
        snapshots.push(name);
        Ok(())
    };
    snap(&grid, 0, &mut snapshots)?;
    for t in 1..=a.steps {
        grid.advance(&rule)?;
        population.push(grid.population());
        if t % stride == 0 || t == a.steps {
            snap(&grid, t, &mut snapshots)?;
        }
    }
    let residue = torus_residue(&grid, &rule, &ClassifyOptions::default());
    let report = EvolveReport {
        source,
        width: w,
        height: h,
        steps: a.steps,
        stride,
        snapshots,
        population,
        residue,
        verdict: residue.verdict(),
    };
    println!(
        "{} steps, final population {}, verdict {:?}",
        a.steps,
        report.population.last().unwrap_or(&0),
        report.verdict
    );
    write_json(&dir.join("evolve.json"), &Header::new("evolve", &rule, a.common.seed), report)
}

#[derive(Args)]
pub struct SoupArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = parse_probability)]
    density: f64,
    #[arg(long, default_value = "200x200", value_parser = parse_size)]
    size: (usize, usize),
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 100)]
    trials: u64,
}

#[derive(Serialize)]
struct SoupSummary {
    density: f64,
    width: usize,
    height: usize,
    steps: usize,
    trials: usize,
    fractions: BTreeMap<String, f64>,
    bounded_fraction: f64,
    localization_fraction: f64,
}

pub fn soup(a: SoupArgs) -> Result<()> {
    let dir = out_dir(&a.common.out)?;
    let rule = a.common.rule;
    let opts = SoupOptions::new(a.size, a.density, a.steps, a.trials, a.common.seed);
    let census = soup_census(&rule, &opts)?;
    let mut lines = JsonLines::new(&dir.join("soup.jsonl"), &Header::new("soup", &rule, a.common.seed))?;
    for t in &census.trials {
        lines.record("trial", t)?;
    }
    let verdicts = [
        SoupVerdict::Dies,
        SoupVerdict::StationaryResidue,
        SoupVerdict::ContainsGliders,
        SoupVerdict::UnboundedGrowth,
        SoupVerdict::Undecided,
    ];
    let fractions = verdicts
        .iter()
        .map(|&v| (serde_json::to_value(v).unwrap().as_str().unwrap_or_default().to_owned(), census.fraction(v)))
        .collect();
    let summary = SoupSummary {
        density: a.density,
        width: a.size.0,
        height: a.size.1,
        steps: a.steps,
        trials: census.trials.len(),
        fractions,
        bounded_fraction: census.bounded_fraction(),
        localization_fraction: census.localization_fraction(),
    };
    println!(
        "d={} seed={}: bounded {:.3}, with localizations {:.3}",
        a.density, a.common.seed, summary.bounded_fraction, summary.localization_fraction
    );
    lines.record("summary", summary)?;
    lines.finish()
}

#[derive(Args)]
pub struct SearchArgs {
    #[command(flatten)]
    common: Common,
    /// Search box.
    #[arg(long = "box", default_value = "6x6", value_parser = parse_size)]
    bounds: (usize, usize),
    #[arg(long, default_value_t = 4)]
    max_live: usize,
    #[arg(long, default_value_t = 4)]
    max_period: usize,
    /// Catalog directory to add the results to (created if missing).
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Serialize)]
struct FoundLine<'a> {
    name: &'a str,
    kind: difflife::EntryKind,
    #[serde(flatten)]
    measurements: Option<difflife::Measurements>,
    ambiguous: bool,
    rle: String,
}

pub fn search(a: SearchArgs) -> Result<()> {
    let dir = out_dir(&a.common.out)?;
    let rule = a.common.rule;
    let (w, h) = a.bounds;
    let entries = search_localizations(&rule, (w as i64, h as i64), a.max_live, a.max_period)?;
    let mut lines = JsonLines::new(&dir.join("search.jsonl"), &Header::new("search", &rule, a.common.seed))?;
    for e in &entries {
        println!("{}", e.name);
        lines.record(
            "localization",
            FoundLine {
                name: &e.name,
                kind: e.kind,
                measurements: e.claimed,
                ambiguous: e.ambiguous,
                rle: write_rle(&e.pattern, None).trim_end().to_owned(),
            },
        )?;
    }
    lines.finish()?;
    if let Some(cat_dir) = &a.catalog {
        let mut cat = Catalog::load(cat_dir)?;
        for e in entries {
            cat.upsert(e)?;
        }
        cat.save(cat_dir)?;
    }
    Ok(())
}

#[derive(Args)]
pub struct ScanArgs {
    #[command(flatten)]
    common: Common,
    /// First pattern (catalog name); it travels east.
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long, default_value = "head-on")]
    geometry: Geometry,
    /// Lateral offsets, `lo..hi` inclusive.
    #[arg(long, default_value = "-4..4", value_parser = parse_range, allow_hyphen_values = true)]
    lateral: RangeInclusive<i64>,
    /// Empty columns between the two boxes, `lo..hi` inclusive.
    #[arg(long, default_value = "2..20", value_parser = parse_range)]
    gap: RangeInclusive<i64>,
    /// Extra catalog directory; its entries override the built-in ones.
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Serialize)]
struct SurvivorLine {
    kind: difflife::analysis::LocalizationKind,
    period: usize,
    dx: i64,
    dy: i64,
    origin: (i64, i64),
    rle: String,
}

#[derive(Serialize)]
struct OutcomeLine<'a> {
    #[serde(flatten)]
    key: ScanKey,
    verdict: difflife::collider::CollisionVerdict,
    steps: usize,
    population: u64,
    survivors: Vec<SurvivorLine>,
    shifts: &'a [difflife::collider::Shift],
    reason: &'a str,
}

impl<'a> OutcomeLine<'a> {
    fn new(key: ScanKey, o: &'a CollisionOutcome) -> Self {
        OutcomeLine {
            key,
            verdict: o.verdict,
            steps: o.steps,
            population: o.population,
            survivors: o
                .survivors
                .iter()
                .map(|s| SurvivorLine {
                    kind: s.kind,
                    period: s.period,
                    dx: s.dx,
                    dy: s.dy,
                    origin: s.origin,
                    rle: write_rle(&s.shape, None).trim_end().to_owned(),
                })
                .collect(),
            shifts: &o.shifts,
            reason: &o.reason,
        }
    }
}

fn geometry_name(g: Geometry) -> String {
    serde_json::to_value(g).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

pub fn scan(a: ScanArgs) -> Result<()> {
    let dir = out_dir(&a.common.out)?;
    let rule = a.common.rule;
    let cat = catalog(&a.catalog)?;
    let spec = ScanSpec::new(a.geometry, a.lateral.clone(), a.gap.clone());
    let map = scan_collisions(cat.require(&a.a)?, cat.require(&a.b)?, &rule, &spec)?;
    let name = format!("scan-{}-{}-{}.jsonl", a.a, a.b, geometry_name(a.geometry));
    let mut lines = JsonLines::new(&dir.join(&name), &Header::new("scan", &rule, a.common.seed))?;
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    for (key, o) in &map {
        *tally.entry(o.verdict.to_string()).or_default() += 1;
        lines.record("outcome", OutcomeLine::new(*key, o))?;
    }
    for (verdict, n) in &tally {
        println!("{verdict}: {n}");
    }
    lines.record("summary", BTreeMap::from([("verdicts", &tally)]))?;
    lines.finish()
}

#[derive(Args)]
pub struct CollideArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long, default_value = "head-on")]
    geometry: Geometry,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    lateral: i64,
    #[arg(long, default_value_t = 2)]
    gap: i64,
    #[arg(long, default_value_t = 0)]
    phase_a: usize,
    #[arg(long, default_value_t = 0)]
    phase_b: usize,
    #[arg(long)]
    catalog: Option<PathBuf>,
}

pub fn collide(a: CollideArgs) -> Result<()> {
    let dir = out_dir(&a.common.out)?;
    let rule = a.common.rule;
    let cat = catalog(&a.catalog)?;
    let key = ScanKey { lateral: a.lateral, gap: a.gap, phase_a: a.phase_a, phase_b: a.phase_b };
    let spec = ScanSpec::new(a.geometry, a.lateral..=a.lateral, a.gap..=a.gap);
    let setup = spec.setup(cat.require(&a.a)?, cat.require(&a.b)?, &rule, key)?;
    let outcome = run_collision(&setup)?;
    println!("{} after {} steps ({} survivors)", outcome.verdict, outcome.steps, outcome.survivors.len());
    write_json(&dir.join("collide.json"), &Header::new("collide", &rule, a.common.seed), OutcomeLine::new(key, &outcome))
}

#[derive(Args)]
pub struct MeanfieldArgs {
    #[command(flatten)]
    common: Common,
    /// Report fixed points with their stability (the default when nothing
    /// else is asked for).
    #[arg(long)]
    fixed_points: bool,
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
    /// Iterate the map from this density.
    #[arg(long, value_parser = parse_probability)]
    iterate: Option<f64>,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Write the map sampled at this many intervals to meanfield-map.tsv.
    #[arg(long)]
    map: Option<usize>,
    /// Measure real lattice densities from this starting density.
    #[arg(long, value_parser = parse_probability)]
    monte_carlo: Option<f64>,
    #[arg(long, default_value = "64x64", value_parser = parse_size)]
    size: (usize, usize),
    #[arg(long, default_value_t = 10)]
    trials: usize,
}

#[derive(Serialize)]
struct MeanfieldReport {
    terms: Vec<difflife::meanfield::Term>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_points: Option<Vec<difflife::meanfield::FixedPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iteration: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<Vec<difflife::meanfield::DensityPoint>>,
}

pub fn meanfield(a: MeanfieldArgs) -> Result<()> {
    let dir = out_dir(&a.common.out)?;
    let rule = a.common.rule;
    let model = build_polynomial(&rule);
    let want_roots = a.fixed_points || (a.iterate.is_none() && a.map.is_none() && a.monte_carlo.is_none());
    let fixed_points = if want_roots { Some(model.fixed_points(a.tolerance)?) } else { None };
    for fp in fixed_points.iter().flatten() {
        println!("p = {:.6}  f'(p) = {:+.6}  {}", fp.p, fp.derivative, fp.stability);
    }
    let iteration = a.iterate.map(|p0| model.iterate(p0, a.steps)).transpose()?;
    if let Some(last) = iteration.as_ref().and_then(|v| v.last()) {
        println!("after {} steps: {last:.6}", a.steps);
    }
    if let Some(samples) = a.map {
        let path = dir.join("meanfield-map.tsv");
        std::fs::write(&path, model.iteration_map(samples)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let monte_carlo = a
        .monte_carlo
        .map(|p0| monte_carlo_density(&rule, p0, a.size, a.steps, a.trials, a.common.seed))
        .transpose()?;
    let report = MeanfieldReport { terms: model.terms.clone(), fixed_points, iteration, monte_carlo };
    write_json(&dir.join("meanfield.json"), &Header::new("meanfield", &rule, a.common.seed), report)
}

#[derive(Args)]
pub struct GateArgs {
    #[command(flatten)]
    common: Common,
    /// AND, FANOUT, MEMORY or XNOR_XOR.
    name: GateName,
    /// One input row as bits, e.g. `10`. Without it the whole truth table
    /// is evaluated.
    #[arg(long, conflicts_with = "ops")]
    inputs: Option<String>,
    /// Memory operations, `w` for write and `r` for read, run in one
    /// continuous simulation, e.g. `wrrwr`.
    #[arg(long)]
    ops: Option<String>,
    /// Blueprint JSON file instead of the stored layout.
    #[arg(long, conflicts_with = "synthesize")]
    blueprint: Option<PathBuf>,
    /// Synthesize the layout afresh from collision scans.
    #[arg(long)]
    synthesize: bool,
}

#[derive(Serialize)]
struct RowLine {
    inputs: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outputs: Option<BTreeMap<String, bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    readout: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixtures_intact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct OpLine {
    op: &'static str,
    time: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Usage(format!("input bits must be 0 or 1, got {c:?}")).into()),
        })
        .collect()
}

fn blueprint(a: &GateArgs) -> Result<GateBlueprint> {
    if let Some(path) = &a.blueprint {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let bp = GateBlueprint::from_json(&serde_json::from_str(&text)?)?;
        if bp.name != a.name {
            bail!("{} holds a {} blueprint, not {}", path.display(), bp.name, a.name);
        }
        return Ok(bp);
    }
    if a.synthesize {
        return Ok(synthesize_gate(a.name, &Catalog::builtin(), &ScanBudget::default())?);
    }
    frozen(a.name).with_context(|| format!("no stored blueprint for {}", a.name))
}

pub fn gate(a: GateArgs) -> Result<()> {
    let dir = out_dir(&a.common.out)?;
    let bp = blueprint(&a)?;
    let rule = bp.rule;
    let header = Header::new("gate", &rule, a.common.seed);
    let stem = a.name.as_str().to_ascii_lowercase();
    let mut bp_text = serde_json::to_string_pretty(&bp.to_json()?)?;
    bp_text.push('\n');
    std::fs::write(dir.join(format!("gate-{stem}-blueprint.json")), bp_text)?;
    let mut lines = JsonLines::new(&dir.join(format!("gate-{stem}.jsonl")), &header)?;
    let mut failed = 0;

    if let Some(ops) = &a.ops {
        let mut cell = MemoryCell::new(&bp)?;
        for c in ops.chars() {
            let time = cell.time();
            let (op, result) = match c {
                'w' | 'W' => ("write", cell.write().map(|()| None)),
                'r' | 'R' => ("read", cell.read().map(Some)),
                _ => bail!(Usage(format!("memory ops are w and r, got {c:?}"))),
            };
            let line = match result {
                Ok(value) => OpLine { op, time, value, error: None },
                Err(e) => OpLine { op, time, value: None, error: Some(e.to_string()) },
            };
            println!("{op}@{time}: {}", line.error.clone().unwrap_or_else(|| match line.value {
                Some(v) => (v as u8).to_string(),
                None => "ok".into(),
            }));
            let stop = line.error.is_some();
            lines.record("op", line)?;
            if stop {
                failed += 1;
                break;
            }
        }
    } else {
        let rows: Vec<Vec<bool>> = match &a.inputs {
            Some(s) => {
                let row = bits(s)?;
                if row.len() != bp.inputs.len() {
                    bail!(Usage(format!("{} takes {} input bits, got {}", a.name, bp.inputs.len(), row.len())));
                }
                vec![row]
            }
            None => (0..1u32 << bp.inputs.len())
                .map(|m| (0..bp.inputs.len()).map(|i| m >> (bp.inputs.len() - 1 - i) & 1 == 1).collect())
                .collect(),
        };
        for inputs in rows {
            let tag: String = inputs.iter().map(|&b| if b { '1' } else { '0' }).collect();
            let line = match eval_gate(&bp, &inputs) {
                Ok(r) => {
                    let outs: Vec<String> = r.outputs.iter().map(|(n, v)| format!("{n}={}", *v as u8)).collect();
                    println!("{tag}: {}", outs.join(" "));
                    RowLine {
                        inputs,
                        outputs: Some(r.outputs.into_iter().collect()),
                        readout: Some(r.readout),
                        fixtures_intact: Some(r.fixtures_intact),
                        error: None,
                    }
                }
                Err(e) => {
                    failed += 1;
                    println!("{tag}: error: {e}");
                    RowLine { inputs, outputs: None, readout: None, fixtures_intact: None, error: Some(e.to_string()) }
                }
            };
            lines.record("row", line)?;
        }
    }
    lines.finish()?;
    if failed > 0 {
        bail!("{failed} evaluation(s) failed; see gate-{stem}.jsonl");
    }
    Ok(())
}

#[derive(Args)]
pub struct CensusArgs {
    #[command(flatten)]
    common: Common,
}

pub fn census(a: CensusArgs) -> Result<()> {
    let dir = out_dir(&a.common.out)?;
    let rule = a.common.rule;
    let census = catastrophe_census(&rule, &ClassifyOptions::default());
    let mut lines = JsonLines::new(&dir.join("census.jsonl"), &Header::new("census", &rule, a.common.seed))?;
    for f in &census.fates {
        lines.record("placement", f)?;
    }
    #[derive(Serialize)]
    struct Group {
        collinear: bool,
        verdict: difflife::analysis::Verdict,
        count: usize,
    }
    for (collinear, verdict, count) in census.breakdown() {
        println!("{} {verdict}: {count}", if collinear { "collinear" } else { "non-collinear" });
        lines.record("group", Group { collinear, verdict, count })?;
    }
    lines.finish()
}
