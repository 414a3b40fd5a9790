//! Collision-based logic: gliders as signals, oscillators as fixtures.
//!
//! A blueprint is a frozen layout: fixtures placed at step 0, input gliders
//! injected at fixed positions on launch, and output ports read by
//! decomposing the configuration at the readout step.

mod memory;
mod synth;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{classify_isolated, components, ClassifyOptions, FateReport, LocalizationRecord, SEPARATION_GAP};
use crate::collider::{in_cycle, same_type, CollisionError};
use crate::lattice::{BBox, Grid, GridError, DEFAULT_UNBOUNDED_CAP};
use crate::pattern::Pattern;
use crate::rule::RuleSpec;

pub use memory::MemoryCell;
pub use synth::{synthesize_gate, ScanBudget};

#[derive(Debug, Error)]
pub enum GateError {
    #[error("{gate}: no {reaction} reaction found in {region}")]
    ReactionNotFound { gate: GateName, reaction: String, region: String },
    #[error("catalog has no entry {0:?}")]
    MissingEntry(String),
    #[error("{gate} takes {expected} inputs, got {got}")]
    Inputs { gate: GateName, expected: usize, got: usize },
    #[error("input {port} launched at step {step}; launches must be {residue} mod {window}")]
    Window { port: String, step: usize, window: usize, residue: usize },
    #[error("inputs {a} and {b} launched {apart} steps apart; at least {min} are needed")]
    Simultaneous { a: String, b: String, apart: usize, min: usize },
    #[error("input {port} would land on live cells at step {step}")]
    LaunchBlocked { port: String, step: usize },
    #[error("configuration has not settled at step {step}: {detail}")]
    Unsettled { step: usize, detail: String },
    #[error("fixture {0} corrupted at readout")]
    FixtureCorrupted(String),
    #[error("bit is already set")]
    BitAlreadySet,
    #[error("{0}")]
    Protocol(String),
    #[error("blueprint {0} is not a memory")]
    NotMemory(GateName),
    #[error(transparent)]
    Collision(#[from] CollisionError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("blueprint JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateName {
    And,
    Fanout,
    Memory,
    XnorXor,
}

impl GateName {
    pub const ALL: [GateName; 4] = [GateName::And, GateName::Fanout, GateName::Memory, GateName::XnorXor];

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::And => "AND",
            GateName::Fanout => "FANOUT",
            GateName::Memory => "MEMORY",
            GateName::XnorXor => "XNOR_XOR",
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        GateName::ALL
            .into_iter()
            .find(|g| g.as_str() == norm)
            .ok_or_else(|| format!("unknown gate {s:?}; expected AND, FANOUT, MEMORY or XNOR_XOR"))
    }
}

/// A shape at a world position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placed {
    pub name: String,
    pub shape: Pattern,
    /// Top-left corner of the shape.
    pub origin: (i64, i64),
}

impl Placed {
    pub fn new(name: impl Into<String>, shape: Pattern, origin: (i64, i64)) -> Placed {
        Placed { name: name.into(), shape, origin }
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.shape.translated(self.origin.0, self.origin.1)
    }

    pub fn bbox(&self) -> BBox {
        self.shape.bbox_at(self.origin.0, self.origin.1).expect("placed shapes are non-empty")
    }
}

/// Where a signal glider enters. The glider is injected as `glider` on the
/// step it is launched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputPort {
    pub name: String,
    pub glider: Placed,
    pub velocity: (i64, i64),
    /// Default launch step. Other launches must agree with it modulo the
    /// blueprint window.
    pub launch: usize,
}

/// A localization expected at `region` on the readout step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputPort {
    pub name: String,
    /// One phase of the expected localization; identifies its type.
    pub shape: Pattern,
    pub velocity: (i64, i64),
    pub region: BBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateBlueprint {
    pub name: GateName,
    pub rule: RuleSpec,
    pub fixtures: Vec<Placed>,
    pub inputs: Vec<InputPort>,
    pub outputs: Vec<OutputPort>,
    /// Steps from a launch to its readout.
    pub timing: usize,
    /// Launch steps are fixed modulo this (the fixtures' common period).
    pub window: usize,
    /// Inputs may arrive at any time but not together; launches closer than
    /// `timing` steps are rejected.
    pub asynchronous: bool,
    pub note: String,
}

impl GateBlueprint {
    pub fn to_json(&self) -> Result<serde_json::Value, GateError> {
        Ok(serde_json::to_value(self)?)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<GateBlueprint, GateError> {
        Ok(serde_json::from_value(value.clone())?)
    }

    pub fn input(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|p| p.name == name)
    }

    pub fn output(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|p| p.name == name)
    }

    /// Default launch schedule for the given truth assignment.
    pub fn schedule(&self, inputs: &[bool]) -> Result<Vec<Option<usize>>, GateError> {
        if inputs.len() != self.inputs.len() {
            return Err(GateError::Inputs { gate: self.name, expected: self.inputs.len(), got: inputs.len() });
        }
        Ok(self.inputs.iter().zip(inputs).map(|(p, &on)| on.then_some(p.launch)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateResult {
    /// Presence of each output port, in blueprint order.
    pub outputs: Vec<(String, bool)>,
    pub readout: usize,
    /// Every fixture still present at readout.
    pub fixtures_intact: bool,
    #[serde(skip)]
    pub grid: Grid,
    /// Population per step, launch to readout.
    pub trace: Vec<u64>,
}

impl GateResult {
    pub fn get(&self, name: &str) -> Option<bool> {
        self.outputs.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

/// Launches a glider on every true input at its default step and reads the
/// outputs.
pub fn eval_gate(bp: &GateBlueprint, inputs: &[bool]) -> Result<GateResult, GateError> {
    let schedule = bp.schedule(inputs)?;
    eval_schedule(bp, &schedule)
}

/// Like [`eval_gate`] with explicit launch steps (`None` leaves an input
/// false).
pub fn eval_schedule(bp: &GateBlueprint, launches: &[Option<usize>]) -> Result<GateResult, GateError> {
    if launches.len() != bp.inputs.len() {
        return Err(GateError::Inputs { gate: bp.name, expected: bp.inputs.len(), got: launches.len() });
    }
    check_launches(bp, launches)?;
    let mut sim = Sim::new(bp)?;
    let readout = launches.iter().flatten().max().map_or(bp.timing, |&t| t + bp.timing);
    let mut trace = Vec::with_capacity(readout + 1);
    for t in 0..=readout {
        for (i, _) in launches.iter().enumerate().filter(|(_, l)| **l == Some(t)) {
            sim.inject(&bp.inputs[i])?;
        }
        trace.push(sim.grid.population());
        if t < readout {
            sim.advance()?;
        }
    }
    let seen = sim.readout()?;
    let outputs = bp.outputs.iter().map(|p| (p.name.clone(), sim.present(&seen, &p.shape, p.velocity, p.region))).collect();
    let fixtures_intact = sim.fixtures_intact(&seen);
    if launches.iter().all(Option::is_none) && !fixtures_intact {
        let missing = bp
            .fixtures
            .iter()
            .find(|f| {
                let region = sim.fixture_box(f);
                !sim.present(&seen, &f.shape, (0, 0), region)
            })
            .map_or_else(String::new, |f| f.name.clone());
        return Err(GateError::FixtureCorrupted(missing));
    }
    Ok(GateResult { outputs, readout, fixtures_intact, grid: sim.grid, trace })
}

fn check_launches(bp: &GateBlueprint, launches: &[Option<usize>]) -> Result<(), GateError> {
    let window = bp.window.max(1);
    for (port, launch) in bp.inputs.iter().zip(launches) {
        if let Some(t) = *launch {
            if t % window != port.launch % window {
                return Err(GateError::Window { port: port.name.clone(), step: t, window, residue: port.launch % window });
            }
        }
    }
    if bp.asynchronous {
        for i in 0..launches.len() {
            for j in i + 1..launches.len() {
                if let (Some(a), Some(b)) = (launches[i], launches[j]) {
                    if a.abs_diff(b) < bp.timing {
                        return Err(GateError::Simultaneous {
                            a: bp.inputs[i].name.clone(),
                            b: bp.inputs[j].name.clone(),
                            apart: a.abs_diff(b),
                            min: bp.timing,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn readout_options() -> ClassifyOptions {
    ClassifyOptions { max_period: 16, max_steps: 256, box_cap: 64, ..ClassifyOptions::default() }
}

/// A localization seen at readout.
struct Seen {
    record: LocalizationRecord,
    bbox: BBox,
}

/// One running evaluation: the grid, the step counter and a cache of
/// component fates.
struct Sim<'a> {
    bp: &'a GateBlueprint,
    grid: Grid,
    time: usize,
    cache: HashMap<Pattern, FateReport>,
    opts: ClassifyOptions,
}

impl<'a> Sim<'a> {
    fn new(bp: &'a GateBlueprint) -> Result<Sim<'a>, GateError> {
        let cells = bp.fixtures.iter().flat_map(|f| f.cells());
        Ok(Sim {
            bp,
            grid: Grid::from_cells(cells, DEFAULT_UNBOUNDED_CAP)?,
            time: 0,
            cache: HashMap::new(),
            opts: readout_options(),
        })
    }

    fn advance(&mut self) -> Result<(), GateError> {
        self.grid.advance(&self.bp.rule)?;
        self.time += 1;
        Ok(())
    }

    fn advance_to(&mut self, t: usize) -> Result<(), GateError> {
        while self.time < t {
            self.advance()?;
        }
        Ok(())
    }

    /// Places the port's glider; the landing area must be clear.
    fn inject(&mut self, port: &InputPort) -> Result<(), GateError> {
        let b = port.glider.bbox();
        for y in b.min_y - SEPARATION_GAP..=b.max_y + SEPARATION_GAP {
            for x in b.min_x - SEPARATION_GAP..=b.max_x + SEPARATION_GAP {
                if self.grid.get(x, y) {
                    return Err(GateError::LaunchBlocked { port: port.name.clone(), step: self.time });
                }
            }
        }
        for (x, y) in port.glider.cells() {
            self.grid.set(x, y, true)?;
        }
        Ok(())
    }

    /// Every component as a localization in its cycle.
    fn readout(&mut self) -> Result<Vec<Seen>, GateError> {
        let mut seen = Vec::new();
        for comp in components(&self.grid.live_cells(), SEPARATION_GAP) {
            let (pattern, origin) = Pattern::normalized(comp);
            let bbox = pattern.bbox_at(origin.0, origin.1).expect("components are non-empty");
            let report = self
                .cache
                .entry(pattern)
                .or_insert_with_key(|p| classify_isolated(p, &self.bp.rule, &self.opts));
            let Some(record) = in_cycle(report) else {
                return Err(GateError::Unsettled {
                    step: self.time,
                    detail: format!("component at {origin:?} classifies as {:?}", report.verdict),
                });
            };
            seen.push(Seen { record: record.clone(), bbox });
        }
        Ok(seen)
    }

    fn record_of(&mut self, shape: &Pattern) -> Option<LocalizationRecord> {
        let report = self
            .cache
            .entry(shape.clone())
            .or_insert_with_key(|p| classify_isolated(p, &self.bp.rule, &self.opts));
        report.localization().cloned()
    }

    fn present(&mut self, seen: &[Seen], shape: &Pattern, velocity: (i64, i64), region: BBox) -> bool {
        let Some(want) = self.record_of(shape) else { return false };
        seen.iter()
            .any(|s| s.bbox == region && (s.record.dx, s.record.dy) == velocity && same_type(&s.record, &want))
    }

    /// Box of a fixture at the current step.
    fn fixture_box(&mut self, f: &Placed) -> BBox {
        match self.record_of(&f.shape) {
            Some(r) => r.box_at(f.origin, self.time),
            None => f.bbox(),
        }
    }

    fn fixtures_intact(&mut self, seen: &[Seen]) -> bool {
        let fixtures = self.bp.fixtures.clone();
        fixtures.iter().all(|f| {
            let region = self.fixture_box(f);
            self.present(seen, &f.shape, (0, 0), region)
        })
    }
}

/// Blueprints produced by [`synthesize_gate`] on the builtin catalog with the
/// default budget, stored so gate tests replay exact layouts.
const FROZEN: &str = include_str!("blueprints.json");

/// The stored blueprint for `name`.
pub fn frozen(name: GateName) -> Option<GateBlueprint> {
    let all: Vec<GateBlueprint> = serde_json::from_str(FROZEN).ok()?;
    all.into_iter().find(|b| b.name == name)
}

/// Every stored blueprint.
pub fn frozen_all() -> Vec<GateBlueprint> {
    serde_json::from_str(FROZEN).unwrap_or_default()
}
