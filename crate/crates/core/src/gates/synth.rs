//! Locating the reactions a gate needs and freezing them into a layout.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GateBlueprint, GateError, GateName, InputPort, OutputPort, Placed};
use crate::analysis::{classify_isolated, ClassifyOptions, LocalizationRecord};
use crate::collider::{
    in_cycle, prepared_shape, run_collision, same_type, scan_collisions, CollisionOutcome, CollisionSetup,
    CollisionVerdict, Geometry, Participant, ScanKey, ScanSpec, Survivor,
};
use crate::pattern::catalog::{Catalog, CatalogEntry};
use crate::rule::RuleSpec;
use crate::symmetry::Symmetry;

/// Steps each input glider is backed up along its track, so launches land
/// well clear of everything else. A multiple of every fixture period used.
const LEAD: usize = 16;
/// Steps between a reaction settling and its readout.
const MARGIN: usize = 8;

/// How far scans reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanBudget {
    /// Lateral offsets in `-lateral..=lateral`.
    pub lateral: i64,
    /// Gaps in `2..=max_gap`.
    pub max_gap: i64,
    /// Offsets of a second fixture in `-spread..=spread` on each axis.
    pub spread: i64,
}

impl Default for ScanBudget {
    fn default() -> Self {
        ScanBudget { lateral: 6, max_gap: 6, spread: 8 }
    }
}

impl ScanBudget {
    fn region(&self) -> String {
        format!("lateral -{0}..={0}, gap 2..={1}", self.lateral, self.max_gap)
    }
}

/// Builds the blueprint for `name` from collisions found by scanning
/// catalog entries g1..g4 and o1.
pub fn synthesize_gate(name: GateName, catalog: &Catalog, budget: &ScanBudget) -> Result<GateBlueprint, GateError> {
    let rule = RuleSpec::diffusion();
    match name {
        GateName::And => and_gate(catalog, &rule, budget),
        GateName::Fanout => fanout(catalog, &rule, budget),
        GateName::Memory => memory(catalog, &rule, budget),
        GateName::XnorXor => xnor_xor(catalog, &rule, budget),
    }
}

fn entry<'a>(catalog: &'a Catalog, name: &str) -> Result<&'a CatalogEntry, GateError> {
    catalog.get(name).ok_or_else(|| GateError::MissingEntry(name.to_string()))
}

fn record(shape: &crate::pattern::Pattern, rule: &RuleSpec) -> Result<LocalizationRecord, GateError> {
    let report = classify_isolated(shape, rule, &ClassifyOptions::default());
    in_cycle(&report).cloned().ok_or_else(|| GateError::Protocol(format!("{shape:?} is not a localization")))
}

fn placed(p: &Participant, rule: &RuleSpec) -> Result<Placed, GateError> {
    Ok(Placed::new(p.name.clone(), prepared_shape(&p.pattern, p.transform, p.phase, rule)?, p.offset))
}

/// An input whose glider reaches `at` on step `LEAD`.
fn input(name: &str, at: &Placed, rule: &RuleSpec, launch: usize) -> Result<InputPort, GateError> {
    let rec = record(&at.shape, rule)?;
    if !LEAD.is_multiple_of(rec.period) {
        return Err(GateError::Protocol(format!("glider period {} does not divide the lead", rec.period)));
    }
    let back = (LEAD / rec.period) as i64;
    let origin = (at.origin.0 - back * rec.dx, at.origin.1 - back * rec.dy);
    Ok(InputPort {
        name: name.into(),
        glider: Placed::new(at.name.clone(), at.shape.clone(), origin),
        velocity: (rec.dx, rec.dy),
        launch,
    })
}

/// Output port for a survivor `k` steps after it was seen.
fn output(name: &str, s: &Survivor, k: usize) -> OutputPort {
    OutputPort {
        name: name.into(),
        shape: s.record.phases[k % s.period].pattern.clone(),
        velocity: (s.dx, s.dy),
        region: s.box_at(k),
    }
}

/// Output port for a stationary placement read at step `t`.
fn stationary_output(name: &str, p: &Placed, rule: &RuleSpec, t: usize) -> Result<OutputPort, GateError> {
    let rec = record(&p.shape, rule)?;
    Ok(OutputPort {
        name: name.into(),
        shape: rec.phases[t % rec.period].pattern.clone(),
        velocity: (0, 0),
        region: rec.box_at(p.origin, t),
    })
}

/// The survivor as it stood `steps` earlier, i.e. at step 0 of its run.
fn rewound(s: &Survivor, steps: usize) -> Placed {
    let k = (s.period - steps % s.period) % s.period;
    let b = s.box_at(k);
    Placed::new("o1", s.record.phases[k].pattern.clone(), (b.min_x, b.min_y))
}

fn is_perpendicular_pair(out: &CollisionOutcome, along: (i64, i64), want: Option<&LocalizationRecord>) -> bool {
    if out.survivors.len() != 2 || !out.survivors.iter().all(Survivor::is_mobile) {
        return false;
    }
    if let Some(w) = want {
        if !out.survivors.iter().all(|s| same_type(&s.record, w)) {
            return false;
        }
    }
    let (a, b) = (&out.survivors[0], &out.survivors[1]);
    let dot = |s: &Survivor| s.dx * along.0 + s.dy * along.1;
    dot(a) == 0 && dot(b) == 0 && (a.dx, a.dy) == (-b.dx, -b.dy)
}

fn and_gate(catalog: &Catalog, rule: &RuleSpec, budget: &ScanBudget) -> Result<GateBlueprint, GateError> {
    let g1 = entry(catalog, "g1")?;
    let g4 = record(&entry(catalog, "g4")?.pattern, rule)?;
    let spec = ScanSpec::new(Geometry::HeadOn, -budget.lateral..=budget.lateral, 2..=budget.max_gap);
    let map = scan_collisions(g1, g1, rule, &spec)?;
    let (key, out) = map
        .iter()
        .find(|(_, o)| is_perpendicular_pair(o, (1, 0), Some(&g4)))
        .ok_or_else(|| GateError::ReactionNotFound {
            gate: GateName::And,
            reaction: "g1 + g1 -> two perpendicular g4".into(),
            region: budget.region(),
        })?;
    let setup = spec.setup(g1, g1, rule, *key)?;
    let x = placed(&setup.participants[0], rule)?;
    let y = placed(&setup.participants[1], rule)?;
    let mut outputs: Vec<OutputPort> = out
        .survivors
        .iter()
        .map(|s| output(if s.dy > 0 { "south" } else { "north" }, s, MARGIN))
        .collect();
    outputs.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(GateBlueprint {
        name: GateName::And,
        rule: *rule,
        fixtures: Vec::new(),
        inputs: vec![input("x", &x, rule, 0)?, input("y", &y, rule, 0)?],
        outputs,
        timing: LEAD + out.steps + MARGIN,
        window: 1,
        asynchronous: false,
        note: format!(
            "g1 east (x) meets g1 west (y) head-on, lateral {}, gap {}; each output g4 encodes x AND y",
            key.lateral, key.gap
        ),
    })
}

fn fanout(catalog: &Catalog, rule: &RuleSpec, budget: &ScanBudget) -> Result<GateBlueprint, GateError> {
    let o1 = entry(catalog, "o1")?;
    let stage = ScanSpec::new(Geometry::MobileVsStationary, 0..=0, 4..=4);
    let s = budget.spread;
    for name in ["g1", "g2", "g3", "g4"] {
        let glider = entry(catalog, name)?;
        let mut jobs = Vec::new();
        for lateral in -budget.lateral..=budget.lateral {
            for dx in -s..=s {
                for dy in -s..=s {
                    if dx.abs().max(dy.abs()) < 4 {
                        continue;
                    }
                    for pb in 0..2 {
                        for pc in 0..2 {
                            jobs.push((lateral, dx, dy, pb, pc));
                        }
                    }
                }
            }
        }
        let build = |&(lateral, dx, dy, pb, pc): &(i64, i64, i64, usize, usize)| -> Option<(CollisionSetup, CollisionOutcome)> {
            let key = ScanKey { lateral, gap: 4, phase_a: 0, phase_b: pb };
            let mut setup = stage.setup(glider, o1, rule, key).ok()?;
            let at = setup.participants[1].offset;
            setup.participants.push(Participant::from_entry(o1, Symmetry::Identity, (at.0 + dx, at.1 + dy), pc));
            let out = run_collision(&setup).ok()?;
            is_perpendicular_pair(&out, (1, 0), None).then_some((setup, out))
        };
        let Some((setup, out)) = jobs.par_iter().find_map_first(build) else { continue };
        let x = placed(&setup.participants[0], rule)?;
        let fixtures = vec![placed(&setup.participants[1], rule)?, placed(&setup.participants[2], rule)?];
        let mut outputs: Vec<OutputPort> = out
            .survivors
            .iter()
            .map(|s| output(if s.dy > 0 { "south" } else { "north" }, s, MARGIN))
            .collect();
        outputs.sort_by(|a, b| a.name.cmp(&b.name));
        return Ok(GateBlueprint {
            name: GateName::Fanout,
            rule: *rule,
            fixtures,
            inputs: vec![input("x", &x, rule, 0)?],
            outputs,
            timing: LEAD + out.steps + MARGIN,
            window: 2,
            asynchronous: false,
            note: format!(
                "{name} east splits on a pair of o1 into two gliders leaving north and south; \
                 the pair stands in for the o5 fixture, whose shape is not available"
            ),
        });
    }
    Err(GateError::ReactionNotFound {
        gate: GateName::Fanout,
        reaction: "glider + o1 pair -> two opposite perpendicular gliders".into(),
        region: format!("{}, second o1 within {} cells", budget.region(), budget.spread),
    })
}

/// The two halves of the memory cycle: a read glider turns the bit into a
/// displaced token, and a write glider turns the token back into the bit.
struct MemoryReactions {
    bit: Placed,
    token: Placed,
    read: Placed,
    read_steps: usize,
    write: Placed,
    write_steps: usize,
    note: String,
}

fn memory_reactions(catalog: &Catalog, rule: &RuleSpec, budget: &ScanBudget, gate: GateName) -> Result<MemoryReactions, GateError> {
    let g1 = entry(catalog, "g1")?;
    let o1 = entry(catalog, "o1")?;
    let spec = ScanSpec::new(Geometry::MobileVsStationary, -budget.lateral..=budget.lateral, 2..=budget.max_gap);
    let map = scan_collisions(g1, o1, rule, &spec)?;
    let (key, out) = map
        .iter()
        .find(|(_, o)| o.verdict == CollisionVerdict::Eaten && o.survivors.len() == 1)
        .ok_or_else(|| GateError::ReactionNotFound {
            gate,
            reaction: "g1 + o1 -> displaced o1 (read)".into(),
            region: budget.region(),
        })?;
    let setup = spec.setup(g1, o1, rule, *key)?;
    let read = placed(&setup.participants[0], rule)?;
    let bit = placed(&setup.participants[1], rule)?;
    let token = rewound(&out.survivors[0], out.steps);

    // The write glider travels against the read glider.
    let g1_rec = record(&g1.pattern, rule)?;
    let read_rec = record(&read.shape, rule)?;
    let west = Symmetry::rotation_between((g1_rec.dx, g1_rec.dy), (-read_rec.dx, -read_rec.dy))
        .ok_or_else(|| GateError::Protocol("g1 cannot be turned against the read glider".into()))?;
    let tb = token.bbox();
    let mut jobs = Vec::new();
    for lateral in -budget.lateral..=budget.lateral {
        for gap in 2..=budget.max_gap {
            jobs.push((lateral, gap));
        }
    }
    let glider_shape = g1.pattern.transformed(west);
    let try_write = |&(lateral, gap): &(i64, i64)| -> Option<(Placed, usize)> {
        // Start on the far side of the token, heading back towards it.
        let x = if read_rec.dx > 0 { tb.max_x + 1 + gap } else { tb.min_x - gap - glider_shape.width() };
        let setup = CollisionSetup::new(
            *rule,
            vec![
                Participant::new("o1", token.shape.clone(), Symmetry::Identity, token.origin, 0),
                Participant::from_entry(g1, west, (x, tb.min_y + lateral), 0),
            ],
        );
        let out = run_collision(&setup).ok()?;
        if out.verdict != CollisionVerdict::Eaten || out.survivors.len() != 1 {
            return None;
        }
        let back = rewound(&out.survivors[0], out.steps);
        if back.shape != bit.shape || back.origin != bit.origin {
            return None;
        }
        Some((placed(&setup.participants[1], rule).ok()?, out.steps))
    };
    let (write, write_steps) = jobs.par_iter().find_map_first(try_write).ok_or_else(|| GateError::ReactionNotFound {
        gate,
        reaction: "g1 + token o1 -> o1 restored at the bit site (write)".into(),
        region: budget.region(),
    })?;
    let shift = (token.origin.0 - bit.origin.0, token.origin.1 - bit.origin.1);
    Ok(MemoryReactions {
        note: format!(
            "read: g1 at lateral {}, gap {} erases the bit and leaves a token o1 displaced by {:?}; \
             write: g1 travelling the other way turns the token back into the bit",
            key.lateral, key.gap, shift
        ),
        bit,
        token,
        read,
        read_steps: out.steps,
        write,
        write_steps,
    })
}

fn memory(catalog: &Catalog, rule: &RuleSpec, budget: &ScanBudget) -> Result<GateBlueprint, GateError> {
    let m = memory_reactions(catalog, rule, budget, GateName::Memory)?;
    let timing = LEAD + m.read_steps.max(m.write_steps) + MARGIN;
    let read = input("read", &m.read, rule, 0)?;
    let read_rec = record(&read.glider.shape, rule)?;
    let probe = OutputPort {
        name: "probe".into(),
        shape: read_rec.phases[timing % read_rec.period].pattern.clone(),
        velocity: read.velocity,
        region: read_rec.box_at(read.glider.origin, timing),
    };
    Ok(GateBlueprint {
        name: GateName::Memory,
        rule: *rule,
        fixtures: vec![Placed::new("token", m.token.shape.clone(), m.token.origin)],
        inputs: vec![read, input("write", &m.write, rule, 0)?],
        outputs: vec![
            stationary_output("bit", &m.bit, rule, timing)?,
            stationary_output("token", &m.token, rule, timing)?,
            probe,
        ],
        timing,
        window: 2,
        asynchronous: true,
        note: format!("{}; starts with the bit clear and the token in place", m.note),
    })
}

fn xnor_xor(catalog: &Catalog, rule: &RuleSpec, budget: &ScanBudget) -> Result<GateBlueprint, GateError> {
    let m = memory_reactions(catalog, rule, budget, GateName::XnorXor)?;
    let timing = LEAD + m.read_steps.max(m.write_steps) + MARGIN;
    let stagger = timing.next_multiple_of(2);
    Ok(GateBlueprint {
        name: GateName::XnorXor,
        rule: *rule,
        fixtures: vec![Placed::new("bit", m.bit.shape.clone(), m.bit.origin)],
        inputs: vec![input("x", &m.read, rule, 0)?, input("y", &m.write, rule, stagger)?],
        outputs: vec![
            stationary_output("xnor", &m.bit, rule, timing)?,
            stationary_output("xor", &m.token, rule, timing)?,
        ],
        timing,
        window: 2,
        asynchronous: true,
        note: format!("{}; x is the read glider, y the write glider", m.note),
    })
}
