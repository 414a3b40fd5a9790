use difflife::collider::{scan_collisions, CollisionVerdict, Geometry, ScanSpec};
use difflife::gates::{
    eval_gate, eval_schedule, frozen, synthesize_gate, GateBlueprint, GateError, GateName, MemoryCell, ScanBudget,
};
use difflife::{Catalog, RuleSpec};

fn bp(name: GateName) -> GateBlueprint {
    frozen(name).expect("blueprint is stored")
}

#[test]
fn stored_blueprints_match_fresh_synthesis() {
    let cat = Catalog::builtin();
    for name in GateName::ALL {
        let fresh = synthesize_gate(name, &cat, &ScanBudget::default()).unwrap();
        assert_eq!(fresh, bp(name), "{name} drifted from its stored layout");
    }
}

#[test]
fn builtin_catalog_carries_blueprints() {
    let cat = Catalog::builtin();
    for name in GateName::ALL {
        let value = cat.blueprint(name.as_str()).expect("present");
        assert_eq!(GateBlueprint::from_json(value).unwrap(), bp(name));
    }
}

#[test]
fn and_truth_table() {
    let and = bp(GateName::And);
    for (x, y) in [(false, false), (true, false), (false, true), (true, true)] {
        let r = eval_gate(&and, &[x, y]).unwrap();
        assert_eq!(r.get("north"), Some(x && y), "x={x} y={y}");
        assert_eq!(r.get("south"), Some(x && y), "x={x} y={y}");
    }
}

#[test]
fn fanout_copies_its_input() {
    let fan = bp(GateName::Fanout);
    for x in [false, true] {
        let r = eval_gate(&fan, &[x]).unwrap();
        assert_eq!(r.get("north"), Some(x));
        assert_eq!(r.get("south"), Some(x));
    }
}

#[test]
fn idle_blueprints_keep_their_fixtures() {
    for name in GateName::ALL {
        let b = bp(name);
        let r = eval_gate(&b, &vec![false; b.inputs.len()]).unwrap();
        assert!(r.fixtures_intact, "{name}");
    }
}

#[test]
fn evaluation_is_deterministic() {
    let and = bp(GateName::And);
    let a = eval_gate(&and, &[true, true]).unwrap();
    let b = eval_gate(&and, &[true, true]).unwrap();
    assert_eq!(a.trace, b.trace);
    assert!(a.grid.same_cells(&b.grid));
}

#[test]
fn asynchronous_gate_rejects_simultaneous_launches() {
    let gate = bp(GateName::XnorXor);
    assert!(matches!(eval_schedule(&gate, &[Some(0), Some(0)]), Err(GateError::Simultaneous { .. })));
}

#[test]
fn launches_respect_the_window() {
    let fan = bp(GateName::Fanout);
    assert!(matches!(eval_schedule(&fan, &[Some(1)]), Err(GateError::Window { .. })));
    assert!(eval_schedule(&fan, &[Some(2)]).is_ok());
}

#[test]
fn wrong_input_count_is_rejected() {
    assert!(matches!(eval_gate(&bp(GateName::And), &[true]), Err(GateError::Inputs { .. })));
}

#[test]
fn xnor_rows_that_hold() {
    let gate = bp(GateName::XnorXor);
    let row = |x, y| {
        let r = eval_gate(&gate, &[x, y]).unwrap();
        (r.get("xnor").unwrap(), r.get("xor").unwrap())
    };
    assert_eq!(row(false, false), (true, false));
    assert_eq!(row(true, false), (false, true));
    assert_eq!(row(true, true), (true, false));
}

#[test]
fn memory_write_then_read() {
    let b = bp(GateName::Memory);
    let mut m = MemoryCell::new(&b).unwrap();
    assert!(!m.bit().unwrap());
    m.write().unwrap();
    assert!(m.bit().unwrap());
    assert!(matches!(m.write(), Err(GateError::BitAlreadySet)));
    assert!(m.read().unwrap());
    assert!(!m.bit().unwrap());
}

#[test]
fn stored_bit_persists_while_idle() {
    let b = bp(GateName::Memory);
    let mut m = MemoryCell::new(&b).unwrap();
    m.write().unwrap();
    for _ in 0..4 {
        m.wait(2).unwrap();
        assert!(m.bit().unwrap());
    }
}

#[test]
fn memory_rejects_other_blueprints() {
    let b = bp(GateName::And);
    assert!(matches!(MemoryCell::new(&b), Err(GateError::NotMemory(GateName::And))));
}

#[test]
fn token_sits_where_the_scan_puts_the_eaten_o1() {
    let cat = Catalog::builtin();
    let (g1, o1) = (cat.get("g1").unwrap(), cat.get("o1").unwrap());
    let spec = ScanSpec::new(Geometry::MobileVsStationary, -6..=6, 2..=6);
    let map = scan_collisions(g1, o1, &RuleSpec::diffusion(), &spec).unwrap();
    let (_, eaten) = map.iter().find(|(_, o)| o.verdict == CollisionVerdict::Eaten).unwrap();
    let shift = eaten.shifts[0].offset;
    let b = bp(GateName::Memory);
    let region = |name: &str| b.outputs[b.output(name).unwrap()].region;
    let (bit, token) = (region("bit"), region("token"));
    assert_eq!((token.min_x - bit.min_x, token.min_y - bit.min_y), shift);
}
