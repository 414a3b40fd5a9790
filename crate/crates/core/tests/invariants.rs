use std::collections::BTreeMap;
use std::sync::OnceLock;

use difflife::analysis::{
    classify_isolated, search, ClassifyOptions, Found, LocalizationKind, Move, SearchOptions,
};
use difflife::collider::{
    decompose, run_collision, scan_collisions, type_key, CollisionOutcome, CollisionSetup, CollisionVerdict, Geometry,
    Participant, ScanKey, ScanSpec,
};
use difflife::meanfield::{build_polynomial, monte_carlo_density, Stability};
use difflife::{
    enumerate_dc22, format_rule, parse_rule, place, step, step_reference, zoo, CanonicalMode, Catalog, Grid, Pattern,
    RuleSpec, RuleStyle, Symmetry,
};
use proptest::prelude::*;

fn any_rule() -> impl Strategy<Value = RuleSpec> {
    (0u8..=8, 0u8..=8, 0u8..=8, 0u8..=8).prop_map(|(a, b, c, d)| {
        RuleSpec::new(a.min(b), a.max(b), c.min(d), c.max(d)).expect("ordered intervals are valid")
    })
}

fn torus(w: usize, h: usize) -> impl Strategy<Value = Grid> {
    proptest::collection::vec(any::<bool>(), w * h).prop_map(move |bits| {
        let mut g = Grid::toroidal(w, h).unwrap();
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                g.set((i % w) as i64, (i / w) as i64, true).unwrap();
            }
        }
        g
    })
}

fn small_pattern() -> impl Strategy<Value = Pattern> {
    proptest::collection::btree_set((0i64..8, 0i64..8), 1..20).prop_map(Pattern::from_cells)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn empty_stays_empty(rule in any_rule()) {
        prop_assume!(rule.birth().lo() >= 1);
        let g = Grid::toroidal(16, 16).unwrap();
        prop_assert!(step(&g, &rule).unwrap().is_empty());
        prop_assert!(step(&Grid::unbounded(), &rule).unwrap().is_empty());
    }

    #[test]
    fn optimized_matches_reference(rule in any_rule(), g in torus(64, 64)) {
        prop_assert!(step(&g, &rule).unwrap().same_cells(&step_reference(&g, &rule).unwrap()));
    }

    #[test]
    fn step_commutes_with_symmetries(rule in any_rule(), g in torus(24, 24), s in 0usize..8) {
        let sym = Symmetry::ALL[s];
        prop_assert!(step(&g.transformed(sym), &rule).unwrap().same_cells(&step(&g, &rule).unwrap().transformed(sym)));
    }

    #[test]
    fn step_commutes_with_torus_shifts(rule in any_rule(), g in torus(20, 12), dx in -40i64..40, dy in -40i64..40) {
        prop_assert!(step(&g.shifted(dx, dy), &rule).unwrap().same_cells(&step(&g, &rule).unwrap().shifted(dx, dy)));
    }

    #[test]
    fn torus_agrees_with_plane_away_from_edges(p in small_pattern(), k in 1usize..6) {
        // B2/S7 spreads at most one cell per step, so a margin of 3 + k keeps
        // every live cell 3 cells from the edge for k steps.
        let rule = RuleSpec::diffusion();
        let margin = 3 + k as i64;
        let side = (8 + 2 * margin) as usize;
        let mut t = Grid::toroidal(side, side).unwrap();
        for &(x, y) in p.cells() {
            t.set(x + margin, y + margin, true).unwrap();
        }
        let mut u = Grid::from_cells(p.cells().iter().map(|&(x, y)| (x + margin, y + margin)), 256).unwrap();
        for _ in 0..k {
            t = step(&t, &rule).unwrap();
            u = step(&u, &rule).unwrap();
        }
        prop_assert_eq!(t.live_cells(), u.live_cells());
    }

    #[test]
    fn canonical_form_is_idempotent_and_orbit_constant(p in small_pattern(), s in 0usize..8) {
        for mode in [CanonicalMode::Translation, CanonicalMode::Rotation, CanonicalMode::FullSymmetry] {
            let c = p.canonicalize(mode);
            prop_assert_eq!(c.canonicalize(mode), c.clone());
        }
        let image = p.transformed(Symmetry::ALL[s]);
        prop_assert_eq!(image.canonicalize(CanonicalMode::FullSymmetry), p.canonicalize(CanonicalMode::FullSymmetry));
        if Symmetry::ALL[s].is_rotation() {
            prop_assert_eq!(image.canonicalize(CanonicalMode::Rotation), p.canonicalize(CanonicalMode::Rotation));
        }
    }

    #[test]
    fn disjoint_placements_commute(a in small_pattern(), b in small_pattern(), ox in 8i64..20, oy in -10i64..10) {
        let g = Grid::toroidal(48, 48).unwrap();
        let ab = place(&place(&g, &a, 2, 20, Symmetry::Identity, false).unwrap(), &b, 2 + ox, 20 + oy, Symmetry::Identity, false).unwrap();
        let ba = place(&place(&g, &b, 2 + ox, 20 + oy, Symmetry::Identity, false).unwrap(), &a, 2, 20, Symmetry::Identity, false).unwrap();
        prop_assert!(ab.same_cells(&ba));
    }

    #[test]
    fn mean_field_maps_unit_interval_into_itself(rule in any_rule()) {
        let m = build_polynomial(&rule);
        for i in 0..=100 {
            let v = m.eval(i as f64 / 100.0);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{rule}: f({}) = {v}", i as f64 / 100.0);
        }
    }

    #[test]
    fn fixed_points_have_small_residuals(rule in any_rule()) {
        let tol = 1e-10;
        for fp in build_polynomial(&rule).fixed_points(tol).unwrap() {
            let m = build_polynomial(&rule);
            // Bisection bounds the root, not the residual; the slope scales it.
            prop_assert!((m.eval(fp.p) - fp.p).abs() <= tol * (1.0 + fp.derivative.abs() + 1.0), "{rule}: {fp:?}");
        }
    }
}

#[test]
fn birth_coefficients_sum_to_binomials() {
    for rule in RuleSpec::all() {
        let m = build_polynomial(&rule);
        let c8 = |v: u32| (0..v).fold(1u64, |acc, i| acc * u64::from(8 - i) / u64::from(i + 1));
        let expected: u64 = (rule.birth().lo()..=rule.birth().hi()).map(|v| c8(u32::from(v))).sum::<u64>()
            + (rule.survive().lo()..=rule.survive().hi()).map(|v| c8(u32::from(v))).sum::<u64>();
        // Merging like terms only adds coefficients, and every term has total degree 9.
        let total: u64 = m.terms.iter().map(|t| t.coef).sum();
        assert_eq!(total, expected, "{rule}");
        assert!((m.eval(0.5) * 512.0 - (expected as f64)).abs() < 1e-6, "{rule}");
    }
}

#[test]
fn every_rule_round_trips_both_notations() {
    let all: Vec<RuleSpec> = RuleSpec::all().collect();
    // Intervals may start at 0; the 1..=8 subfamily is the classic 36 × 36.
    assert_eq!(all.len(), 45 * 45);
    assert_eq!(all.iter().filter(|r| r.birth().lo() >= 1 && r.survive().lo() >= 1).count(), 1296);
    for rule in all {
        for style in [RuleStyle::R, RuleStyle::BS] {
            assert_eq!(parse_rule(&format_rule(&rule, style)).unwrap(), rule, "{style:?}");
        }
    }
}

#[test]
fn dc22_is_distinct_and_born_on_two() {
    let rules = enumerate_dc22();
    let mut seen = rules.clone();
    seen.sort_by_key(|r| (r.survive().lo(), r.survive().hi()));
    seen.dedup();
    assert_eq!(seen.len(), rules.len());
    assert!(rules.iter().all(|r| r.birth().lo() == 2 && r.birth().hi() == 2));
}

#[test]
fn stability_predicts_iteration() {
    for rule in [RuleSpec::diffusion(), RuleSpec::life(), RuleSpec::new(3, 3, 2, 4).unwrap()] {
        let m = build_polynomial(&rule);
        let tol = 1e-9;
        for fp in m.fixed_points(tol).unwrap() {
            for start in [fp.p - 10.0 * tol, fp.p + 10.0 * tol] {
                if !(0.0..=1.0).contains(&start) {
                    continue;
                }
                let end = *m.iterate(start, 500).unwrap().last().unwrap();
                let settled = (end - fp.p).abs() < 10.0 * tol;
                match fp.stability {
                    Stability::Unstable => assert!(!settled, "{rule}: left {fp:?} from {start}, ended {end}"),
                    _ => assert!(settled, "{rule}: {fp:?} from {start} ended {end}"),
                }
            }
        }
    }
}

#[test]
fn monte_carlo_is_seeded() {
    let run = |seed| monte_carlo_density(&RuleSpec::diffusion(), 0.1, (48, 48), 10, 3, seed).unwrap();
    assert_eq!(run(9), run(9));
    assert_ne!(run(9), run(10));
}

fn found() -> &'static [Found] {
    static FOUND: OnceLock<Vec<Found>> = OnceLock::new();
    FOUND.get_or_init(|| search(&RuleSpec::diffusion(), &SearchOptions::new(6, 6, 4, 4)).unwrap())
}

#[test]
fn searched_gliders_fly_true() {
    let rule = RuleSpec::diffusion();
    for f in found().iter().filter(|f| f.record.kind == LocalizationKind::Glider) {
        let r = &f.record;
        let p0 = r.phase0();
        let mut grid = Grid::from_cells(p0.cells().iter().copied(), 256).unwrap();
        for k in 1..=3i64 {
            for _ in 0..r.period {
                grid = step(&grid, &rule).unwrap();
            }
            let want: Vec<_> = p0.translated(k * r.dx, k * r.dy).collect();
            assert_eq!(grid.live_cells(), want, "{r:?} after {k} periods");
        }
    }
}

#[test]
fn searched_records_reverify() {
    let rule = RuleSpec::diffusion();
    for f in found() {
        let again = classify_isolated(f.record.phase0(), &rule, &ClassifyOptions::default());
        let rec = again.localization().expect("still a localization");
        assert_eq!(rec.row(), f.record.row());
        assert_eq!(rec.kind, f.record.kind);
    }
}

#[test]
fn searched_records_are_distinct_and_obey_the_speed_law() {
    let mut seen = Vec::new();
    for f in found() {
        let r = &f.record;
        let mode = if r.kind == LocalizationKind::Glider { CanonicalMode::Rotation } else { CanonicalMode::FullSymmetry };
        let key = r.canonical_cycle(mode).0;
        assert!(!seen.contains(&key), "duplicate {r:?}");
        seen.push(key);
        if let Some(speed) = r.speed() {
            assert_eq!(speed.translation, r.translation());
            assert_eq!(speed.period, r.period);
        }
        if r.move_kind() == Move::Diagonal {
            assert_eq!(r.dx.abs(), r.dy.abs());
        }
    }
}

fn g4_scan() -> &'static BTreeMap<ScanKey, CollisionOutcome> {
    static SCAN: OnceLock<BTreeMap<ScanKey, CollisionOutcome>> = OnceLock::new();
    SCAN.get_or_init(|| {
        let cat = Catalog::builtin();
        let g4 = cat.require("g4").unwrap();
        scan_collisions(g4, g4, &RuleSpec::diffusion(), &ScanSpec::new(Geometry::HeadOn, -7..=7, 2..=9)).unwrap()
    })
}

fn g4_setup(key: ScanKey) -> CollisionSetup {
    let cat = Catalog::builtin();
    let g4 = cat.require("g4").unwrap();
    ScanSpec::new(Geometry::HeadOn, -7..=7, 2..=9).setup(g4, g4, &RuleSpec::diffusion(), key).unwrap()
}

#[test]
fn annihilation_exactly_when_nothing_is_left() {
    for (k, o) in g4_scan() {
        assert_eq!(o.verdict == CollisionVerdict::Annihilation, o.population == 0, "{k:?}: {o:?}");
    }
}

#[test]
fn scans_are_deterministic() {
    let (k, o) = g4_scan().iter().find(|(_, o)| o.verdict == CollisionVerdict::Multiplication).unwrap();
    assert_eq!(&run_collision(&g4_setup(*k)).unwrap(), o);
}

#[test]
fn soliton_outcomes_keep_their_survivors() {
    let rule = RuleSpec::diffusion();
    let solitons: Vec<_> = g4_scan().iter().filter(|(_, o)| o.verdict == CollisionVerdict::SolitonLike).collect();
    assert!(!solitons.is_empty());
    for (k, o) in solitons {
        let setup = g4_setup(*k);
        let period = o.survivors.iter().map(|s| s.period).fold(1, |a, b| a * b / gcd(a, b));
        let start = Grid::from_cells(setup.initial_cells().unwrap(), setup.cap).unwrap();
        let want = multiset(o.survivors.iter().map(|s| (type_key(&s.record), s.dx, s.dy)));
        for extra in [period, 2 * period] {
            let mut g = start.clone();
            for _ in 0..o.steps + extra {
                g = step(&g, &rule).unwrap();
            }
            let parts = decompose(&g, &rule, &setup.classify);
            let got = multiset(parts.iter().map(|c| {
                let r = c.report.localization().expect("survivor is a localization");
                (type_key(r), r.dx, r.dy)
            }));
            assert_eq!(got, want, "{k:?} at +{extra}");
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn multiset<T: Ord>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = items.collect();
    v.sort();
    v
}

#[test]
fn distant_participants_never_interact() {
    let rule = RuleSpec::diffusion();
    let g = zoo::builtin("g1").unwrap();
    let o = zoo::builtin("o1").unwrap();
    // Each light cone widens by one cell per step, so a gap above twice the
    // step budget keeps them apart for the whole run.
    let setup = CollisionSetup::new(
        rule,
        vec![
            Participant::new("g1", g, Symmetry::Identity, (0, 0), 0),
            Participant::new("o1", o, Symmetry::Identity, (0, -40), 0),
        ],
    )
    .with_max_steps(16);
    let out = run_collision(&setup).unwrap();
    assert_eq!(out.verdict, CollisionVerdict::SolitonLike, "{out:?}");
    assert!(out.shifts.iter().all(|s| s.delay == 0 && s.offset == (0, 0)));
}
