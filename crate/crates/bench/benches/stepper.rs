use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use difflife::analysis::{classify_isolated, soup_census, ClassifyOptions, SoupOptions};
use difflife::collider::{scan_collisions, Geometry, ScanSpec};
use difflife::{step, step_reference, zoo, Catalog, Grid, RuleSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn soup(side: usize, density: f64) -> Grid {
    Grid::bernoulli_torus(side, side, density, &mut ChaCha8Rng::seed_from_u64(7)).unwrap()
}

fn steppers(c: &mut Criterion) {
    let rule = RuleSpec::diffusion();
    let mut group = c.benchmark_group("step");
    for side in [64usize, 256, 1024] {
        let grid = soup(side, 0.2);
        group.throughput(Throughput::Elements((side * side) as u64));
        group.bench_with_input(BenchmarkId::new("bit-parallel", side), &grid, |b, g| {
            b.iter(|| step(black_box(g), &rule).unwrap())
        });
        if side <= 256 {
            group.bench_with_input(BenchmarkId::new("reference", side), &grid, |b, g| {
                b.iter(|| step_reference(black_box(g), &rule).unwrap())
            });
        }
    }
    group.finish();
}

fn analysis(c: &mut Criterion) {
    let rule = RuleSpec::diffusion();
    let g1 = zoo::builtin("g1").unwrap();
    c.bench_function("classify g1", |b| b.iter(|| classify_isolated(black_box(&g1), &rule, &ClassifyOptions::default())));

    let cat = Catalog::builtin();
    let g4 = cat.require("g4").unwrap();
    let spec = ScanSpec::new(Geometry::HeadOn, -4..=4, 2..=20);
    let mut group = c.benchmark_group("collider");
    group.sample_size(10);
    group.bench_function("g4×g4 head-on scan", |b| b.iter(|| scan_collisions(g4, g4, &rule, &spec).unwrap()));
    group.finish();

    let mut group = c.benchmark_group("soup");
    group.sample_size(10);
    let opts = SoupOptions::new((200, 200), 0.008, 20, 10, 1);
    group.bench_function("10 trials 200x200", |b| b.iter(|| soup_census(&rule, black_box(&opts)).unwrap()));
    group.finish();
}

criterion_group!(benches, steppers, analysis);
criterion_main!(benches);
