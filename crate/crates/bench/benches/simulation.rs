use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kiu_core::fixtures;
use kiu_core::lamperti::{first_exit, simulate_rssmp, ScalingIndex, EXIT_CAP};
use kiu_core::sim::{first_passage_up, sample_at_exponential_horizon, simulate_path};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn map_paths(c: &mut Criterion) {
    let mut group = c.benchmark_group("map path, horizon 10");
    for name in ["exp_jump", "brownian2", "mixed"] {
        let spec = fixtures::by_name(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        group.bench_function(name, |b| b.iter(|| simulate_path(&spec, (0.0, 0), 10.0, &mut rng).unwrap()));
    }
    group.finish();
}

fn passages(c: &mut Criterion) {
    let spec = fixtures::exp_jump();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("first passage over 10", |b| {
        b.iter(|| first_passage_up(&spec, (0.0, 0), black_box(10.0), EXIT_CAP, &mut rng).unwrap())
    });
    let spec = fixtures::brownian2();
    c.bench_function("supremum at exponential time", |b| {
        b.iter(|| sample_at_exponential_horizon(&spec, (0.0, 0), 0.5, &mut rng).unwrap())
    });
}

fn self_similar(c: &mut Criterion) {
    let alpha = ScalingIndex::new(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in ["exp_jump", "brownian2"] {
        let spec = fixtures::by_name(name).unwrap();
        c.bench_function(&format!("self-similar path to t = 5, {name}"), |b| {
            b.iter(|| simulate_rssmp(&spec, alpha, 1.0, 5.0, &mut rng).unwrap())
        });
    }
    let spec = fixtures::exp_jump();
    c.bench_function("exit from (-0.01, 0.01)", |b| {
        b.iter(|| first_exit(&spec, alpha, black_box(0.005), 0.01, EXIT_CAP, &mut rng).unwrap())
    });
}

criterion_group!(benches, map_paths, passages, self_similar);
criterion_main!(benches);
