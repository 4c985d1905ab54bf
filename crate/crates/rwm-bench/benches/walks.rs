//! Wall-clock comparisons of the three update strategies and the cost of a
//! single iteration, on derived planted-partition stacks.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rwm_core::accel::{run_with_strategy, UpdateStrategy};
use rwm_core::engine::{self, RwmConfig};
use rwm_core::multinet::{MultiNetwork, QuerySpec};
use rwm_core::synthbench::{derive_layers, generate_base, LayerDerivation, PlantedPartition};

fn stack(n: usize) -> MultiNetwork {
    let pp = PlantedPartition {
        nodes: n,
        avg_degree: 12.0,
        communities: (n / 250).max(1),
        mixing: 0.2,
        seed: 42,
    };
    let (base, _) = generate_base(&pp).unwrap();
    derive_layers(&base, &LayerDerivation { layers: 3, keep_ratio: 0.5, seed: 42 }).unwrap()
}

fn bench_strategies(c: &mut Criterion) {
    let cfg = RwmConfig::default();
    let mut group = c.benchmark_group("full_run");
    group.sample_size(10);
    for &n in &[2_000usize, 8_000] {
        let mn = stack(n);
        let q = QuerySpec::single(0, 17);
        for strategy in [UpdateStrategy::Exact, UpdateStrategy::EarlyStop, UpdateStrategy::Partial]
        {
            group.bench_with_input(BenchmarkId::new(strategy.name(), n), &n, |b, _| {
                b.iter(|| run_with_strategy(&mn, &q, &cfg, strategy).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_single_step(c: &mut Criterion) {
    let cfg = RwmConfig::default();
    let mn = stack(8_000);
    let q = QuerySpec::single(0, 17);
    let mut warmed = engine::init_state(&mn, &q, &cfg).unwrap();
    for _ in 0..5 {
        engine::step(&mut warmed, &mn, &cfg);
    }
    c.bench_function("one_step_8k", |b| {
        b.iter(|| {
            let mut state = warmed.clone();
            engine::step(&mut state, &mn, &cfg);
            state.iteration()
        })
    });
}

criterion_group!(benches, bench_strategies, bench_single_step);
criterion_main!(benches);
