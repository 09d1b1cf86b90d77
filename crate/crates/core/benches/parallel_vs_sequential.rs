use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use keyrate::ad::{simulate_ad_with, SimulationOptions};
use keyrate::families::{binaryze_werner, werner_distribution, WernerParams};
use keyrate::intrinsic::{minimize_intrinsic_with, IntrinsicOptions};
use keyrate::par::Parallelism;

const MODES: [(&str, Parallelism); 2] = [
    ("sequential", Parallelism::Sequential),
    ("parallel", Parallelism::Parallel),
];

fn simulation(c: &mut Criterion) {
    let w = werner_distribution(WernerParams::qutrit(0.6).unwrap()).unwrap();
    let t3 = binaryze_werner(&w, 2).unwrap();
    let mut group = c.benchmark_group("simulate_n4");
    group.sample_size(10);
    for (name, mode) in MODES {
        let mut opts = SimulationOptions::new(4, 20_000, 1);
        opts.parallelism = mode;
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| simulate_ad_with(black_box(&t3), opts).unwrap())
        });
    }
    group.finish();
}

fn optimizer(c: &mut Criterion) {
    let w = werner_distribution(WernerParams::qutrit(0.75).unwrap()).unwrap();
    let mut group = c.benchmark_group("intrinsic_4_starts");
    group.sample_size(10);
    for (name, mode) in MODES {
        let opts = IntrinsicOptions {
            starts: 4,
            seed: 5,
            max_evaluations: 50_000,
            parallelism: mode,
            ..IntrinsicOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| minimize_intrinsic_with(black_box(&w), opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, simulation, optimizer);
criterion_main!(benches);
