use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use led_bench::simulation_fixture;
use led_core::combinatorics::HypergeomParams;
use led_core::packing::greedy_packing;
use led_core::sim::run_monte_carlo;

fn combinatorics(c: &mut Criterion) {
    let p = HypergeomParams::new(1_000_000, 1_000, 1_000).unwrap();
    c.bench_function("hypergeom_tail_log_1e6", |b| {
        b.iter(|| black_box(p.tail_log(black_box(3))))
    });
    c.bench_function("ratio_profile_1e3", |b| {
        let q = HypergeomParams::new(1_000, 100, 200).unwrap();
        b.iter(|| black_box(q.ratio_profile().mode))
    });
}

fn capacity(c: &mut Criterion) {
    let matrix = vec![vec![0.90, 0.07, 0.03], vec![0.05, 0.85, 0.10]];
    c.bench_function("blahut_arimoto_2x3", |b| {
        b.iter_batched(
            || led_core::channel::ChannelModel::from_matrix(matrix.clone()).unwrap(),
            |ch| black_box(ch.capacity(1e-9).unwrap().nats),
            BatchSize::SmallInput,
        )
    });
}

fn packing(c: &mut Criterion) {
    c.bench_function("greedy_packing_12_4_2", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            black_box(greedy_packing(12, 4, 2, seed).unwrap().len())
        })
    });
}

fn monte_carlo(c: &mut Criterion) {
    let (code, ch) = simulation_fixture();
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("n24_1000_trials", |b| {
        b.iter(|| black_box(run_monte_carlo(&code, &ch, 1_000, 0).unwrap().lambda_hat))
    });
    group.finish();
}

criterion_group!(benches, combinatorics, capacity, packing, monte_carlo);
criterion_main!(benches);
