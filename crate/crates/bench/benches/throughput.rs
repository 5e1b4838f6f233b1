use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use hamming_shift_bench::{alternating_case, paired_case};
use hamming_shift_core::block_model::segments_of;
use hamming_shift_core::clt_approx::type4_arrangement_probability;
use hamming_shift_core::oracle::brute_force_joint;
use hamming_shift_core::{decompose_blocks, estimate_fraction, joint_distribution, ModulusKind};

fn exact_dp(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_dp");
    for (kind, n) in [
        (ModulusKind::Pow2, 64),
        (ModulusKind::Pow2, 128),
        (ModulusKind::Pow2Minus1, 64),
    ] {
        let (alpha, m) = alternating_case(kind, n);
        group.bench_with_input(BenchmarkId::new(kind.as_str(), n), &n, |b, _| {
            b.iter(|| joint_distribution(black_box(&alpha), m).unwrap())
        });
    }
    group.finish();
}

fn brute_force(c: &mut Criterion) {
    let (alpha, m) = alternating_case(ModulusKind::Pow2, 16);
    c.bench_function("brute_force/pow2/16", |b| {
        b.iter(|| brute_force_joint(black_box(&alpha), m).unwrap())
    });
}

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sampler");
    group.sample_size(10);
    let samples = 100_000;
    group.throughput(Throughput::Elements(samples));
    let (alpha, m) = alternating_case(ModulusKind::Pow2, 4096);
    group.bench_function("light_to_heavy/4096", |b| {
        b.iter(|| estimate_fraction(black_box(&alpha), m, samples, 1).unwrap())
    });
    let (alpha, m) = paired_case(64);
    let segments = segments_of(&decompose_blocks(&alpha));
    group.bench_function("arrangement/64", |b| {
        b.iter(|| type4_arrangement_probability(black_box(&segments), m, samples, 1).unwrap())
    });
    group.finish();
}

criterion_group!(benches, exact_dp, brute_force, sampling);
criterion_main!(benches);
