// SPDX-License-Identifier: MIT OR Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use wildseg_bench::blocks_series;
use wildseg_core::{
    binseg, cusum_argmax, detect, draw_intervals, ssic_select, wbs, DetectionParams, Interval,
    PrefixSums, SsicParams,
};

fn bench_argmax(c: &mut Criterion) {
    let mut group = c.benchmark_group("cusum_argmax");
    for len in [1_000usize, 10_000, 100_000] {
        let x = blocks_series(len, 1);
        let sums = PrefixSums::new(&x);
        let iv = Interval::new(1, len).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(len), &len, |b, _| {
            b.iter(|| cusum_argmax(black_box(&sums), iv).unwrap())
        });
    }
    group.finish();
}

fn bench_detection(c: &mut Criterion) {
    let x = blocks_series(2000, 7);
    let mut group = c.benchmark_group("detection_t2000");
    group.sample_size(20);

    group.bench_function("draw_intervals_m5000", |b| {
        b.iter(|| draw_intervals(2000, black_box(5000), 3).unwrap())
    });

    let intervals = draw_intervals(2000, 5000, 3).unwrap();
    let params = DetectionParams::default();
    group.bench_function("wbs_m5000_full_path", |b| {
        b.iter(|| wbs(black_box(&x), &params, &intervals).unwrap())
    });
    group.bench_function("wbs_m5000_ssic", |b| {
        b.iter(|| {
            let path = detect(black_box(&x), &params).unwrap();
            ssic_select(&x, &path, &SsicParams::default()).unwrap()
        })
    });
    group.bench_function("binseg_full_path", |b| {
        b.iter(|| binseg(black_box(&x), 0.0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_argmax, bench_detection);
criterion_main!(benches);
