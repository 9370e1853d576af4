// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qdec_bench::random_gas_channel;
use qdec_core::asymptotics::{AsymptoticAnalysis, AsymptoticOptions};
use qdec_core::{did, models, nfd, DensityOperator, SubspaceBasis, Tolerances};
use std::hint::black_box;

fn seven_level(c: &mut Criterion) {
    let tol = Tolerances::default();
    let map = models::seven_level(&models::SEVEN_LEVEL_DEFAULT_GAMMAS).unwrap();
    let s13 = SubspaceBasis::from_indices(7, &[0, 2]).unwrap();
    let s1234 = SubspaceBasis::from_indices(7, &[0, 1, 2, 3]).unwrap();
    let parts = [s13.clone(), SubspaceBasis::from_indices(7, &[1, 3]).unwrap()];
    let rho = DensityOperator::maximally_mixed(7);

    let mut g = c.benchmark_group("seven_level");
    g.bench_function("nfd", |b| {
        b.iter(|| nfd::nfd(black_box(&map), &s13, &tol).unwrap())
    });
    g.bench_function("did", |b| {
        b.iter(|| did::did(black_box(&map), &s1234, &tol).unwrap())
    });
    g.bench_function("dual_supports", |b| {
        b.iter(|| black_box(&map).dual_support_sequence(&s13, 8, &tol).unwrap())
    });
    g.bench_function("asymptotics", |b| {
        b.iter(|| {
            let an = AsymptoticAnalysis::new(black_box(&map), &parts, &AsymptoticOptions::default(), &tol)
                .unwrap();
            an.report(&rho).unwrap()
        })
    });
    g.finish();
}

fn random_channels(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("random");
    for d in [4usize, 8, 12] {
        let (map, hs) = random_gas_channel(d, 3, 1, d as u64);
        g.bench_with_input(BenchmarkId::new("superoperator", d), &map, |b, m| {
            b.iter(|| m.superoperator())
        });
        g.bench_with_input(BenchmarkId::new("nfd", d), &map, |b, m| {
            b.iter(|| nfd::nfd(m, &hs, &tol).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("did", d), &map, |b, m| {
            b.iter(|| did::did(m, &hs, &tol).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, seven_level, random_channels);
criterion_main!(benches);
