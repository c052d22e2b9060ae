use std::hint::black_box;

use copolymer_core::column::{psi, ColumnType};
use copolymer_core::entropy::{kappa, kappa_derivative, EntropyEvaluator};
use copolymer_core::interface::interface_log_partitions;
use copolymer_core::oracle::{count_paths_stretch_form, enumerate_column_paths, omega_word, HPoint};
use copolymer_core::phases::classify;
use copolymer_core::varform::{free_energy_for_measure, measure_family_from_disorder, FamilySettings};
use copolymer_core::Kind::{A, B};
use copolymer_core::{Objective, SlopeMeasure};
use criterion::{criterion_group, criterion_main, Criterion};

fn entropy(c: &mut Criterion) {
    c.bench_function("kappa", |b| b.iter(|| kappa(black_box(3.2), black_box(0.7))));
    c.bench_function("kappa_derivative", |b| b.iter(|| kappa_derivative(black_box(3.2), black_box(0.7))));
    c.bench_function("kappa_finite width 32", |b| {
        b.iter(|| EntropyEvaluator::new(vec![32]).kappa_finite(32, black_box(3.0), black_box(0.5)))
    });
}

fn counting(c: &mut Criterion) {
    let pt = HPoint::new(4, 24, 6).unwrap();
    c.bench_function("enumerate width 4 steps 24", |b| b.iter(|| enumerate_column_paths(black_box(pt), 24)));
    c.bench_function("stretch form width 4 steps 24", |b| b.iter(|| count_paths_stretch_form(black_box(pt))));
}

fn interface(c: &mut Criterion) {
    let omega = omega_word(1, 256);
    c.bench_function("interface transfer width 32", |b| {
        b.iter(|| interface_log_partitions(32, 256, black_box(&omega), 2.0, 1.0))
    });
}

fn optimisers(c: &mut Criterion) {
    let obj = Objective::entropic(2.0, 0.0);
    let rho = SlopeMeasure::rho_hor(0.7);
    c.bench_function("dinkelbach horizontal", |b| b.iter(|| free_energy_for_measure(black_box(&rho), &obj)));
    let theta = ColumnType::new(vec![B, A, A], 0, 0.5, 0.5, 2).unwrap();
    c.bench_function("psi interface column", |b| b.iter(|| psi(black_box(&theta), 3.0, &obj)));

    let settings = FamilySettings { n_columns: 2000, ..FamilySettings::default() };
    c.bench_function("family build 2000 columns", |b| {
        b.iter(|| measure_family_from_disorder(0.7, 2, 4, black_box(1), &settings))
    });
    let fam = measure_family_from_disorder(0.7, 2, 4, 1, &settings).unwrap();
    c.bench_function("classify entropic point", |b| b.iter(|| classify(&fam, black_box(&obj))));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = entropy, counting, interface, optimisers
}
criterion_main!(benches);
