use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;
use steinlaw::metrics::{self, Model};
use steinlaw::stein::SteinSolution;
use steinlaw::{curie_weiss, monomer_dimer, LimitLaw};

fn bench_limit_law(c: &mut Criterion) {
    let quartic = LimitLaw::new(2, 1.0 / 12.0).unwrap();
    c.bench_function("limit_law/tail_small_side", |b| {
        b.iter(|| black_box(quartic.tail(black_box(6.5))))
    });
    c.bench_function("limit_law/scaled_tail_quadrature", |b| {
        b.iter(|| black_box(quartic.scaled_tail(black_box(3.0)).unwrap()))
    });
    c.bench_function("limit_law/construction_with_cross_check", |b| {
        b.iter(|| black_box(LimitLaw::new(2, black_box(1.0 / 12.0)).unwrap()))
    });
}

fn bench_stein(c: &mut Criterion) {
    let sol = SteinSolution::new(LimitLaw::new(2, 1.0 / 12.0).unwrap(), 1.5);
    c.bench_function("stein/residual_point", |b| {
        b.iter(|| black_box(sol.residual(black_box(0.7))))
    });
}

fn bench_models(c: &mut Criterion) {
    c.bench_function("curie_weiss/diagnostics_n1e4", |b| {
        b.iter(|| black_box(curie_weiss::pair_diagnostics(black_box(10_000)).unwrap()))
    });
    c.bench_function("monomer_dimer/diagnostics_n1e4", |b| {
        b.iter(|| black_box(monomer_dimer::pair_diagnostics(black_box(10_000)).unwrap()))
    });
}

fn bench_distance(c: &mut Criterion) {
    let law = metrics::limiting_law(Model::CurieWeiss).unwrap();
    let w = curie_weiss::w_law(4096, 1.0).unwrap();
    c.bench_function("metrics/kolmogorov_n4096", |b| {
        b.iter_batched(
            || w.clone(),
            |law_n| black_box(metrics::weighted_distance(&law_n, &law, 0.0).unwrap()),
            BatchSize::LargeInput,
        )
    });
    c.bench_function("metrics/weighted_p3_n4096", |b| {
        b.iter_batched(
            || w.clone(),
            |law_n| black_box(metrics::weighted_distance(&law_n, &law, 3.0).unwrap()),
            BatchSize::LargeInput,
        )
    });
}

criterion_group!(benches, bench_limit_law, bench_stein, bench_models, bench_distance);
criterion_main!(benches);
