use critcentre::jets::{self, DiffPoly};
use critcentre::liealg::{build_classical, Family};
use critcentre::scalars::Field;
use critcentre::vacuum::{Mode, VacuumModule};
use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};

fn sl(n: usize, field: Field) -> VacuumModule {
    VacuumModule::critical(build_classical(Family::Sl, n, field).unwrap()).unwrap()
}

fn straightening(c: &mut Criterion) {
    let mut group = c.benchmark_group("straightening");
    for (name, field) in [("sl2_f5", Field::Prime(5)), ("sl2_q", Field::Rational)] {
        // fresh module per batch so the memo tables start empty
        group.bench_function(format!("word_{name}"), |b| {
            b.iter_batched(
                || sl(2, field),
                |v| {
                    let w = v.word(&[Mode::new(2, 1), Mode::new(1, 2), Mode::new(0, 1), Mode::new(2, 3)]);
                    black_box(v.apply_mode(0, 2, &w))
                },
                BatchSize::SmallInput,
            )
        });
        group.bench_function(format!("product_{name}"), |b| {
            b.iter_batched(
                || sl(2, field),
                |v| {
                    let a = v.word(&[Mode::new(0, 1), Mode::new(2, 1)]);
                    let c = v.word(&[Mode::new(1, 1), Mode::new(2, 2)]);
                    black_box(v.nth_product(&a, -1, &c))
                },
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn centre_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("centre_kernel");
    group.sample_size(10);
    for w in [3u32, 4] {
        group.bench_function(format!("sl2_f5_weight{w}"), |b| {
            b.iter_batched(|| sl(2, Field::Prime(5)), |v| black_box(v.centre_kernel(w, 20_000).unwrap()), BatchSize::SmallInput)
        });
    }
    group.finish();
}

fn hasse(c: &mut Criterion) {
    let mut group = c.benchmark_group("hasse_derive");
    for (name, field) in [("f7", Field::Prime(7)), ("q", Field::Rational)] {
        let spec = build_classical(Family::Sl, 3, field).unwrap();
        let p3: DiffPoly = jets::build_invariant_p(&spec, 2).unwrap();
        for k in [1u32, 4] {
            group.bench_function(format!("sl3_cubic_{name}_k{k}"), |b| b.iter(|| black_box(jets::hasse_derive(k, &p3).unwrap())));
        }
    }
    group.finish();
}

criterion_group!(benches, straightening, centre_kernel, hasse);
criterion_main!(benches);
