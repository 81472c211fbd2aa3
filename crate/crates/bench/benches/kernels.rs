use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use stochgal::weno::LobattoWeno;
use stochgal::{Axis, EulerEquations, SgSystem};
use stochgal_bench::{sample_state, sod_case};

fn assembly(c: &mut Criterion) {
    let model = EulerEquations::one_d(1.4);
    let mut g = c.benchmark_group("assembly");
    for order in [2, 4, 8] {
        let sys = SgSystem::new(model, order, None).unwrap();
        let a = sample_state(&model, order);
        let mut b = a.clone();
        b.mode_mut(0)[0] *= 1.2;
        g.bench_with_input(BenchmarkId::new("b_matrix", order), &order, |bench, _| {
            bench.iter(|| sys.b_matrix(black_box(&a), Axis::X).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("path_matrix", order), &order, |bench, _| {
            bench.iter(|| sys.path_matrix(black_box(&a), black_box(&b), Axis::X).unwrap())
        });
        let v = vec![1.0; sys.state_len()];
        g.bench_with_input(BenchmarkId::new("apply_b", order), &order, |bench, _| {
            bench.iter(|| sys.apply_b(black_box(a.as_slice()), black_box(&v), Axis::X).unwrap())
        });
    }
    g.finish();
}

fn residual(c: &mut Criterion) {
    let mut g = c.benchmark_group("residual");
    g.sample_size(20);
    for order in [2, 4, 8] {
        let (scheme, field) = sod_case(order, 200);
        g.bench_with_input(BenchmarkId::new("sod_200_cells", order), &order, |bench, _| {
            bench.iter_batched(
                || field.clone(),
                |mut f| scheme.evaluate(&mut f, 0.0).unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    g.finish();
}

fn weno(c: &mut Criterion) {
    let w = LobattoWeno::new();
    let s = [1.0, 1.2, 0.9, 1.4, 1.1];
    c.bench_function("weno/lobatto_reconstruct", |b| b.iter(|| w.reconstruct(black_box(&s))));
}

criterion_group!(benches, assembly, residual, weno);
criterion_main!(benches);
