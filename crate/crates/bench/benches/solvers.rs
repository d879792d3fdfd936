use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spim_core::generate::{gen_bipartite_family, gen_random_forest, BipartiteSpec};
use spim_core::{brute_force_solve, solve_approx, solve_forest, Budgets, OracleOptions};

fn oracle_vs_approx(c: &mut Criterion) {
    let spec = BipartiteSpec {
        rows: 4,
        ..BipartiteSpec::default()
    };
    let family = gen_bipartite_family(&spec).expect("default family is valid");
    let mut group = c.benchmark_group("bipartite_family");
    for inst in &family {
        group.bench_with_input(BenchmarkId::new("oracle", inst.n()), inst, |b, inst| {
            b.iter(|| brute_force_solve(black_box(inst), OracleOptions::default()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("approx", inst.n()), inst, |b, inst| {
            b.iter(|| solve_approx(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

fn forest_dp_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("forest_dp");
    for n in [16, 32, 64, 128] {
        let inst = gen_random_forest(n, 4, 4, 1..=9, 7)
            .unwrap()
            .with_budgets(Budgets::new(4, 8));
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| solve_forest(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, oracle_vs_approx, forest_dp_scaling);
criterion_main!(benches);
