use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nodaltree::verify::{run_batch, CorpusSpec, Tolerances};
use nodaltree::{charpoly_oracle, decompose, nodal_domains, DEFAULT_EPS_Z};
use nodaltree_bench::random_operator;

fn bench_decompose(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    for n in [12, 50, 200] {
        let op = random_operator(n, 11);
        group.bench_with_input(BenchmarkId::from_parameter(n), &op, |b, op| {
            b.iter(|| decompose(black_box(op)).unwrap())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let op = random_operator(12, 11);
    c.bench_function("charpoly_oracle/12", |b| {
        b.iter(|| charpoly_oracle(black_box(&op)).unwrap())
    });
}

fn bench_nodal(c: &mut Criterion) {
    let op = random_operator(200, 5);
    let s = decompose(&op).unwrap();
    let u = s.eigenvector(100).to_vec();
    c.bench_function("nodal_domains/200", |b| {
        b.iter(|| nodal_domains(op.tree(), black_box(&u), DEFAULT_EPS_Z).unwrap())
    });
}

fn bench_batch(c: &mut Criterion) {
    let spec = CorpusSpec::default();
    let tol = Tolerances::default();
    c.bench_function("batch/50", |b| b.iter(|| run_batch(&spec, 7, 50, &tol, 1).unwrap()));
}

criterion_group!(benches, bench_decompose, bench_oracle, bench_nodal, bench_batch);
criterion_main!(benches);
