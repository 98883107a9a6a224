use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ionrabi::exec::Execution;
use ionrabi::models::ModelKind;
use ionrabi::protocols::{f1_landscape, run_collapse_revival, CollapseRevivalPlan};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn landscape(c: &mut Criterion) {
    let mut group = c.benchmark_group("f1_landscape");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "60x100"), &exec, |b, &exec| {
            b.iter(|| f1_landscape(0, 60, (0.01, 1.0), black_box(100), exec).unwrap())
        });
    }
    group.finish();
}

fn collapse_revival(c: &mut Criterion) {
    let mut group = c.benchmark_group("collapse_revival");
    group.sample_size(10);
    let mut plan = CollapseRevivalPlan::new(ModelKind::JC, 10f64.sqrt(), 1.0, 0.0);
    plan.n_points = 2001;
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "jc_nbar10"), &exec, |b, &exec| {
            b.iter(|| run_collapse_revival(black_box(&plan), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, landscape, collapse_revival);
criterion_main!(benches);
