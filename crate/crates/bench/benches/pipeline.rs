use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tropmoduli::complex::enumerate_stable;
use tropmoduli::plmap::{build_trop_t, ModuliPair};
use tropmoduli::strata::integrate_ps;
use tropmoduli_bench::{cusp_input, ENUMERATION_CASES};

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_stable");
    group.sample_size(10);
    for (g, n) in ENUMERATION_CASES {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{g},{n}")), &(g, n), |b, &(g, n)| {
            b.iter(|| enumerate_stable(black_box(g), black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn trop_t(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_trop_t");
    group.sample_size(10);
    for (g, n) in [(1, 3), (2, 2)] {
        let stable = Arc::new(enumerate_stable(g, n).unwrap());
        let ps = Arc::new(stable.pseudostable_subcomplex().unwrap());
        group.bench_function(format!("{g},{n}"), |b| b.iter(|| build_trop_t(stable.clone(), ps.clone()).unwrap()));
    }
    group.finish();
}

fn integration(c: &mut Criterion) {
    let pair = ModuliPair::new(1, 2).unwrap();
    let f = cusp_input(&pair);
    c.bench_function("integrate_ps/cusp", |b| b.iter(|| integrate_ps(&pair, black_box(&f)).unwrap()));
}

criterion_group!(benches, enumeration, trop_t, integration);
criterion_main!(benches);
