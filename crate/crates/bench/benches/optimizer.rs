use criterion::{criterion_group, criterion_main, Criterion};
use vlcris_bench::{rate_problem, rng};
use vlcris_core::sca::{self, ScaConfig};
use vlcris_core::scenario::oracle_grid_search;

fn optimizer(c: &mut Criterion) {
    let problem = rate_problem();
    let mut group = c.benchmark_group("optimizer");
    group.sample_size(10);
    group.bench_function("sca_default", |b| {
        b.iter(|| sca::run(problem.space(), |x| problem.evaluate(x), &ScaConfig::default(), rng(1)).unwrap())
    });
    group.bench_function("grid_11x11x6", |b| {
        b.iter(|| oracle_grid_search(problem.space(), &[11, 11, 6], |x| problem.evaluate(x)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, optimizer);
criterion_main!(benches);
