use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use vlcris_bench::reference_scene;
use vlcris_core::{total_gain, LosMode, PathSet, SystemParams};

fn channel(c: &mut Criterion) {
    let params = SystemParams::default();
    let scene = reference_scene(&params);
    let user = &scene.users[0];
    let mut group = c.benchmark_group("total_gain");
    for (name, paths) in [("mirrors", PathSet::Ris), ("wall", PathSet::Wall), ("los_only", PathSet::LosOnly)] {
        group.bench_function(name, |b| {
            b.iter(|| total_gain(black_box(&scene), user, &params, paths, LosMode::Geometric).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, channel);
criterion_main!(benches);
