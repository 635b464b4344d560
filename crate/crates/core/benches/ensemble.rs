use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use choichol::random::Sampler;
use choichol::verify::{check_ensemble, ensemble_cases, roundtrip_residual, test_inputs};
use choichol::{dilate, Exec, Tolerances};

fn modes() -> [(&'static str, Exec); 2] {
    [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ]
}

fn ensemble(c: &mut Criterion) {
    let tol = Tolerances::default();
    let cases = ensemble_cases(16, 5, 3, 1);
    let mut group = c.benchmark_group("check_ensemble");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| check_ensemble(&cases, 5, &tol, exec).unwrap())
        });
    }
    group.finish();
}

fn roundtrip(c: &mut Criterion) {
    let tol = Tolerances::default();
    let (ch, _) = Sampler::seeded(2).stinespring_channel(5, 5, 3).unwrap();
    let (_, v) = dilate(&ch, &tol).unwrap();
    let inputs = test_inputs(5, 200, 3);
    let mut group = c.benchmark_group("roundtrip_residual");
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| roundtrip_residual(&ch, &v, &inputs, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ensemble, roundtrip);
criterion_main!(benches);
