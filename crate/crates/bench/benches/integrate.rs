use criterion::{black_box, criterion_group, criterion_main, Criterion};

use curvint::{integrate, AngularIndex, Curvature, IntegratorConfig, PhaseState, SystemSpec};

fn bench_integrate(c: &mut Criterion) {
    let cfg = IntegratorConfig::default();
    let mut group = c.benchmark_group("integrate_t100");
    for (name, kappa) in [("sphere", 1.0), ("plane", 0.0), ("hyperbolic", -1.0)] {
        let spec = SystemSpec::pw(
            Curvature::new(kappa).unwrap(),
            1.0,
            0.8,
            0.3,
            AngularIndex::new(3, 2).unwrap(),
        )
        .unwrap();
        let s0 = PhaseState::new(1.0, 1.0, 0.1, 0.2);
        group.bench_function(name, |b| {
            b.iter(|| integrate(black_box(s0), &spec, 100.0, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_integrate);
criterion_main!(benches);
