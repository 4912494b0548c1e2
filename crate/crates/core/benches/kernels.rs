use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinqdd::diagnostics::default_scenarios;
use spinqdd::fields::PGrid;
use spinqdd::kinetic::{KineticParams, KineticSolver};
use spinqdd::moyal::{SpectralPotential, ThetaOperator};
use spinqdd::par;

const MODES: [(&str, bool); 2] = [("parallel", false), ("sequential", true)];

fn kinetic_step(c: &mut Criterion) {
    let s = &default_scenarios()[0];
    let pg = PGrid::new(24, 6.0).unwrap();
    let solver =
        KineticSolver::new(KineticParams::new(s.eps, s.alpha, 0.02, pg), s.potential_field().unwrap()).unwrap();
    let init = solver.initial_state(&s.state(s.eps).unwrap()).unwrap();
    let mut group = c.benchmark_group("kinetic_step");
    group.sample_size(10);
    for (label, seq) in MODES {
        par::set_sequential(seq);
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| {
                let mut st = init.clone();
                solver.step(&mut st, 0.002).unwrap();
                st
            })
        });
    }
    par::set_sequential(false);
    group.finish();
}

fn theta_apply(c: &mut Criterion) {
    let s = &default_scenarios()[0];
    let pg = PGrid::new(32, 8.0).unwrap();
    let solver = KineticSolver::new(KineticParams::new(s.eps, s.alpha, 1.0, pg), s.potential_field().unwrap()).unwrap();
    let w = solver.initial_state(&s.state(s.eps).unwrap()).unwrap().w;
    let v = SpectralPotential::new(&s.potential_field().unwrap());
    let mut group = c.benchmark_group("theta");
    group.sample_size(10);
    for (label, seq) in MODES {
        par::set_sequential(seq);
        group.bench_function(BenchmarkId::new("build", label), |b| {
            b.iter(|| ThetaOperator::new(&v, pg, s.eps).unwrap())
        });
        let op = ThetaOperator::new(&v, pg, s.eps).unwrap();
        group.bench_function(BenchmarkId::new("apply", label), |b| b.iter(|| op.apply(&w)));
    }
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, kinetic_step, theta_apply);
criterion_main!(benches);
