use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinwig_bench::fixture;
use spinwig_core::moyal::poisson_bracket;
use spinwig_core::phase_space::moment_density;
use spinwig_core::poisson::solve_poisson;
use spinwig_core::transport::{rk4_step, TransportOperator};
use spinwig_core::{PhaseField, Scenario, TermToggles};

const SIZES: [(usize, usize); 3] = [(32, 16), (64, 32), (128, 64)];

fn rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_rhs");
    for (n_q, n_p) in SIZES {
        let f = fixture(Scenario::BlochLimit, n_q, n_p).unwrap();
        let op = TransportOperator::new(
            &f.grid,
            &f.config.fields,
            &f.config.closure,
            TermToggles::all(),
        )
        .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n_q * n_p), &f, |b, f| {
            b.iter(|| op.assemble_rhs(black_box(&f.state), None).unwrap())
        });
    }
    group.finish();
}

fn rk4(c: &mut Criterion) {
    let mut group = c.benchmark_group("rk4_step");
    for (n_q, n_p) in SIZES {
        let f = fixture(Scenario::BlochLimit, n_q, n_p).unwrap();
        let op = TransportOperator::new(
            &f.grid,
            &f.config.fields,
            &f.config.closure,
            f.config.toggles,
        )
        .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n_q * n_p), &f, |b, f| {
            b.iter(|| rk4_step(black_box(&f.state), f.config.dt, |s| op.rhs(s)).unwrap())
        });
    }
    group.finish();
}

fn poisson(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_poisson");
    for n_q in [64, 256, 1024] {
        let f = fixture(Scenario::SelfConsistentPileup, n_q, 16).unwrap();
        let rho = moment_density(&f.state, &f.grid).unwrap().rho;
        let mut cfg = f.config.poisson.clone();
        cfg.rho_background = 0.0;
        group.bench_with_input(BenchmarkId::from_parameter(n_q), &rho, |b, rho| {
            b.iter(|| solve_poisson(black_box(rho), &cfg, &f.grid).unwrap())
        });
    }
    group.finish();
}

fn bracket(c: &mut Criterion) {
    let f = fixture(Scenario::BlochLimit, 64, 32).unwrap();
    let a = PhaseField::from_fn("a", &f.grid, |p, q| (0.3 * q).sin() * p[0]);
    let b = PhaseField::from_fn("b", &f.grid, |p, q| (-0.1 * q * q).exp() + p[0] * p[0]);
    c.bench_function("poisson_bracket_64x32", |bench| {
        bench.iter(|| poisson_bracket(&f.grid, black_box(&a), black_box(&b)).unwrap())
    });
}

criterion_group!(benches, rhs, rk4, poisson, bracket);
criterion_main!(benches);
