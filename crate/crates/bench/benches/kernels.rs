use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lempert::interpolation::{lemma4_solve, Lemma4Problem};
use lempert::kernel::{pick_feasible, PickProblem};
use lempert::optimizer::{bidisc_lempert, OptimizerSettings};
use lempert::plane::{green_plane, lempert_n_plane};
use lempert::{PlaneDomain, PoleSet};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pick(crit: &mut Criterion) {
    let nodes = vec![c(0.0, 0.0), c(0.4, 0.1), c(-0.3, 0.5), c(0.1, -0.6), c(-0.5, -0.2)];
    let targets = vec![c(0.0, 0.0), c(0.2, 0.0), c(0.0, 0.3), c(-0.1, 0.1), c(0.3, -0.2)];
    let problem = PickProblem::new(nodes, targets).unwrap();
    crit.bench_function("pick_feasible 5x5", |b| b.iter(|| pick_feasible(black_box(&problem))));
}

fn green(crit: &mut Criterion) {
    let d = PlaneDomain::annulus(0.3).unwrap();
    crit.bench_function("green annulus 1e-12", |b| {
        b.iter(|| green_plane(d, black_box(c(0.5, 0.2)), c(-0.4, 0.5), 1e-12).unwrap())
    });
    crit.bench_function("green punctured 1e-10", |b| {
        b.iter(|| green_plane(PlaneDomain::PuncturedDisc, black_box(c(0.5, 0.2)), c(-0.4, 0.5), 1e-10).unwrap())
    });
    crit.bench_function("lempert_n annulus n=10", |b| {
        b.iter(|| lempert_n_plane(d, black_box(c(0.5, 0.2)), c(-0.4, 0.5), 10).unwrap())
    });
}

fn lemma4(crit: &mut Criterion) {
    let problem = Lemma4Problem::new(vec![c(0.3, 0.0), c(0.0, 0.4), c(-0.2, 0.5), c(0.6, -0.1)], 0.9).unwrap();
    crit.bench_function("lemma4 four targets", |b| {
        b.iter(|| lemma4_solve(black_box(&problem)).unwrap())
    });
}

fn optimizer(crit: &mut Criterion) {
    let a = PoleSet::new(PlaneDomain::UnitDisc, vec![c(0.5, 0.0), c(0.0, 0.5)]).unwrap();
    let b = PoleSet::new(PlaneDomain::UnitDisc, vec![c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
    let settings = OptimizerSettings {
        restarts: 10,
        threads: Some(1),
        ..Default::default()
    };
    let mut group = crit.benchmark_group("optimizer");
    group.sample_size(10);
    group.bench_function("bidisc 10 restarts", |bench| {
        bench.iter(|| bidisc_lempert(&a, &b, c(0.0, 0.0), c(0.0, 0.0), black_box(&settings)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pick, green, lemma4, optimizer);
criterion_main!(benches);
