use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use elimsolve::elimderive::{derive_generators, DeriveOptions, ProblemId};
use elimsolve::solvers::{action_matrix, fef_cross_check, nullspace_parametrize, SolveOptions, Solver};
use elimsolve_bench::{instances, template_report};

fn solve(c: &mut Criterion) {
    println!("template sizes\n{}", template_report(20));
    let mut g = c.benchmark_group("solve");
    for id in ProblemId::ALL {
        let data = instances(id, 64);
        let solver = Solver::bundled(id);
        let opts = SolveOptions::default();
        let mut k = 0;
        g.bench_function(BenchmarkId::from_parameter(id), |b| {
            b.iter(|| {
                k = (k + 1) % data.len();
                black_box(solver.solve(&data[k], &opts).ok())
            })
        });
    }
    g.finish();
}

fn elimination(c: &mut Criterion) {
    let mut g = c.benchmark_group("template_elimination");
    for id in [ProblemId::Fef, ProblemId::Ef, ProblemId::Efk] {
        let solver = Solver::bundled(id);
        let corr = &instances(id, 1)[0];
        let p = nullspace_parametrize(id, corr).unwrap();
        let filled = solver.template.fill(&solver.instantiate(&p.basis));
        g.bench_function(BenchmarkId::from_parameter(id), |b| b.iter(|| black_box(action_matrix(&filled, &solver.template, 1e-12).ok())));
    }
    g.finish();
}

fn resultant(c: &mut Criterion) {
    let data = instances(ProblemId::Fef, 16);
    let opts = SolveOptions::default();
    let mut k = 0;
    c.bench_function("fef_cross_check", |b| {
        b.iter(|| {
            k = (k + 1) % data.len();
            black_box(fef_cross_check(&data[k], &opts).ok())
        })
    });
}

fn derivation(c: &mut Criterion) {
    let mut g = c.benchmark_group("derive");
    g.sample_size(10);
    for id in [ProblemId::Fef, ProblemId::Ef] {
        g.bench_function(BenchmarkId::from_parameter(id), |b| b.iter(|| black_box(derive_generators(id, &DeriveOptions::default()).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, solve, elimination, resultant, derivation);
criterion_main!(benches);
