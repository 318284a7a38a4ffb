use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use turnpoint::approximant::error_profile;
use turnpoint::eigen::reference_energies;
use turnpoint::par;
use turnpoint::problem::catalog;

const EPS: [f64; 8] = [1e-1, 7e-2, 5e-2, 3.5e-2, 2.5e-2, 1.8e-2, 1.25e-2, 9e-3];

fn error_sweep(c: &mut Criterion) {
    let p = catalog::quadratic();
    let one = |e: &f64| error_profile(&p, *e, 0.2, -0.2, 0.2, 201, 1e-10).unwrap().sup();
    let mut g = c.benchmark_group("error_sweep");
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("sequential", EPS.len()), |b| {
        b.iter(|| par::map_sequential(&EPS, one))
    });
    g.bench_function(BenchmarkId::new("parallel", EPS.len()), |b| {
        b.iter(|| par::map(&EPS, one))
    });
    g.finish();
}

fn eigen_sweep(c: &mut Criterion) {
    let v = catalog::quartic_well();
    let eps = [4e-2, 3e-2, 2e-2, 1e-2];
    let one = |e: &f64| reference_energies(&v, *e, 4, 1e-11).unwrap();
    let mut g = c.benchmark_group("eigen_sweep");
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("sequential", eps.len()), |b| {
        b.iter(|| par::map_sequential(&eps, one))
    });
    g.bench_function(BenchmarkId::new("parallel", eps.len()), |b| {
        b.iter(|| par::map(&eps, one))
    });
    g.finish();
}

criterion_group!(benches, error_sweep, eigen_sweep);
criterion_main!(benches);
