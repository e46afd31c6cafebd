//! Benchmarks for the computational kernels: volume tables, structure
//! constants with the Killing probe, Haar draws, and the Monte Carlo
//! concentration estimator.

use criterion::{criterion_group, criterion_main, Criterion};
use levylab_core::concentration::{cpn_family, estimate_concentration};
use levylab_core::experiments::zn_mass_outside;
use levylab_core::liealg::{build_basis, chi_coefficient, structure_constants, MatrixAlgebra};
use levylab_core::rng::RandomStream;
use levylab_core::rootdata::{build_root_system, macdonald_log_volume, SeriesTag};
use levylab_core::sampling::{sample_orthogonal, sample_symplectic};
use std::hint::black_box;

fn volume_table(c: &mut Criterion) {
    c.bench_function("volume table, four series to n = 30", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for series in SeriesTag::ALL {
                for n in series.min_n()..=30 {
                    let rs = build_root_system(series, n).unwrap();
                    acc += macdonald_log_volume(&rs, 1).unwrap().log_value;
                }
            }
            black_box(acc)
        })
    });
}

fn killing_constant(c: &mut Criterion) {
    let basis = build_basis(MatrixAlgebra::SpecialUnitary(8)).unwrap();
    c.bench_function("structure constants su(8)", |b| {
        b.iter(|| black_box(structure_constants(&basis).unwrap()))
    });
    let sc = structure_constants(&basis).unwrap();
    c.bench_function("Killing probe su(8)", |b| {
        b.iter(|| black_box(chi_coefficient(&sc).unwrap().chi))
    });
}

fn haar_draws(c: &mut Criterion) {
    c.bench_function("Haar draw SO(50)", |b| {
        let mut rng = RandomStream::new(1, 0).rng();
        b.iter(|| black_box(sample_orthogonal(50, &mut rng).unwrap()))
    });
    c.bench_function("Haar draw USp(20)", |b| {
        let mut rng = RandomStream::new(1, 1).rng();
        b.iter(|| black_box(sample_symplectic(10, &mut rng).unwrap()))
    });
}

fn concentration_estimate(c: &mut Criterion) {
    let family = cpn_family(20);
    c.bench_function("concentration estimate, 10^4 trials on CP^20", |b| {
        b.iter(|| {
            black_box(
                estimate_concentration(&family, &[0.2], 10_000, RandomStream::new(2, 0)).unwrap(),
            )
        })
    });
}

fn circle_quadrature(c: &mut Criterion) {
    c.bench_function("circle family tail quadrature at n = 100", |b| {
        b.iter(|| black_box(zn_mass_outside(100, 0.3).unwrap()))
    });
}

criterion_group!(
    benches,
    volume_table,
    killing_constant,
    haar_draws,
    concentration_estimate,
    circle_quadrature
);
criterion_main!(benches);
