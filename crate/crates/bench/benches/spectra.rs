use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use dynamo_spectra::geometry::evolve_frame;
use dynamo_spectra::sweep::{Axis, AxisName};
use dynamo_spectra::{
    golden_polynomial_roots, run_sweep, solve_pencil, FilamentProfile, FrenetFrame, SweepGrid,
    Variant,
};
use dynamo_spectra_bench::sample_pencils;

fn spectra(c: &mut Criterion) {
    let pencils = sample_pencils();
    c.bench_function("solve_pencil/all_variants", |b| {
        b.iter(|| {
            for p in &pencils {
                black_box(solve_pencil(black_box(p)).unwrap());
            }
        })
    });
    c.bench_function("golden_polynomial_roots", |b| {
        b.iter(|| black_box(golden_polynomial_roots(black_box(-1.0))))
    });
}

fn frames(c: &mut Criterion) {
    let helix = FilamentProfile::helical(1.0).unwrap();
    c.bench_function("evolve_frame/s=10,step=1e-3", |b| {
        b.iter(|| black_box(evolve_frame(&FrenetFrame::identity(), &helix, 10.0, 1e-3).unwrap()))
    });
}

fn sweeps(c: &mut Criterion) {
    let mut grid = SweepGrid::point(Variant::GeneralBeta, 1.0, -1.0, 0.0, -1.0);
    *grid.axis_mut(AxisName::Beta) = Axis::log(1e-4, 1.0, 100);
    *grid.axis_mut(AxisName::VS) = Axis::linear(-2.0, 2.0, 100);
    c.bench_function("run_sweep/general_beta_100x100", |b| {
        b.iter(|| black_box(run_sweep(&grid).unwrap()))
    });
}

criterion_group!(benches, spectra, frames, sweeps);
criterion_main!(benches);
