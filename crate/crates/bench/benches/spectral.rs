use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gpcq_core::integrator::Stepper;
use gpcq_core::{fft, Complex64, ComplexField, Diagnostics, EquationSpec, Grid};

fn gaussian(grid: Grid) -> ComplexField {
    ComplexField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|a| a * a).sum();
        Complex64::new(0.5 * (-r2 / 4.0).exp(), 0.1 * x[0] * (-r2 / 4.0).exp())
    })
}

fn cases() -> [(&'static str, EquationSpec, Grid); 2] {
    [
        ("gp4_16^4", EquationSpec::Gp4, Grid::new(4, 16, 16.0).unwrap()),
        ("cq3_32^3", EquationSpec::Cq3 { gamma: 0.5 }, Grid::new(3, 32, 16.0).unwrap()),
    ]
}

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_round_trip");
    for (name, _, grid) in cases() {
        let mut data = gaussian(grid).into_values();
        group.bench_function(name, |b| {
            b.iter(|| {
                fft::forward(&grid, black_box(&mut data));
                fft::inverse(&grid, black_box(&mut data));
            })
        });
    }
    group.finish();
}

fn strang(c: &mut Criterion) {
    let mut group = c.benchmark_group("strang_step");
    for (name, spec, grid) in cases() {
        let stepper = Stepper::new(spec, grid, 1e-3, false);
        let mut data = gaussian(grid).into_values();
        group.bench_function(name, |b| b.iter(|| stepper.step(black_box(&mut data))));
    }
    group.finish();
}

fn diagnostics(c: &mut Criterion) {
    let mut group = c.benchmark_group("snapshot_diagnostics");
    for (name, spec, grid) in cases() {
        let v = gaussian(grid);
        group.bench_function(name, |b| b.iter(|| Diagnostics::compute(black_box(&v), &spec)));
    }
    group.finish();
}

criterion_group!(benches, transforms, strang, diagnostics);
criterion_main!(benches);
