//! Fixtures shared by the benchmarks in `benches/`.

use dmimp_core::benchsim::EXAMPLE_BENCH_TOML;
use dmimp_core::io::read_bench_config;
use dmimp_core::{
    solve_osl, synth_gamma, synth_standards, BenchModel, CalibrationSet, ComplexTrace,
};

/// The shipped example bench with its sweep set to `n_points` points.
pub fn example_bench(n_points: usize) -> BenchModel {
    let mut b = read_bench_config(EXAMPLE_BENCH_TOML).expect("example bench parses");
    b.sweep.n_points = n_points;
    b
}

/// Calibration and measured Γ for `b`.
pub fn calibrated(b: &BenchModel) -> (CalibrationSet, ComplexTrace) {
    let cal = solve_osl(&synth_standards(b).expect("standards"), 50.0).expect("calibration");
    (cal, synth_gamma(b, None).expect("measurement"))
}
