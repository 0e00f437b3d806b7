//! Randomized benches for property tests and benchmarks.

use rand::Rng;

use super::{BenchModel, LoopElement, NoiseModel, ProbeModel, ProbeStage, Sweep};
use crate::netcore::ReferenceImpedance;

/// Value ranges for [`random_bench`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomRanges {
    pub l_lk_h: (f64, f64),
    pub c_p_f: (f64, f64),
    pub n: (f64, f64),
    pub r_ohm: (f64, f64),
    pub l_h: (f64, f64),
    pub c_f: (f64, f64),
}

impl Default for RandomRanges {
    fn default() -> Self {
        Self {
            l_lk_h: (0.1e-6, 5e-6),
            c_p_f: (1e-12, 50e-12),
            n: (0.5, 4.0),
            r_ohm: (0.1, 200.0),
            l_h: (0.1e-6, 100e-6),
            c_f: (10e-12, 10e-6),
        }
    }
}

pub fn log_uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

fn r(rng: &mut impl Rng, ranges: &RandomRanges) -> LoopElement {
    LoopElement::resistor(log_uniform(rng, ranges.r_ohm))
}

fn l(rng: &mut impl Rng, ranges: &RandomRanges) -> LoopElement {
    LoopElement::inductor(log_uniform(rng, ranges.l_h))
}

fn c(rng: &mut impl Rng, ranges: &RandomRanges) -> LoopElement {
    LoopElement::capacitor(log_uniform(rng, ranges.c_f))
}

/// A random DUT drawn from a handful of drive-input-like topologies.
///
/// Every topology carries a series lead inductance, as a real converter
/// input does. Without it a sub-ohm resistive DUT at tens of MHz sits so far
/// below the reactance of the probe chain that one ulp of rounding in the
/// synthesized reflection already moves the recovered impedance by ~1e-9.
pub fn random_dut(rng: &mut impl Rng, ranges: &RandomRanges) -> LoopElement {
    match rng.random_range(0..4) {
        // R + L
        0 => LoopElement::series(vec![r(rng, ranges), l(rng, ranges)]),
        // L + (R ∥ C)
        1 => LoopElement::series(vec![
            l(rng, ranges),
            LoopElement::parallel(vec![r(rng, ranges), c(rng, ranges)]),
        ]),
        // L + (R ∥ (R + L + C))
        2 => LoopElement::series(vec![
            l(rng, ranges),
            LoopElement::parallel(vec![
                r(rng, ranges),
                LoopElement::series(vec![r(rng, ranges), l(rng, ranges), c(rng, ranges)]),
            ]),
        ]),
        // R + L + (L ∥ C ∥ R)
        _ => LoopElement::series(vec![
            r(rng, ranges),
            l(rng, ranges),
            LoopElement::parallel(vec![l(rng, ranges), c(rng, ranges), r(rng, ranges)]),
        ]),
    }
}

/// Random probe, LISN, cable and DUT on `sweep`, noiseless.
pub fn random_bench(rng: &mut impl Rng, sweep: Sweep, ranges: &RandomRanges) -> BenchModel {
    let mut probe = ProbeModel::new(
        log_uniform(rng, ranges.l_lk_h),
        log_uniform(rng, ranges.c_p_f),
        rng.random_range(ranges.n.0..=ranges.n.1),
    );
    if rng.random_bool(0.5) {
        probe.topology = vec![
            ProbeStage::SeriesLlk,
            ProbeStage::ShuntCp,
            ProbeStage::Transformer,
        ];
    }
    let lisn = LoopElement::series(vec![LoopElement::parallel(vec![
        r(rng, ranges),
        LoopElement::series(vec![l(rng, ranges), r(rng, ranges)]),
    ])]);
    let cable = LoopElement::series(vec![l(rng, ranges)]);
    BenchModel {
        probe,
        lisn,
        cable,
        dut: random_dut(rng, ranges),
        sweep,
        z0: ReferenceImpedance::default(),
        noise: NoiseModel::default(),
        attenuator_db: None,
    }
}
