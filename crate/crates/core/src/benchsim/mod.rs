//! Software stand-in for the measurement bench: probe two-port, LISN and
//! cable loop, and a parametric DUT, producing the reflection coefficients an
//! instrument would see at its port.
//!
//! The DUT's own noise source is not modeled (it is zero); receiver noise is
//! added to Γ by [`NoiseModel`].

mod element;
mod noise;
mod probe;
pub mod random;

pub use element::{mode_variants, EditSet, LoopElement};
pub use noise::{NoiseModel, TraceRole};
pub use probe::{ProbeModel, ProbeStage};

use crate::calib::{StandardsTriple, DEFAULT_R_LOAD};
use crate::error::{Error, Result};
use crate::netcore::{
    reflection_from_impedance, AbcdNetwork, ComplexTrace, FrequencyGrid, ReferenceImpedance,
};

/// Example bench shipped with the crate (TOML bench description).
pub const EXAMPLE_BENCH_TOML: &str = include_str!("../../data/example_bench.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

impl Spacing {
    pub fn as_str(self) -> &'static str {
        match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        }
    }
}

/// Sweep definition; the grid is derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl Sweep {
    /// 201 log-spaced points from 150 kHz to 30 MHz.
    pub fn conducted_band() -> Self {
        Self {
            f_start_hz: 150e3,
            f_stop_hz: 30e6,
            n_points: 201,
            spacing: Spacing::Log,
        }
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        match self.spacing {
            Spacing::Log => {
                FrequencyGrid::log_spaced(self.f_start_hz, self.f_stop_hz, self.n_points)
            }
            Spacing::Linear => {
                FrequencyGrid::linear_spaced(self.f_start_hz, self.f_stop_hz, self.n_points)
            }
        }
    }
}

/// Complete simulated bench.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchModel {
    pub probe: ProbeModel,
    /// LISN DM branch, in series position of the loop.
    pub lisn: LoopElement,
    /// Power-cable loop contribution; split in halves around the LISN.
    pub cable: LoopElement,
    /// One-port stand-in for the drive's DM input impedance.
    pub dut: LoopElement,
    pub sweep: Sweep,
    pub z0: ReferenceImpedance,
    pub noise: NoiseModel,
    /// Optional matched attenuator between instrument and probe.
    pub attenuator_db: Option<f64>,
}

impl BenchModel {
    /// A bench with ideal probe, empty loop and the given DUT.
    pub fn trivial(dut: LoopElement, sweep: Sweep) -> Self {
        Self {
            probe: ProbeModel::ideal(),
            lisn: LoopElement::series(vec![]),
            cable: LoopElement::series(vec![]),
            dut,
            sweep,
            z0: ReferenceImpedance::default(),
            noise: NoiseModel::default(),
            attenuator_db: None,
        }
    }

    /// A mild, well-conditioned bench on the conducted band: small probe
    /// parasitics, a 50 Ω-class LISN branch and a DUT whose Γ stays well
    /// inside the unit circle. Noise is off; set `noise` to study it.
    pub fn reference() -> Self {
        Self {
            probe: ProbeModel::new(0.2e-6, 2e-12, 1.0),
            lisn: LoopElement::series(vec![LoopElement::resistor(5.0)]),
            cable: LoopElement::series(vec![LoopElement::inductor(0.1e-6)]),
            dut: LoopElement::series(vec![
                LoopElement::resistor(40.0),
                LoopElement::parallel(vec![
                    LoopElement::inductor(10e-6),
                    LoopElement::resistor(30.0),
                ]),
            ]),
            sweep: Sweep::conducted_band(),
            z0: ReferenceImpedance::default(),
            noise: NoiseModel::default(),
            attenuator_db: None,
        }
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        self.sweep.grid()
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.grid()?;
        self.probe.validate()?;
        self.lisn.validate(true, true)?;
        self.cable.validate(true, true)?;
        self.dut.validate(false, false)?;
        self.noise.validate()?;
        if let Some(db) = self.attenuator_db {
            if !(db >= 0.0 && db.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "attenuation must be finite and >= 0 dB (got {db})"
                )));
            }
        }
        Ok(())
    }

    /// DUT impedance over the bench grid.
    pub fn dut_impedance(&self) -> Result<ComplexTrace> {
        self.dut.eval_impedance(&self.grid()?)
    }
}

/// Chain from the instrument plane to the DUT port:
/// `[attenuator] · probe · cable/2 · LISN · cable/2`.
pub fn build_chain(b: &BenchModel) -> Result<AbcdNetwork> {
    b.validate()?;
    let g = b.grid()?;
    let mut n = AbcdNetwork::identity(&g);
    if let Some(db) = b.attenuator_db {
        n = n.cascade(&AbcdNetwork::attenuator(db, b.z0.ohms(), &g)?)?;
    }
    let half_cable = b.cable.loop_network(&g, 0.5)?;
    n.cascade(&b.probe.network(&g)?)?
        .cascade(&half_cable)?
        .cascade(&b.lisn.loop_network(&g, 1.0)?)?
        .cascade(&half_cable)
}

fn gamma_through(
    chain: &AbcdNetwork,
    load: &ComplexTrace,
    b: &BenchModel,
    role: TraceRole,
) -> Result<ComplexTrace> {
    let zin = chain.input_impedance(load)?;
    Ok(b.noise.apply(&reflection_from_impedance(&zin, b.z0), role))
}

/// Γ at the instrument plane with the bench DUT, or `dut_override` in its
/// place.
pub fn synth_gamma(b: &BenchModel, dut_override: Option<&LoopElement>) -> Result<ComplexTrace> {
    let chain = build_chain(b)?;
    let dut = dut_override.unwrap_or(&b.dut);
    dut.validate(false, false)?;
    let z = dut.eval_impedance(chain.grid())?;
    gamma_through(&chain, &z, b, TraceRole::Measurement)
}

/// How the open standard is realized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpenStandard {
    /// Infinite impedance, evaluated as the network's `A / C` limit.
    Analytic,
    /// A finite resistor of this many ohms.
    Finite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardsOptions {
    pub r_load: f64,
    pub open: OpenStandard,
}

impl Default for StandardsOptions {
    fn default() -> Self {
        Self {
            r_load: DEFAULT_R_LOAD,
            open: OpenStandard::Analytic,
        }
    }
}

/// Open, short and 50 Ω load at the DUT port, each with its own noise stream.
pub fn synth_standards(b: &BenchModel) -> Result<StandardsTriple> {
    synth_standards_with(b, &StandardsOptions::default())
}

pub fn synth_standards_with(b: &BenchModel, opts: &StandardsOptions) -> Result<StandardsTriple> {
    if !(opts.r_load > 0.0 && opts.r_load.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "r_load must be finite and > 0 (got {})",
            opts.r_load
        )));
    }
    let chain = build_chain(b)?;
    let g = chain.grid();
    let open_load = match opts.open {
        OpenStandard::Analytic => ComplexTrace::open(g),
        OpenStandard::Finite(r) if r > 0.0 && r.is_finite() => {
            ComplexTrace::constant(g, num_complex::Complex64::new(r, 0.0))?
        }
        OpenStandard::Finite(r) => {
            return Err(Error::InvalidParameter(format!(
                "finite open must be > 0 ohms (got {r})"
            )))
        }
    };
    let short = ComplexTrace::constant(g, num_complex::Complex64::new(0.0, 0.0))?;
    let load = ComplexTrace::constant(g, num_complex::Complex64::new(opts.r_load, 0.0))?;
    StandardsTriple::new(
        gamma_through(&chain, &open_load, b, TraceRole::Open)?.named("open"),
        gamma_through(&chain, &short, b, TraceRole::Short)?.named("short"),
        gamma_through(&chain, &load, b, TraceRole::Load)?.named("load"),
    )
}
