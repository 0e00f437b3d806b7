//! In-circuit differential-mode impedance extraction with a single
//! clamp-on inductive probe.
//!
//! The instrument sees the DUT through a linear two-port (probe, LISN and
//! cables). Three calibration coefficients absorb that two-port, after which
//! each measured reflection coefficient maps to the DUT impedance through
//! a bilinear transform:
//!
//! ```text
//! Z = (k1·Γ_m + k2) / (Γ_m + k3)
//! ```
//!
//! Modules:
//! - [`netcore`]: frequency grids, traces, ABCD algebra, Γ ↔ Z.
//! - [`calib`]: coefficients from a known network or from open/short/load.
//! - [`extract`]: the bilinear extraction with per-point status.
//! - [`benchsim`]: a simulated bench used as an exact oracle and demo source.
//! - [`io`]: Touchstone, CSV, calibration and bench files; resampling.
//! - [`compare`]: deviation bands between two impedance traces.

pub mod benchsim;
pub mod calib;
pub mod compare;
pub mod error;
pub mod extract;
pub mod io;
pub mod netcore;

pub use benchsim::{
    build_chain, synth_gamma, synth_standards, BenchModel, LoopElement, NoiseModel, ProbeModel,
};
pub use calib::{conditioning_report, k_from_abcd, solve_osl, CalibrationSet, StandardsTriple};
pub use compare::{compare, CompareReport, DeviationBand};
pub use error::{Error, Result};
pub use extract::{extract_batch, extract_impedance, ImpedanceTrace};
pub use netcore::{
    impedance_from_reflection, reflection_from_impedance, Abcd, AbcdNetwork, ComplexTrace,
    FrequencyGrid, PointStatus, ReferenceImpedance,
};
pub use num_complex::Complex64;
