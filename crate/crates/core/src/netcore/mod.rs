//! Frequency grids, complex traces and two-port ABCD network algebra.
//!
//! ABCD is the internal representation for every linear two-port; reflection
//! coefficients only appear at the measurement plane.

mod abcd;
mod convert;
mod grid;
mod trace;

pub use abcd::{Abcd, AbcdNetwork};
pub use convert::{impedance_from_reflection, reflection_from_impedance};
pub use grid::{FrequencyGrid, GRID_REL_TOL};
pub use trace::{ComplexTrace, PointStatus, TraceMeta};

use crate::error::{Error, Result};

/// Denominators below this magnitude are treated as exactly zero.
pub const SINGULAR_EPS: f64 = 1e-30;

/// Real reference impedance `Z0` in ohms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceImpedance(f64);

impl ReferenceImpedance {
    pub fn new(ohms: f64) -> Result<Self> {
        if ohms > 0.0 && ohms.is_finite() {
            Ok(Self(ohms))
        } else {
            Err(Error::InvalidParameter(format!(
                "reference impedance must be finite and > 0 (got {ohms})"
            )))
        }
    }

    pub fn ohms(self) -> f64 {
        self.0
    }
}

impl Default for ReferenceImpedance {
    fn default() -> Self {
        Self(50.0)
    }
}
