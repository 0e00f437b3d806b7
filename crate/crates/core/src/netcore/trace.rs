use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::grid::FrequencyGrid;
use crate::error::{Error, Result};

/// Per-frequency validity of a sample.
///
/// Flagged points keep their slot in the sweep so a single degenerate
/// frequency never invalidates the rest of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PointStatus {
    #[default]
    Ok,
    /// A denominator vanished; the value is meaningless.
    Singular,
    /// Infinite impedance (analytic open circuit).
    Open,
    /// Extraction denominator below the near-open threshold.
    NearOpen,
    /// The calibration at this point failed its conditioning floor.
    IllConditioned,
}

impl PointStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::Singular => "singular",
            PointStatus::Open => "open",
            PointStatus::NearOpen => "near-open",
            PointStatus::IllConditioned => "ill-conditioned-cal",
        }
    }

    pub fn is_ok(self) -> bool {
        self == PointStatus::Ok
    }
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PointStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "ok" => PointStatus::Ok,
            "singular" => PointStatus::Singular,
            "open" => PointStatus::Open,
            "near-open" => PointStatus::NearOpen,
            "ill-conditioned-cal" => PointStatus::IllConditioned,
            other => return Err(format!("unknown status `{other}`")),
        })
    }
}

/// Free-form provenance carried alongside a trace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceMeta {
    pub name: Option<String>,
    /// Comment lines from a source file, without the leading `!`.
    pub comments: Vec<String>,
    /// True once values have been interpolated onto another grid.
    pub resampled: bool,
    /// Human-readable notes (warnings) that must survive serialization.
    pub notes: Vec<String>,
}

/// Complex samples indexed by a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrace {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
    status: Vec<PointStatus>,
    pub meta: TraceMeta,
}

impl ComplexTrace {
    /// All points flagged ok; every value must be finite.
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        let status = vec![PointStatus::Ok; values.len()];
        Self::with_status(grid, values, status)
    }

    pub fn with_status(
        grid: FrequencyGrid,
        values: Vec<Complex64>,
        status: Vec<PointStatus>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if status.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: status.len(),
            });
        }
        if let Some(i) = (0..values.len())
            .find(|&i| status[i].is_ok() && !(values[i].re.is_finite() && values[i].im.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "sample {i} at {} Hz is not finite but is flagged ok",
                grid.points()[i]
            )));
        }
        Ok(Self {
            grid,
            values,
            status,
            meta: TraceMeta::default(),
        })
    }

    /// Evaluate `f(freq_hz)` at each grid point.
    pub fn from_fn(grid: &FrequencyGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().iter().map(|&hz| f(hz)).collect();
        Self::new(grid.clone(), values)
    }

    pub fn constant(grid: &FrequencyGrid, z: Complex64) -> Result<Self> {
        Self::new(grid.clone(), vec![z; grid.len()])
    }

    /// A load that is an open circuit at every frequency.
    pub fn open(grid: &FrequencyGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(f64::INFINITY, 0.0); grid.len()],
            status: vec![PointStatus::Open; grid.len()],
            meta: TraceMeta::default(),
        }
    }

    /// Builder-style name setter.
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.meta.name = Some(name.into());
        self
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn status(&self) -> &[PointStatus] {
        &self.status
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(freq_hz, value, status)` per point.
    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64, PointStatus)> + '_ {
        self.grid
            .points()
            .iter()
            .zip(&self.values)
            .zip(&self.status)
            .map(|((&f, &z), &s)| (f, z, s))
    }

    pub fn flagged_count(&self) -> usize {
        self.status.iter().filter(|s| !s.is_ok()).count()
    }

    pub(crate) fn from_parts(
        grid: FrequencyGrid,
        values: Vec<Complex64>,
        status: Vec<PointStatus>,
        meta: TraceMeta,
    ) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        debug_assert_eq!(grid.len(), status.len());
        Self {
            grid,
            values,
            status,
            meta,
        }
    }

    /// Apply `f` to every ok sample, keeping flags.
    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let values = self
            .iter()
            .map(|(_, z, s)| if s.is_ok() { f(z) } else { z })
            .collect();
        Self::from_parts(
            self.grid.clone(),
            values,
            self.status.clone(),
            self.meta.clone(),
        )
    }
}
