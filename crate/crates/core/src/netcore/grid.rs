use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative tolerance under which two frequency points are the same point.
pub const GRID_REL_TOL: f64 = 1e-9;

/// Strictly increasing, positive sweep frequencies in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    /// Validates and wraps a list of frequencies.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid(
                "grid must contain at least one point".into(),
            ));
        }
        Self::check(&points)?;
        Ok(Self { points })
    }

    /// A grid with no points. Only file I/O produces these (a Touchstone file
    /// with an option line and no data rows); every per-point operation maps
    /// it to another empty result.
    pub fn empty() -> Self {
        Self { points: Vec::new() }
    }

    /// Like [`FrequencyGrid::new`] but accepts zero points.
    pub fn new_allow_empty(points: Vec<f64>) -> Result<Self> {
        Self::check(&points)?;
        Ok(Self { points })
    }

    fn check(points: &[f64]) -> Result<()> {
        for (i, &f) in points.iter().enumerate() {
            if !f.is_finite() || f <= 0.0 {
                return Err(Error::InvalidGrid(format!(
                    "point {i} is {f}; frequencies must be finite and > 0"
                )));
            }
            if i > 0 && f <= points[i - 1] {
                return Err(Error::InvalidGrid(format!(
                    "point {i} ({f} Hz) does not exceed point {} ({} Hz)",
                    i - 1,
                    points[i - 1]
                )));
            }
        }
        Ok(())
    }

    /// `n` points spaced evenly in log-frequency, endpoints included.
    pub fn log_spaced(f_start: f64, f_stop: f64, n: usize) -> Result<Self> {
        Self::spaced(f_start, f_stop, n, true)
    }

    /// `n` points spaced evenly in frequency, endpoints included.
    pub fn linear_spaced(f_start: f64, f_stop: f64, n: usize) -> Result<Self> {
        Self::spaced(f_start, f_stop, n, false)
    }

    fn spaced(f_start: f64, f_stop: f64, n: usize, log: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("n_points must be >= 1".into()));
        }
        if !(f_start > 0.0 && f_start.is_finite() && f_stop.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "sweep bounds must be finite and > 0 (got {f_start}, {f_stop})"
            )));
        }
        if n == 1 {
            return Self::new(vec![f_start]);
        }
        if f_stop <= f_start {
            return Err(Error::InvalidGrid(format!(
                "f_stop ({f_stop}) must exceed f_start ({f_start})"
            )));
        }
        let last = (n - 1) as f64;
        let points = (0..n)
            .map(|i| {
                if i == 0 {
                    f_start
                } else if i == n - 1 {
                    f_stop
                } else if log {
                    let t = i as f64 / last;
                    (f_start.ln() + t * (f_stop.ln() - f_start.ln())).exp()
                } else {
                    f_start + (f_stop - f_start) * (i as f64 / last)
                }
            })
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Angular frequencies 2πf.
    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|f| 2.0 * PI * f)
    }

    pub fn first(&self) -> Option<f64> {
        self.points.first().copied()
    }

    pub fn last(&self) -> Option<f64> {
        self.points.last().copied()
    }

    /// Same length and every pair within [`GRID_REL_TOL`] relative.
    pub fn is_identical(&self, other: &FrequencyGrid) -> bool {
        self.first_difference(other).is_none()
    }

    /// Index of the first point at which two grids disagree, or `None` if
    /// they are identical. A length mismatch reports the shorter length.
    pub fn first_difference(&self, other: &FrequencyGrid) -> Option<usize> {
        let n = self.len().min(other.len());
        for i in 0..n {
            let (a, b) = (self.points[i], other.points[i]);
            if (a - b).abs() > GRID_REL_TOL * a.abs().max(b.abs()) {
                return Some(i);
            }
        }
        (self.len() != other.len()).then_some(n)
    }

    /// `Ok(())` when identical, otherwise a [`Error::GridMismatch`] naming
    /// the first differing point.
    pub fn ensure_identical(&self, other: &FrequencyGrid) -> Result<()> {
        match self.first_difference(other) {
            None => Ok(()),
            Some(index) => Err(Error::GridMismatch {
                left_len: self.len(),
                right_len: other.len(),
                index,
                left_hz: self.points.get(index).copied().unwrap_or(f64::NAN),
                right_hz: other.points.get(index).copied().unwrap_or(f64::NAN),
            }),
        }
    }
}
