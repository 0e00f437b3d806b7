use std::ops::Mul;

use num_complex::Complex64;

use super::grid::FrequencyGrid;
use super::trace::{ComplexTrace, PointStatus, TraceMeta};
use super::SINGULAR_EPS;
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Transmission (ABCD) matrix at one frequency.
///
/// `[V1, I1]ᵀ = [[A, B], [C, D]] · [V2, I2]ᵀ`, port 1 towards the
/// instrument, port 2 towards the load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Abcd {
    pub const IDENTITY: Abcd = Abcd {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
    };

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn series(z: Complex64) -> Self {
        Self::new(ONE, z, ZERO, ONE)
    }

    pub fn shunt(y: Complex64) -> Self {
        Self::new(ONE, ZERO, y, ONE)
    }

    pub fn transformer(n: f64) -> Self {
        Self::new(
            Complex64::new(n, 0.0),
            ZERO,
            ZERO,
            Complex64::new(1.0 / n, 0.0),
        )
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Input impedance with a finite load `z_load` on port 2, or `None` when
    /// the denominator vanishes.
    pub fn input_impedance(&self, z_load: Complex64) -> Option<Complex64> {
        let den = self.c * z_load + self.d;
        (den.norm() >= SINGULAR_EPS).then(|| (self.a * z_load + self.b) / den)
    }
}

impl Mul for Abcd {
    type Output = Abcd;

    fn mul(self, o: Abcd) -> Abcd {
        Abcd {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// ABCD matrices over a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcdNetwork {
    grid: FrequencyGrid,
    matrices: Vec<Abcd>,
}

impl AbcdNetwork {
    pub fn new(grid: FrequencyGrid, matrices: Vec<Abcd>) -> Result<Self> {
        if matrices.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: matrices.len(),
            });
        }
        Ok(Self { grid, matrices })
    }

    /// Build by evaluating `f(freq_hz)` at each grid point.
    pub fn from_fn(grid: &FrequencyGrid, f: impl Fn(f64) -> Abcd) -> Self {
        Self {
            grid: grid.clone(),
            matrices: grid.points().iter().map(|&hz| f(hz)).collect(),
        }
    }

    pub fn identity(grid: &FrequencyGrid) -> Self {
        Self::from_fn(grid, |_| Abcd::IDENTITY)
    }

    /// Series impedance `[[1, Z], [0, 1]]` taking `Z` from the trace.
    pub fn series(z: &ComplexTrace) -> Self {
        Self {
            grid: z.grid().clone(),
            matrices: z.values().iter().map(|&z| Abcd::series(z)).collect(),
        }
    }

    /// Shunt admittance `[[1, 0], [Y, 1]]` taking `Y` from the trace.
    pub fn shunt(y: &ComplexTrace) -> Self {
        Self {
            grid: y.grid().clone(),
            matrices: y.values().iter().map(|&y| Abcd::shunt(y)).collect(),
        }
    }

    /// Ideal transformer `[[n, 0], [0, 1/n]]`.
    pub fn transformer(n: f64, grid: &FrequencyGrid) -> Result<Self> {
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "transformer turns ratio must be finite and nonzero (got {n})"
            )));
        }
        Ok(Self::from_fn(grid, |_| Abcd::transformer(n)))
    }

    /// Lossless uniform transmission line of characteristic impedance `zc`,
    /// physical length `length_m` and phase velocity `velocity_m_per_s`.
    pub fn transmission_line(
        zc: f64,
        length_m: f64,
        velocity_m_per_s: f64,
        grid: &FrequencyGrid,
    ) -> Result<Self> {
        if !(zc > 0.0 && length_m > 0.0 && velocity_m_per_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "transmission line needs zc, length and velocity > 0 (got {zc}, {length_m}, {velocity_m_per_s})"
            )));
        }
        Ok(Self::from_fn(grid, |hz| {
            let theta = 2.0 * std::f64::consts::PI * hz * length_m / velocity_m_per_s;
            let (s, c) = theta.sin_cos();
            Abcd::new(
                Complex64::new(c, 0.0),
                Complex64::new(0.0, zc * s),
                Complex64::new(0.0, s / zc),
                Complex64::new(c, 0.0),
            )
        }))
    }

    /// Matched resistive attenuator of `db` decibels in a `z0` system.
    pub fn attenuator(db: f64, z0: f64, grid: &FrequencyGrid) -> Result<Self> {
        if !(db >= 0.0 && db.is_finite() && z0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "attenuator needs db >= 0 and z0 > 0 (got {db}, {z0})"
            )));
        }
        let alpha = db / 20.0 * std::f64::consts::LN_10;
        let (ch, sh) = (alpha.cosh(), alpha.sinh());
        Ok(Self::from_fn(grid, |_| {
            Abcd::new(
                Complex64::new(ch, 0.0),
                Complex64::new(z0 * sh, 0.0),
                Complex64::new(sh / z0, 0.0),
                Complex64::new(ch, 0.0),
            )
        }))
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn matrices(&self) -> &[Abcd] {
        &self.matrices
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// `self · next`, with `self` nearer the measurement plane.
    pub fn cascade(&self, next: &AbcdNetwork) -> Result<AbcdNetwork> {
        self.grid.ensure_identical(&next.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            matrices: self
                .matrices
                .iter()
                .zip(&next.matrices)
                .map(|(&l, &r)| l * r)
                .collect(),
        })
    }

    /// `A·D − B·C` per point.
    pub fn determinants(&self) -> Vec<Complex64> {
        self.matrices.iter().map(Abcd::determinant).collect()
    }

    /// Impedance looking into port 1 with `z_load` on port 2:
    /// `(A·Z_L + B) / (C·Z_L + D)`.
    ///
    /// Load points flagged [`PointStatus::Open`] use the limit `A / C`; an
    /// open load seen through `C = 0` stays open. A vanishing denominator
    /// for a finite load flags the point singular.
    pub fn input_impedance(&self, z_load: &ComplexTrace) -> Result<ComplexTrace> {
        self.grid.ensure_identical(z_load.grid())?;
        let nan = Complex64::new(f64::NAN, f64::NAN);
        let mut values = Vec::with_capacity(self.len());
        let mut status = Vec::with_capacity(self.len());
        for (m, (_, zl, st)) in self.matrices.iter().zip(z_load.iter()) {
            let (v, s) = match st {
                PointStatus::Open => {
                    if m.c.norm() < SINGULAR_EPS {
                        (Complex64::new(f64::INFINITY, 0.0), PointStatus::Open)
                    } else {
                        (m.a / m.c, PointStatus::Ok)
                    }
                }
                PointStatus::Ok => match m.input_impedance(zl) {
                    Some(z) => (z, PointStatus::Ok),
                    None => (nan, PointStatus::Singular),
                },
                _ => (nan, PointStatus::Singular),
            };
            values.push(v);
            status.push(s);
        }
        Ok(ComplexTrace::from_parts(
            self.grid.clone(),
            values,
            status,
            TraceMeta::default(),
        ))
    }
}
