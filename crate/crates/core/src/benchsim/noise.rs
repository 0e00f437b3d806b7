use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::netcore::ComplexTrace;

/// Role of a synthesized trace; selects an independent noise stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceRole {
    Measurement,
    Open,
    Short,
    Load,
}

impl TraceRole {
    fn id(self) -> u64 {
        match self {
            TraceRole::Measurement => 0,
            TraceRole::Open => 1,
            TraceRole::Short => 2,
            TraceRole::Load => 3,
        }
    }
}

/// Additive circular complex Gaussian noise on Γ, i.i.d. per point.
///
/// `sigma` is the RMS magnitude of the perturbation: real and imaginary
/// parts each have standard deviation `sigma / √2`. The sample at a point
/// depends only on `(seed, role, point index)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            sigma: 0.0,
            seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        let m = Self { sigma, seed };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma >= 0.0 && self.sigma.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "noise sigma must be finite and >= 0 (got {})",
                self.sigma
            )))
        }
    }

    /// The perturbation added at `index` of a trace with `role`.
    pub fn sample(&self, role: TraceRole, index: usize) -> Complex64 {
        if self.sigma == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&role.id().to_le_bytes());
        key[16..24].copy_from_slice(&(index as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        let normal = Normal::new(0.0, self.sigma / std::f64::consts::SQRT_2)
            .expect("sigma validated finite and >= 0");
        Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))
    }

    /// Add noise to every ok point of `trace`.
    pub fn apply(&self, trace: &ComplexTrace, role: TraceRole) -> ComplexTrace {
        if self.sigma == 0.0 {
            return trace.clone();
        }
        let values = trace
            .iter()
            .enumerate()
            .map(|(i, (_, z, s))| {
                if s.is_ok() {
                    z + self.sample(role, i)
                } else {
                    z
                }
            })
            .collect();
        ComplexTrace::from_parts(
            trace.grid().clone(),
            values,
            trace.status().to_vec(),
            trace.meta.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_role_dependent() {
        let m = NoiseModel::new(1e-3, 42).unwrap();
        assert_eq!(m.sample(TraceRole::Open, 7), m.sample(TraceRole::Open, 7));
        assert_ne!(m.sample(TraceRole::Open, 7), m.sample(TraceRole::Short, 7));
        assert_ne!(m.sample(TraceRole::Open, 7), m.sample(TraceRole::Open, 8));
        let other = NoiseModel::new(1e-3, 43).unwrap();
        assert_ne!(
            m.sample(TraceRole::Open, 7),
            other.sample(TraceRole::Open, 7)
        );
    }

    #[test]
    fn zero_sigma_is_exactly_zero() {
        let m = NoiseModel::new(0.0, 1).unwrap();
        assert_eq!(m.sample(TraceRole::Load, 3), Complex64::new(0.0, 0.0));
        assert!(NoiseModel::new(-1.0, 1).is_err());
    }

    #[test]
    fn rms_matches_sigma() {
        let m = NoiseModel::new(0.01, 9).unwrap();
        let n = 20_000;
        let ms: f64 = (0..n)
            .map(|i| m.sample(TraceRole::Measurement, i).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((ms.sqrt() / 0.01 - 1.0).abs() < 0.03, "rms {}", ms.sqrt());
    }
}
