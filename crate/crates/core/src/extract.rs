//! Measured reflection coefficient to DUT impedance:
//! `Z = (k1·Γ_m + k2) / (Γ_m + k3)`.

use num_complex::Complex64;

use crate::calib::CalibrationSet;
use crate::error::Result;
use crate::netcore::{ComplexTrace, FrequencyGrid, PointStatus, TraceMeta};

/// Default relative near-open threshold.
pub const DEFAULT_NEAR_OPEN_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// A point is near-open when `|Γ_m + k3| < near_open_rel · (1 + |k3|)`.
    pub near_open_rel: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            near_open_rel: DEFAULT_NEAR_OPEN_REL,
        }
    }
}

/// Extracted impedance with per-point status. Flagged points hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceTrace {
    z: ComplexTrace,
    /// [`CalibrationSet::fingerprint`] of the calibration used.
    pub calibration_id: String,
    /// Name of the measurement trace, when known.
    pub source: Option<String>,
}

impl ImpedanceTrace {
    pub fn new(z: ComplexTrace, calibration_id: impl Into<String>, source: Option<String>) -> Self {
        Self {
            z,
            calibration_id: calibration_id.into(),
            source,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.z.grid()
    }

    pub fn z(&self) -> &[Complex64] {
        self.z.values()
    }

    pub fn status(&self) -> &[PointStatus] {
        self.z.status()
    }

    pub fn as_trace(&self) -> &ComplexTrace {
        &self.z
    }

    pub fn meta(&self) -> &TraceMeta {
        &self.z.meta
    }

    pub fn meta_mut(&mut self) -> &mut TraceMeta {
        &mut self.z.meta
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn ok_count(&self) -> usize {
        self.status().iter().filter(|s| s.is_ok()).count()
    }
}

pub fn extract_impedance(gamma_m: &ComplexTrace, cal: &CalibrationSet) -> Result<ImpedanceTrace> {
    extract_impedance_with(gamma_m, cal, &ExtractOptions::default())
}

pub fn extract_impedance_with(
    gamma_m: &ComplexTrace,
    cal: &CalibrationSet,
    opts: &ExtractOptions,
) -> Result<ImpedanceTrace> {
    cal.grid().ensure_identical(gamma_m.grid())?;
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let (values, status) = gamma_m
        .iter()
        .enumerate()
        .map(|(i, (_, g, gs))| {
            let (k1, k2, k3, cs) = cal.point(i);
            if !cs.is_ok() {
                return (nan, PointStatus::IllConditioned);
            }
            if !gs.is_ok() {
                return (nan, gs);
            }
            let den = g + k3;
            if den.norm() < opts.near_open_rel * (1.0 + k3.norm()) {
                return (nan, PointStatus::NearOpen);
            }
            let z = (k1 * g + k2) / den;
            if z.re.is_finite() && z.im.is_finite() {
                (z, PointStatus::Ok)
            } else {
                (nan, PointStatus::NearOpen)
            }
        })
        .unzip();
    let mut meta = TraceMeta {
        name: gamma_m.meta.name.clone(),
        ..TraceMeta::default()
    };
    meta.resampled = gamma_m.meta.resampled;
    meta.notes.extend(gamma_m.meta.notes.iter().cloned());
    meta.notes.extend(cal.notes.iter().cloned());
    let z = ComplexTrace::from_parts(cal.grid().clone(), values, status, meta);
    Ok(ImpedanceTrace::new(
        z,
        cal.fingerprint(),
        gamma_m.meta.name.clone(),
    ))
}

/// Extract every named measurement with one calibration, preserving order.
/// The first grid mismatch aborts with the trace's name attached.
pub fn extract_batch(
    measurements: &[(String, ComplexTrace)],
    cal: &CalibrationSet,
) -> Result<Vec<ImpedanceTrace>> {
    measurements
        .iter()
        .map(|(name, t)| {
            let mut z = extract_impedance(t, cal).map_err(|e| e.in_trace(name.clone()))?;
            z.source = Some(name.clone());
            Ok(z)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib::k_from_abcd;
    use crate::error::Error;
    use crate::netcore::{AbcdNetwork, ReferenceImpedance};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ident_cal(g: &FrequencyGrid) -> CalibrationSet {
        k_from_abcd(&AbcdNetwork::identity(g), ReferenceImpedance::default())
    }

    #[test]
    fn identity_cal_examples() {
        let g = FrequencyGrid::new(vec![1e6, 2e6, 3e6]).unwrap();
        let gm = ComplexTrace::new(g.clone(), vec![c(0.0, 0.0), c(1.0 / 3.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        let z = extract_impedance(&gm, &ident_cal(&g)).unwrap();
        assert_eq!(z.z()[0], c(50.0, 0.0));
        assert!((z.z()[1] - c(100.0, 0.0)).norm() < 1e-12);
        assert_eq!(
            z.status(),
            &[PointStatus::Ok, PointStatus::Ok, PointStatus::NearOpen]
        );
        assert!(z.z()[2].re.is_nan());
    }

    #[test]
    fn grid_mismatch_is_global_error() {
        let g = FrequencyGrid::new(vec![1e6, 2e6]).unwrap();
        let h = FrequencyGrid::new(vec![1e6, 2.5e6]).unwrap();
        let gm = ComplexTrace::constant(&h, c(0.0, 0.0)).unwrap();
        assert!(matches!(
            extract_impedance(&gm, &ident_cal(&g)),
            Err(Error::GridMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn flag_monotonicity_near_open() {
        // shrinking |Γ + k3| never produces a huge unflagged value
        let g = FrequencyGrid::new(vec![1e6]).unwrap();
        let cal = ident_cal(&g);
        let mut last_ok = 0.0f64;
        for e in 1..=20 {
            let d = 10f64.powi(-e);
            let gm = ComplexTrace::constant(&g, c(1.0 - d, 0.0)).unwrap();
            let z = extract_impedance(&gm, &cal).unwrap();
            if d < 2e-9 {
                assert_eq!(z.status()[0], PointStatus::NearOpen, "d = {d}");
            } else {
                assert_eq!(z.status()[0], PointStatus::Ok);
                last_ok = last_ok.max(z.z()[0].norm());
            }
        }
        assert!(last_ok < 1e12);
    }

    #[test]
    fn ill_conditioned_cal_is_inherited() {
        use crate::calib::{solve_osl, StandardsTriple};
        let g = FrequencyGrid::new(vec![1e6, 2e6]).unwrap();
        let open = ComplexTrace::constant(&g, c(1.0, 0.0)).unwrap();
        let short = ComplexTrace::new(g.clone(), vec![c(-1.0, 0.0), c(0.5, 0.0)]).unwrap();
        let load = ComplexTrace::new(g.clone(), vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        let cal = solve_osl(&StandardsTriple::new(open, short, load).unwrap(), 50.0).unwrap();
        let gm = ComplexTrace::constant(&g, c(0.0, 0.0)).unwrap();
        let z = extract_impedance(&gm, &cal).unwrap();
        assert_eq!(z.status(), &[PointStatus::Ok, PointStatus::IllConditioned]);
    }

    #[test]
    fn batch_matches_single_and_names_offender() {
        let g = FrequencyGrid::new(vec![1e6, 2e6]).unwrap();
        let cal = ident_cal(&g);
        assert!(extract_batch(&[], &cal).unwrap().is_empty());
        let t = ComplexTrace::constant(&g, c(0.2, 0.1)).unwrap();
        let out = extract_batch(&[("m1".into(), t.clone())], &cal).unwrap();
        assert_eq!(out[0].z(), extract_impedance(&t, &cal).unwrap().z());
        assert_eq!(out[0].source.as_deref(), Some("m1"));

        let bad =
            ComplexTrace::constant(&FrequencyGrid::new(vec![1e6]).unwrap(), c(0.0, 0.0)).unwrap();
        let err = extract_batch(&[("m1".into(), t), ("bad".into(), bad)], &cal).unwrap_err();
        assert!(err.to_string().contains("`bad`"), "{err}");
    }
}
