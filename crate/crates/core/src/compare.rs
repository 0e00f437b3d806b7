//! Point-by-point comparison of two impedance traces and extraction of the
//! frequency bands where they disagree.

use crate::error::Result;
use crate::extract::ImpedanceTrace;

pub const DEFAULT_THRESHOLD_DB: f64 = 3.0;

/// Maximal runs of `true` as inclusive index pairs, in order.
pub fn runs(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &m) in mask.iter().enumerate() {
        match (m, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, mask.len() - 1));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparePoint {
    pub freq_hz: f64,
    /// `20·log10(|Z_a| / |Z_b|)`; NaN where either side is flagged.
    pub ratio_db: f64,
    /// `arg(Z_a) − arg(Z_b)` wrapped to (−180, 180]; NaN where flagged.
    pub phase_diff_deg: f64,
    pub exceeds: bool,
}

/// Maximal run of consecutive points whose `|ratio_db|` exceeds the
/// threshold. Endpoints are the outermost exceeding frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationBand {
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    pub first_index: usize,
    pub last_index: usize,
    /// Largest `|ratio_db|` inside the band.
    pub peak_abs_db: f64,
}

impl DeviationBand {
    pub fn contains(&self, f_hz: f64) -> bool {
        (self.f_lo_hz..=self.f_hi_hz).contains(&f_hz)
    }

    pub fn n_points(&self) -> usize {
        self.last_index - self.first_index + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub threshold_db: f64,
    pub points: Vec<ComparePoint>,
    pub bands: Vec<DeviationBand>,
    /// Largest `|ratio_db|` over points valid on both sides; 0 if none.
    pub max_deviation_db: f64,
}

impl CompareReport {
    pub fn band_count(&self) -> usize {
        self.bands.len()
    }
}

pub fn compare(a: &ImpedanceTrace, b: &ImpedanceTrace, threshold_db: f64) -> Result<CompareReport> {
    a.grid().ensure_identical(b.grid())?;
    let points: Vec<ComparePoint> = (0..a.len())
        .map(|i| {
            let freq_hz = a.grid().points()[i];
            if !(a.status()[i].is_ok() && b.status()[i].is_ok()) {
                return ComparePoint {
                    freq_hz,
                    ratio_db: f64::NAN,
                    phase_diff_deg: f64::NAN,
                    exceeds: false,
                };
            }
            let (za, zb) = (a.z()[i], b.z()[i]);
            let ratio_db = 20.0 * (za.norm() / zb.norm()).log10();
            let mut phase = (za.arg() - zb.arg()).to_degrees();
            if phase > 180.0 {
                phase -= 360.0;
            } else if phase <= -180.0 {
                phase += 360.0;
            }
            ComparePoint {
                freq_hz,
                ratio_db,
                phase_diff_deg: phase,
                exceeds: ratio_db.abs() > threshold_db,
            }
        })
        .collect();
    let mask: Vec<bool> = points.iter().map(|p| p.exceeds).collect();
    let bands = runs(&mask)
        .into_iter()
        .map(|(lo, hi)| DeviationBand {
            f_lo_hz: points[lo].freq_hz,
            f_hi_hz: points[hi].freq_hz,
            first_index: lo,
            last_index: hi,
            peak_abs_db: points[lo..=hi]
                .iter()
                .map(|p| p.ratio_db.abs())
                .fold(0.0, f64::max),
        })
        .collect();
    let max_deviation_db = points
        .iter()
        .filter(|p| !p.ratio_db.is_nan())
        .map(|p| p.ratio_db.abs())
        .fold(0.0, f64::max);
    Ok(CompareReport {
        threshold_db,
        points,
        bands,
        max_deviation_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{ComplexTrace, FrequencyGrid, PointStatus};
    use num_complex::Complex64;

    fn imp(values: Vec<Complex64>) -> ImpedanceTrace {
        let g = FrequencyGrid::log_spaced(1e5, 1e7, values.len()).unwrap();
        ImpedanceTrace::new(ComplexTrace::new(g, values).unwrap(), "x", None)
    }

    #[test]
    fn runs_examples() {
        assert!(runs(&[]).is_empty());
        assert!(runs(&[false, false]).is_empty());
        assert_eq!(runs(&[true, true]), vec![(0, 1)]);
        assert_eq!(
            runs(&[true, false, true, true, false, true]),
            vec![(0, 0), (2, 3), (5, 5)]
        );
    }

    #[test]
    fn identical_traces_have_no_bands() {
        let v: Vec<_> = (1..=10)
            .map(|i| Complex64::new(i as f64, -(i as f64)))
            .collect();
        let r = compare(&imp(v.clone()), &imp(v), 3.0).unwrap();
        assert_eq!(r.band_count(), 0);
        assert_eq!(r.max_deviation_db, 0.0);
    }

    #[test]
    fn doubled_trace_is_one_full_span_band() {
        let v: Vec<_> = (1..=10).map(|i| Complex64::new(i as f64, 3.0)).collect();
        let w: Vec<_> = v.iter().map(|z| 2.0 * z).collect();
        let r = compare(&imp(v), &imp(w), 3.0).unwrap();
        assert_eq!(r.band_count(), 1);
        assert_eq!((r.bands[0].first_index, r.bands[0].last_index), (0, 9));
        let expected = 20.0 * 2f64.log10();
        assert!((r.max_deviation_db - expected).abs() < 1e-12);
        assert!((expected - 6.0206).abs() < 1e-4);
        assert!(r.points.iter().all(|p| p.phase_diff_deg.abs() < 1e-12));
    }

    #[test]
    fn phase_wraps_into_half_open_interval() {
        let a = imp(vec![
            Complex64::new(-1.0, 1e-300),
            Complex64::new(-1.0, 1e-3),
        ]);
        let b = imp(vec![
            Complex64::new(-1.0, -1e-300),
            Complex64::new(-1.0, -1e-3),
        ]);
        let r = compare(&a, &b, 3.0).unwrap();
        for p in &r.points {
            assert!(
                p.phase_diff_deg > -180.0 && p.phase_diff_deg <= 180.0,
                "{}",
                p.phase_diff_deg
            );
        }
    }

    #[test]
    fn flagged_points_break_bands() {
        let g = FrequencyGrid::log_spaced(1e5, 1e7, 3).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let a = ImpedanceTrace::new(
            ComplexTrace::with_status(
                g.clone(),
                vec![one, Complex64::new(f64::NAN, 0.0), one],
                vec![PointStatus::Ok, PointStatus::NearOpen, PointStatus::Ok],
            )
            .unwrap(),
            "a",
            None,
        );
        let b = ImpedanceTrace::new(ComplexTrace::constant(&g, one * 10.0).unwrap(), "b", None);
        let r = compare(&a, &b, 3.0).unwrap();
        assert_eq!(r.band_count(), 2);
        assert!(r.points[1].ratio_db.is_nan());
    }
}
