//! Linear interpolation of complex traces in log-frequency.

use num_complex::Complex64;

use crate::calib::CalibrationSet;
use crate::error::{Error, Result};
use crate::netcore::{ComplexTrace, FrequencyGrid, PointStatus, TraceMeta, GRID_REL_TOL};

/// Where a target frequency falls in the source grid.
enum Locate {
    Exact(usize),
    Between(usize, f64),
}

fn locate(src: &[f64], f: f64) -> Result<Locate> {
    let (lo, hi) = match (src.first(), src.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => {
            return Err(Error::Extrapolation {
                freq_hz: f,
                lo_hz: f64::NAN,
                hi_hz: f64::NAN,
            })
        }
    };
    let near = |a: f64, b: f64| (a - b).abs() <= GRID_REL_TOL * a.abs().max(b.abs());
    let i = src.partition_point(|&p| p < f);
    if i < src.len() && near(src[i], f) {
        return Ok(Locate::Exact(i));
    }
    if i > 0 && near(src[i - 1], f) {
        return Ok(Locate::Exact(i - 1));
    }
    if i == 0 || i == src.len() {
        return Err(Error::Extrapolation {
            freq_hz: f,
            lo_hz: lo,
            hi_hz: hi,
        });
    }
    let (a, b) = (src[i - 1].ln(), src[i].ln());
    Ok(Locate::Between(i - 1, (f.ln() - a) / (b - a)))
}

fn interp(
    src: &FrequencyGrid,
    values: &[Complex64],
    status: &[PointStatus],
    target: &FrequencyGrid,
) -> Result<(Vec<Complex64>, Vec<PointStatus>)> {
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut out_v = Vec::with_capacity(target.len());
    let mut out_s = Vec::with_capacity(target.len());
    for &f in target.points() {
        match locate(src.points(), f)? {
            Locate::Exact(i) => {
                out_v.push(values[i]);
                out_s.push(status[i]);
            }
            Locate::Between(i, t) => {
                let bad = [status[i], status[i + 1]].into_iter().find(|s| !s.is_ok());
                match bad {
                    Some(s) => {
                        out_v.push(nan);
                        out_s.push(s);
                    }
                    None => {
                        let (a, b) = (values[i], values[i + 1]);
                        out_v.push(Complex64::new(
                            a.re + t * (b.re - a.re),
                            a.im + t * (b.im - a.im),
                        ));
                        out_s.push(PointStatus::Ok);
                    }
                }
            }
        }
    }
    Ok((out_v, out_s))
}

/// Interpolate `trace` onto `target`, component-wise in (re, im) against
/// ln f. Targets outside the source span are an error. A target point next
/// to a flagged source point inherits its flag.
pub fn resample(trace: &ComplexTrace, target: &FrequencyGrid) -> Result<ComplexTrace> {
    let (values, status) = interp(trace.grid(), trace.values(), trace.status(), target)?;
    let mut meta: TraceMeta = trace.meta.clone();
    meta.resampled = true;
    meta.notes.push(format!(
        "resampled from {} to {} points",
        trace.len(),
        target.len()
    ));
    Ok(ComplexTrace::from_parts(
        target.clone(),
        values,
        status,
        meta,
    ))
}

/// Interpolate a calibration onto another grid. The result carries a
/// warning note: coefficients belong to the sweep they were measured on.
pub fn resample_calibration(
    cal: &CalibrationSet,
    target: &FrequencyGrid,
) -> Result<CalibrationSet> {
    let mut k = [Vec::new(), Vec::new(), Vec::new()];
    let mut status = Vec::new();
    for (slot, t) in [cal.k1(), cal.k2(), cal.k3()].into_iter().enumerate() {
        let (v, s) = interp(cal.grid(), t.values(), cal.status(), target)?;
        k[slot] = v;
        status = s;
    }
    let mut out = CalibrationSet::from_parts(target.clone(), k, status, cal.r_load, cal.z0)?;
    out.conditioning_floor = cal.conditioning_floor;
    out.notes = cal.notes.clone();
    out.notes.push(format!(
        "WARNING: calibration resampled from {} to {} points; coefficients are only exact on the sweep they were measured on",
        cal.len(),
        target.len()
    ));
    Ok(out)
}
