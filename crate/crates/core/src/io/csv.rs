//! Plot-ready CSV: impedance traces, Γ traces and comparison reports.
//!
//! Lines starting with `#` before the header carry metadata and are skipped
//! by the readers.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::compare::CompareReport;
use crate::error::{Error, Result};
use crate::extract::ImpedanceTrace;
use crate::netcore::{ComplexTrace, FrequencyGrid, PointStatus, TraceMeta};

pub const IMPEDANCE_HEADER: &str = "freq_hz,z_re_ohm,z_im_ohm,z_mag_ohm,z_phase_deg,status";
pub const TRACE_HEADER: &str = "freq_hz,re,im";
pub const COMPARE_HEADER: &str = "freq_hz,ratio_db,phase_diff_deg,exceeds";
pub const BANDS_HEADER: &str = "band,f_lo_hz,f_hi_hz,n_points,peak_abs_db";

/// Shortest round-trip text for `x`, with negative zero printed as `0`.
fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_owned()
    } else {
        format!("{x}")
    }
}

/// Phase of `z` in degrees within (−180, 180].
pub fn phase_deg(z: Complex64) -> f64 {
    let p = z.arg().to_degrees();
    if p <= -180.0 {
        p + 360.0
    } else {
        p
    }
}

pub fn write_impedance_csv(t: &ImpedanceTrace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# calibration={}", t.calibration_id);
    if let Some(s) = &t.source {
        let _ = writeln!(out, "# source={s}");
    }
    if t.meta().resampled {
        let _ = writeln!(out, "# resampled=true");
    }
    for n in &t.meta().notes {
        let _ = writeln!(out, "# note={n}");
    }
    out.push_str(IMPEDANCE_HEADER);
    out.push('\n');
    for ((&f, &z), &s) in t.grid().points().iter().zip(t.z()).zip(t.status()) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(f),
            num(z.re),
            num(z.im),
            num(z.norm()),
            num(phase_deg(z)),
            s
        );
    }
    out
}

type MetaPairs = Vec<(String, String)>;

/// Data lines with their 1-based line numbers, after `#` metadata and the
/// required header. Metadata `key=value` pairs are returned separately.
fn split_csv<'a>(text: &'a str, header: &str) -> Result<(MetaPairs, Vec<(usize, &'a str)>)> {
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if !seen_header {
            if let Some(m) = l.strip_prefix('#') {
                let m = m.trim();
                match m.split_once('=') {
                    Some((k, v)) => meta.push((k.trim().to_owned(), v.trim().to_owned())),
                    None => meta.push((m.to_owned(), String::new())),
                }
                continue;
            }
            if l != header {
                return Err(Error::parse(line, format!("expected header `{header}`")));
            }
            seen_header = true;
            continue;
        }
        rows.push((line, l));
    }
    if !seen_header {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("missing header `{header}`"),
        ));
    }
    Ok((meta, rows))
}

fn fields(row: &str, line: usize, n: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = row.split(',').map(str::trim).collect();
    if f.len() != n {
        return Err(Error::parse(
            line,
            format!("expected {n} fields, found {}", f.len()),
        ));
    }
    Ok(f)
}

fn number(tok: &str, line: usize) -> Result<f64> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid number `{tok}`")))
}

fn grid_from(freqs: Vec<f64>, lines: &[usize]) -> Result<FrequencyGrid> {
    for i in 0..freqs.len() {
        let f = freqs[i];
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::parse(
                lines[i],
                format!("frequency must be finite and > 0 (got {f})"),
            ));
        }
        if i > 0 && f <= freqs[i - 1] {
            return Err(Error::parse(
                lines[i],
                format!("frequency {f} does not exceed previous {}", freqs[i - 1]),
            ));
        }
    }
    FrequencyGrid::new_allow_empty(freqs)
}

pub fn read_impedance_csv(text: &str) -> Result<ImpedanceTrace> {
    let (meta, rows) = split_csv(text, IMPEDANCE_HEADER)?;
    let mut freqs = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    let mut status = Vec::with_capacity(rows.len());
    let mut lines = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let f = fields(row, line, 6)?;
        let freq = number(f[0], line)?;
        let z = Complex64::new(number(f[1], line)?, number(f[2], line)?);
        number(f[3], line)?;
        number(f[4], line)?;
        let s: PointStatus = f[5].parse().map_err(|e: String| Error::parse(line, e))?;
        if s.is_ok() && !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::parse(line, "non-finite impedance on an ok row"));
        }
        freqs.push(freq);
        values.push(z);
        status.push(s);
        lines.push(line);
    }
    let grid = grid_from(freqs, &lines)?;
    let mut tm = TraceMeta::default();
    let mut cal_id = String::new();
    let mut source = None;
    for (k, v) in meta {
        match k.as_str() {
            "calibration" => cal_id = v,
            "source" => source = Some(v),
            "resampled" => tm.resampled = v == "true",
            "note" => tm.notes.push(v),
            _ => {}
        }
    }
    tm.name = source.clone();
    let mut z = ComplexTrace::with_status(grid, values, status)?;
    z.meta = tm;
    Ok(ImpedanceTrace::new(z, cal_id, source))
}

/// Γ (or any complex) trace as `freq_hz,re,im`.
pub fn write_trace_csv(t: &ComplexTrace) -> String {
    let mut out = String::new();
    for c in &t.meta.comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (f, z, _) in t.iter() {
        let _ = writeln!(out, "{},{},{}", num(f), num(z.re), num(z.im));
    }
    out
}

pub fn read_trace_csv(text: &str) -> Result<ComplexTrace> {
    let (meta, rows) = split_csv(text, TRACE_HEADER)?;
    let mut freqs = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for (line, row) in rows {
        let f = fields(row, line, 3)?;
        let z = Complex64::new(number(f[1], line)?, number(f[2], line)?);
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::parse(line, "non-finite value"));
        }
        freqs.push(number(f[0], line)?);
        values.push(z);
        lines.push(line);
    }
    let grid = grid_from(freqs, &lines)?;
    let mut t = ComplexTrace::new(grid, values)?;
    t.meta.comments = meta
        .into_iter()
        .map(|(k, v)| if v.is_empty() { k } else { format!("{k}={v}") })
        .collect();
    Ok(t)
}

/// Per-point comparison metrics.
pub fn write_compare_csv(r: &CompareReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# threshold_db={}", num(r.threshold_db));
    let _ = writeln!(out, "# band_count={}", r.band_count());
    let _ = writeln!(out, "# max_deviation_db={}", num(r.max_deviation_db));
    out.push_str(COMPARE_HEADER);
    out.push('\n');
    for p in &r.points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            num(p.freq_hz),
            num(p.ratio_db),
            num(p.phase_diff_deg),
            p.exceeds
        );
    }
    out
}

/// Deviation band list.
pub fn write_bands_csv(r: &CompareReport) -> String {
    let mut out = String::from(BANDS_HEADER);
    out.push('\n');
    for (i, b) in r.bands.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i + 1,
            num(b.f_lo_hz),
            num(b.f_hi_hz),
            b.n_points(),
            num(b.peak_abs_db)
        );
    }
    out
}
