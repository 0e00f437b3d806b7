//! Calibration file: versioned JSON, one frequency point per line.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calib::CalibrationSet;
use crate::error::{Error, Result};
use crate::netcore::{FrequencyGrid, PointStatus, ReferenceImpedance};

pub const CALIBRATION_SCHEMA: &str = "dmimp-calibration";
pub const CALIBRATION_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Header {
    schema: String,
    schema_version: u32,
    created_by: String,
    sources: Vec<String>,
    z0_ohm: f64,
    r_load_ohm: f64,
    conditioning_floor: f64,
    fingerprint: String,
    notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Point {
    freq_hz: f64,
    k1: Option<[f64; 2]>,
    k2: Option<[f64; 2]>,
    k3: Option<[f64; 2]>,
    status: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileBody {
    schema: String,
    schema_version: u32,
    created_by: String,
    sources: Vec<String>,
    z0_ohm: f64,
    r_load_ohm: f64,
    conditioning_floor: f64,
    #[allow(dead_code)]
    fingerprint: String,
    notes: Vec<String>,
    points: Vec<Point>,
}

/// Creation metadata stored with a calibration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CalibrationProvenance {
    pub created_by: String,
    /// Names of the standards (or network) the coefficients came from.
    pub sources: Vec<String>,
}

fn pair(z: Complex64) -> Option<[f64; 2]> {
    (z.re.is_finite() && z.im.is_finite()).then_some([z.re, z.im])
}

fn unpair(p: Option<[f64; 2]>) -> Complex64 {
    p.map_or(Complex64::new(f64::NAN, f64::NAN), |[re, im]| {
        Complex64::new(re, im)
    })
}

pub fn write_calibration(cal: &CalibrationSet, prov: &CalibrationProvenance) -> String {
    let header = Header {
        schema: CALIBRATION_SCHEMA.into(),
        schema_version: CALIBRATION_SCHEMA_VERSION,
        created_by: prov.created_by.clone(),
        sources: prov.sources.clone(),
        z0_ohm: cal.z0.ohms(),
        r_load_ohm: cal.r_load,
        conditioning_floor: cal.conditioning_floor,
        fingerprint: cal.fingerprint(),
        notes: cal.notes.clone(),
    };
    let head = serde_json::to_string_pretty(&header).expect("header serializes");
    // reopen the object to append the points array, one point per line
    let mut out = head.trim_end().trim_end_matches('}').trim_end().to_owned();
    out.push_str(",\n  \"points\": [");
    for i in 0..cal.len() {
        let (k1, k2, k3, s) = cal.point(i);
        let p = Point {
            freq_hz: cal.grid().points()[i],
            k1: pair(k1),
            k2: pair(k2),
            k3: pair(k3),
            status: s.as_str().into(),
        };
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        out.push_str(&serde_json::to_string(&p).expect("point serializes"));
    }
    out.push_str(if cal.is_empty() {
        "]\n}\n"
    } else {
        "\n  ]\n}\n"
    });
    out
}

pub fn read_calibration(text: &str) -> Result<(CalibrationSet, CalibrationProvenance)> {
    let body: FileBody = serde_json::from_str(text)
        .map_err(|e| Error::CalibrationFile(format!("line {}: {e}", e.line())))?;
    let h = &body;
    if h.schema != CALIBRATION_SCHEMA {
        return Err(Error::CalibrationFile(format!(
            "unknown schema `{}`",
            h.schema
        )));
    }
    if h.schema_version != CALIBRATION_SCHEMA_VERSION {
        return Err(Error::CalibrationFile(format!(
            "unsupported schema_version {} (this build reads {CALIBRATION_SCHEMA_VERSION})",
            h.schema_version
        )));
    }
    let n = body.points.len();
    let mut freqs = Vec::with_capacity(n);
    let mut k: [Vec<Complex64>; 3] = Default::default();
    let mut status = Vec::with_capacity(n);
    for (i, p) in body.points.iter().enumerate() {
        freqs.push(p.freq_hz);
        k[0].push(unpair(p.k1));
        k[1].push(unpair(p.k2));
        k[2].push(unpair(p.k3));
        status.push(
            p.status
                .parse::<PointStatus>()
                .map_err(|e| Error::CalibrationFile(format!("point {i}: {e}")))?,
        );
    }
    let grid =
        FrequencyGrid::new_allow_empty(freqs).map_err(|e| Error::CalibrationFile(e.to_string()))?;
    let z0 =
        ReferenceImpedance::new(h.z0_ohm).map_err(|e| Error::CalibrationFile(e.to_string()))?;
    let mut cal = CalibrationSet::from_parts(grid, k, status, h.r_load_ohm, z0)
        .map_err(|e| Error::CalibrationFile(e.to_string()))?;
    cal.conditioning_floor = h.conditioning_floor;
    cal.notes = h.notes.clone();
    Ok((
        cal,
        CalibrationProvenance {
            created_by: h.created_by.clone(),
            sources: h.sources.clone(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calib::{k_from_abcd, solve_osl, StandardsTriple};
    use crate::netcore::{AbcdNetwork, ComplexTrace};

    #[test]
    fn round_trip_is_exact() {
        let g = FrequencyGrid::log_spaced(150e3, 30e6, 7).unwrap();
        let net = AbcdNetwork::transmission_line(80.0, 2.0, 2e8, &g).unwrap();
        let mut cal = k_from_abcd(&net, ReferenceImpedance::default());
        cal.notes.push("hello".into());
        let prov = CalibrationProvenance {
            created_by: "test".into(),
            sources: vec!["a.s1p".into()],
        };
        let text = write_calibration(&cal, &prov);
        assert_eq!(
            text.lines().filter(|l| l.contains("\"freq_hz\"")).count(),
            7
        );
        let (back, p) = read_calibration(&text).unwrap();
        assert_eq!(back, cal);
        assert_eq!(p, prov);
    }

    #[test]
    fn flagged_points_survive() {
        let g = FrequencyGrid::new(vec![1e6, 2e6]).unwrap();
        let same = ComplexTrace::constant(&g, Complex64::new(0.2, 0.0)).unwrap();
        let cal = solve_osl(
            &StandardsTriple::new(same.clone(), same.clone(), same).unwrap(),
            50.0,
        )
        .unwrap();
        let (back, _) = read_calibration(&write_calibration(&cal, &Default::default())).unwrap();
        assert_eq!(back.status(), cal.status());
        assert!(back.k1().values()[0].re.is_nan());
    }

    #[test]
    fn rejects_bad_files() {
        let g = FrequencyGrid::new(vec![1e6]).unwrap();
        let cal = k_from_abcd(&AbcdNetwork::identity(&g), ReferenceImpedance::default());
        let text = write_calibration(&cal, &Default::default());
        assert!(
            read_calibration(&text.replace("\"schema_version\": 1", "\"schema_version\": 9"))
                .is_err()
        );
        assert!(read_calibration(&text.replace("\"ok\"", "\"fine\"")).is_err());
        assert!(read_calibration(&text.replace("\"notes\"", "\"extra\": 1, \"notes\"")).is_err());
        assert!(read_calibration("{").is_err());
    }

    #[test]
    fn empty_calibration() {
        let cal = k_from_abcd(
            &AbcdNetwork::identity(&FrequencyGrid::empty()),
            ReferenceImpedance::default(),
        );
        let (back, _) = read_calibration(&write_calibration(&cal, &Default::default())).unwrap();
        assert!(back.is_empty());
    }
}
