//! Calibration coefficients `k1`, `k2`, `k3` of the bilinear map from the
//! measured reflection coefficient to the DUT impedance.
//!
//! Two independent routes produce the same set: [`k_from_abcd`] from a known
//! chain network, [`solve_osl`] from measured open/short/load standards.

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::compare::runs;
use crate::error::{Error, Result};
use crate::netcore::{
    AbcdNetwork, ComplexTrace, FrequencyGrid, PointStatus, ReferenceImpedance, TraceMeta,
    SINGULAR_EPS,
};

/// Default `|Γ_L − Γ_s|` floor below which a calibration point is flagged.
pub const DEFAULT_CONDITIONING_FLOOR: f64 = 1e-6;
/// Default load-standard resistance in ohms.
pub const DEFAULT_R_LOAD: f64 = 50.0;

/// Measured reflection coefficients of the three calibration standards.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardsTriple {
    pub gamma_open: ComplexTrace,
    pub gamma_short: ComplexTrace,
    pub gamma_load: ComplexTrace,
}

impl StandardsTriple {
    /// The three traces must share a grid. Flagged points are allowed and
    /// become singular calibration points.
    pub fn new(open: ComplexTrace, short: ComplexTrace, load: ComplexTrace) -> Result<Self> {
        open.grid()
            .ensure_identical(short.grid())
            .map_err(|e| e.in_trace("short"))?;
        open.grid()
            .ensure_identical(load.grid())
            .map_err(|e| e.in_trace("load"))?;
        Ok(Self {
            gamma_open: open,
            gamma_short: short,
            gamma_load: load,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.gamma_open.grid()
    }
}

/// Per-frequency calibration coefficients bound to the sweep they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSet {
    k1: ComplexTrace,
    k2: ComplexTrace,
    k3: ComplexTrace,
    status: Vec<PointStatus>,
    pub r_load: f64,
    pub z0: ReferenceImpedance,
    pub conditioning_floor: f64,
    /// Provenance and warnings (for example after resampling).
    pub notes: Vec<String>,
}

impl CalibrationSet {
    /// Assemble from raw per-point parts; used by the file reader.
    pub fn from_parts(
        grid: FrequencyGrid,
        k: [Vec<Complex64>; 3],
        status: Vec<PointStatus>,
        r_load: f64,
        z0: ReferenceImpedance,
    ) -> Result<Self> {
        let [k1, k2, k3] = k;
        for v in [&k1, &k2, &k3] {
            if v.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    got: v.len(),
                });
            }
        }
        if status.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: status.len(),
            });
        }
        if !(r_load > 0.0 && r_load.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "r_load must be > 0 (got {r_load})"
            )));
        }
        let mk = |v: Vec<Complex64>| {
            ComplexTrace::from_parts(grid.clone(), v, status.clone(), TraceMeta::default())
        };
        let cal = Self {
            k1: mk(k1),
            k2: mk(k2),
            k3: mk(k3),
            status,
            r_load,
            z0,
            conditioning_floor: DEFAULT_CONDITIONING_FLOOR,
            notes: Vec::new(),
        };
        for (name, t) in [("k1", &cal.k1), ("k2", &cal.k2), ("k3", &cal.k3)] {
            if let Some((f, _, _)) = t.iter().find(|(_, z, s)| s.is_ok() && !is_finite(*z)) {
                return Err(Error::InvalidParameter(format!(
                    "{name} at {f} Hz is not finite but flagged ok"
                )));
            }
        }
        Ok(cal)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.k1.grid()
    }

    pub fn k1(&self) -> &ComplexTrace {
        &self.k1
    }

    pub fn k2(&self) -> &ComplexTrace {
        &self.k2
    }

    pub fn k3(&self) -> &ComplexTrace {
        &self.k3
    }

    pub fn status(&self) -> &[PointStatus] {
        &self.status
    }

    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }

    /// `(k1, k2, k3, status)` at point `i`.
    pub fn point(&self, i: usize) -> (Complex64, Complex64, Complex64, PointStatus) {
        (
            self.k1.values()[i],
            self.k2.values()[i],
            self.k3.values()[i],
            self.status[i],
        )
    }

    pub fn flagged_count(&self) -> usize {
        self.status.iter().filter(|s| !s.is_ok()).count()
    }

    /// Short stable identifier derived from the grid and coefficients.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for &f in self.grid().points() {
            h.update(f.to_le_bytes());
        }
        for t in [&self.k1, &self.k2, &self.k3] {
            for z in t.values() {
                h.update(z.re.to_le_bytes());
                h.update(z.im.to_le_bytes());
            }
        }
        h.update(self.r_load.to_le_bytes());
        h.update(self.z0.ohms().to_le_bytes());
        hex::encode(&h.finalize()[..8])
    }
}

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Forward coefficients from the chain network `n`:
///
/// ```text
/// k1 = −(Z0·D + B) / (Z0·C + A)
/// k2 = −(Z0·D − B) / (Z0·C + A)
/// k3 =  (Z0·C − A) / (Z0·C + A)
/// ```
///
/// `|Z0·C + A| < 1e-30` flags the point singular.
pub fn k_from_abcd(n: &AbcdNetwork, z0: ReferenceImpedance) -> CalibrationSet {
    let r = z0.ohms();
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut k = [Vec::new(), Vec::new(), Vec::new()];
    let mut status = Vec::with_capacity(n.len());
    for m in n.matrices() {
        let den = r * m.c + m.a;
        if den.norm() < SINGULAR_EPS {
            for v in k.iter_mut() {
                v.push(nan);
            }
            status.push(PointStatus::Singular);
            continue;
        }
        k[0].push(-(r * m.d + m.b) / den);
        k[1].push(-(r * m.d - m.b) / den);
        k[2].push((r * m.c - m.a) / den);
        status.push(PointStatus::Ok);
    }
    CalibrationSet::from_parts(n.grid().clone(), k, status, DEFAULT_R_LOAD, z0)
        .expect("lengths match by construction")
}

/// Options for [`solve_osl_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OslOptions {
    /// Resistance of the load standard in ohms.
    pub r_load: f64,
    /// Minimum `|Γ_L − Γ_s|` for a point to be flagged ok.
    pub conditioning_floor: f64,
    /// Reference impedance recorded with the result.
    pub z0: ReferenceImpedance,
}

impl Default for OslOptions {
    fn default() -> Self {
        Self {
            r_load: DEFAULT_R_LOAD,
            conditioning_floor: DEFAULT_CONDITIONING_FLOOR,
            z0: ReferenceImpedance::default(),
        }
    }
}

/// Solve for the coefficients from open/short/load standards with a load
/// resistance `r_load` and default conditioning floor.
pub fn solve_osl(s: &StandardsTriple, r_load: f64) -> Result<CalibrationSet> {
    solve_osl_with(
        s,
        &OslOptions {
            r_load,
            ..OslOptions::default()
        },
    )
}

/// ```text
/// k1 = R_L · (Γ_L − Γ_o) / (Γ_L − Γ_s)
/// k2 = R_L · Γ_s · (Γ_o − Γ_L) / (Γ_L − Γ_s)
/// k3 = −Γ_o
/// ```
///
/// `R_L` is the load-standard resistance, 50 Ω for the usual standard.
pub fn solve_osl_with(s: &StandardsTriple, opts: &OslOptions) -> Result<CalibrationSet> {
    if !(opts.r_load > 0.0 && opts.r_load.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "r_load must be finite and > 0 (got {})",
            opts.r_load
        )));
    }
    if opts.conditioning_floor.is_nan() || opts.conditioning_floor < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "conditioning floor must be >= 0 (got {})",
            opts.conditioning_floor
        )));
    }
    let rl = opts.r_load;
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let n = s.grid().len();
    let mut k = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    let mut status = Vec::with_capacity(n);
    let pts = s
        .gamma_open
        .iter()
        .zip(s.gamma_short.iter())
        .zip(s.gamma_load.iter());
    for (((_, go, so), (_, gs, ss)), (_, gl, sl)) in pts {
        if !(so.is_ok() && ss.is_ok() && sl.is_ok()) {
            k.iter_mut().for_each(|v| v.push(nan));
            status.push(PointStatus::Singular);
            continue;
        }
        let den = gl - gs;
        let k1 = rl * (gl - go) / den;
        let k2 = rl * gs * (go - gl) / den;
        let k3 = -go;
        let ok = den.norm() >= opts.conditioning_floor && is_finite(k1) && is_finite(k2);
        let (k1, k2) = if is_finite(k1) && is_finite(k2) {
            (k1, k2)
        } else {
            (nan, nan)
        };
        k[0].push(k1);
        k[1].push(k2);
        k[2].push(k3);
        status.push(if ok {
            PointStatus::Ok
        } else {
            PointStatus::IllConditioned
        });
    }
    let mut cal = CalibrationSet::from_parts(s.grid().clone(), k, status, rl, opts.z0)?;
    cal.conditioning_floor = opts.conditioning_floor;
    Ok(cal)
}

/// Geometry of the three standards at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningPoint {
    pub freq_hz: f64,
    /// `|Γ_L − Γ_s|`, the OSL denominator.
    pub load_short: f64,
    /// `|Γ_o − Γ_L|`
    pub open_load: f64,
    /// `|Γ_o − Γ_s|`
    pub open_short: f64,
    /// Smallest of the three pairwise distances.
    pub min_pairwise: f64,
    pub flagged: bool,
}

/// Conditioning diagnostics for a calibration and the standards it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningReport {
    pub floor: f64,
    pub points: Vec<ConditioningPoint>,
    /// Maximal runs of flagged points as `(f_lo, f_hi)` in Hz.
    pub flagged_bands: Vec<(f64, f64)>,
}

impl ConditioningReport {
    pub fn flagged_count(&self) -> usize {
        self.points.iter().filter(|p| p.flagged).count()
    }
}

/// A point is flagged when the calibration flagged it or the standards'
/// minimum pairwise distance falls below the calibration's floor.
pub fn conditioning_report(c: &CalibrationSet, s: &StandardsTriple) -> Result<ConditioningReport> {
    c.grid().ensure_identical(s.grid())?;
    let floor = c.conditioning_floor;
    let points: Vec<ConditioningPoint> = (0..c.len())
        .map(|i| {
            let go = s.gamma_open.values()[i];
            let gs = s.gamma_short.values()[i];
            let gl = s.gamma_load.values()[i];
            let load_short = (gl - gs).norm();
            let open_load = (go - gl).norm();
            let open_short = (go - gs).norm();
            let min_pairwise = load_short.min(open_load).min(open_short);
            ConditioningPoint {
                freq_hz: c.grid().points()[i],
                load_short,
                open_load,
                open_short,
                min_pairwise,
                flagged: !c.status()[i].is_ok() || min_pairwise.is_nan() || min_pairwise < floor,
            }
        })
        .collect();
    let mask: Vec<bool> = points.iter().map(|p| p.flagged).collect();
    let flagged_bands = runs(&mask)
        .into_iter()
        .map(|(a, b)| (points[a].freq_hz, points[b].freq_hz))
        .collect();
    Ok(ConditioningReport {
        floor,
        points,
        flagged_bands,
    })
}
