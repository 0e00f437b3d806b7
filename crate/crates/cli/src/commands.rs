use std::path::{Path, PathBuf};

use dmimp_core::benchsim::{mode_variants, synth_standards, EditSet};
use dmimp_core::calib::{conditioning_report, solve_osl_with, OslOptions};
use dmimp_core::io::{
    parse_touchstone_1port, read_bench_config_with, read_calibration, read_impedance_csv,
    read_trace_csv, resample, write_bands_csv, write_calibration, write_compare_csv,
    write_impedance_csv, write_touchstone_1port, write_trace_csv, CalibrationProvenance,
    DataFormat,
};
use dmimp_core::{
    compare, extract_impedance, synth_gamma, ComplexTrace, PointStatus, StandardsTriple,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::output::{
    in_file, read_text, sibling_with_suffix, write_atomic, Failure, EXIT_DEVIATION,
};

/// Environment variable naming a directory searched for bench files that are
/// not found as given.
pub const CONFIG_DIR_ENV: &str = "DMIMP_CONFIG_DIR";

fn tool_id() -> String {
    format!("dmimp {}", env!("CARGO_PKG_VERSION"))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn resolve_bench(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(CONFIG_DIR_ENV) {
        Some(dir) => {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                candidate
            } else {
                path.to_path_buf()
            }
        }
        None => path.to_path_buf(),
    }
}

/// `label=scale[,label=scale...]`
pub fn parse_edit_set(s: &str) -> Result<EditSet, String> {
    s.split(',')
        .map(|pair| {
            let (label, scale) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected label=scale, got `{pair}`"))?;
            let scale: f64 = scale
                .trim()
                .parse()
                .map_err(|_| format!("invalid scale `{scale}` for `{label}`"))?;
            Ok((label.trim().to_owned(), scale))
        })
        .collect()
}

#[derive(Serialize)]
struct ManifestFile {
    name: String,
    role: String,
    sha256: String,
}

#[derive(Serialize)]
struct ManifestVariant {
    file: String,
    edits: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct Manifest {
    created_by: String,
    bench_file: String,
    bench_sha256: String,
    seed: u64,
    sigma: f64,
    n_points: usize,
    f_start_hz: f64,
    f_stop_hz: f64,
    files: Vec<ManifestFile>,
    variants: Vec<ManifestVariant>,
}

pub struct SimulateArgs {
    pub bench: PathBuf,
    pub out_dir: PathBuf,
    pub standards: bool,
    pub variants: Vec<EditSet>,
    pub seed: Option<u64>,
    pub lenient: bool,
}

pub fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let bench_path = resolve_bench(&a.bench);
    let text = read_text(&bench_path)?;
    let on_bench = in_file(&bench_path);
    let mut bench = read_bench_config_with(&text, !a.lenient).map_err(&on_bench)?;
    if let Some(seed) = a.seed {
        bench.noise.seed = seed;
    }

    // Everything is computed before the first write so that a bad variant or
    // bench leaves no partial output behind.
    let header = |role: &str| {
        vec![
            format!("{} simulate: {role}", tool_id()),
            format!("bench sha256 {}", sha256_hex(text.as_bytes())),
            format!(
                "noise sigma {} seed {}",
                bench.noise.sigma, bench.noise.seed
            ),
        ]
    };
    let with_header = |mut t: ComplexTrace, role: &str| {
        t.meta.comments = header(role);
        t
    };
    let mut outputs: Vec<(String, String, ComplexTrace)> = vec![(
        "gamma_m.s1p".into(),
        "measurement".into(),
        with_header(synth_gamma(&bench, None).map_err(&on_bench)?, "measurement"),
    )];
    if a.standards {
        let s = synth_standards(&bench).map_err(&on_bench)?;
        for (name, t) in [
            ("open", s.gamma_open),
            ("short", s.gamma_short),
            ("load", s.gamma_load),
        ] {
            outputs.push((format!("{name}.s1p"), name.into(), with_header(t, name)));
        }
    }
    let mut variants = Vec::new();
    if !a.variants.is_empty() {
        let duts = mode_variants(&bench.dut, &a.variants).map_err(&on_bench)?;
        for (i, (dut, edits)) in duts.iter().skip(1).zip(&a.variants).enumerate() {
            let name = format!("gamma_m_v{}.s1p", i + 1);
            let role = format!("variant {}", i + 1);
            let t = synth_gamma(&bench, Some(dut)).map_err(&on_bench)?;
            outputs.push((name.clone(), role.clone(), with_header(t, &role)));
            variants.push(ManifestVariant {
                file: name,
                edits: edits.clone(),
            });
        }
    }

    let rendered: Vec<(String, String, String)> = outputs
        .into_iter()
        .map(|(name, role, t)| (name, role, write_touchstone_1port(&t, DataFormat::Ri)))
        .collect();
    let grid = bench.grid().map_err(&on_bench)?;
    let manifest = Manifest {
        created_by: tool_id(),
        bench_file: bench_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        bench_sha256: sha256_hex(text.as_bytes()),
        seed: bench.noise.seed,
        sigma: bench.noise.sigma,
        n_points: grid.len(),
        f_start_hz: bench.sweep.f_start_hz,
        f_stop_hz: bench.sweep.f_stop_hz,
        files: rendered
            .iter()
            .map(|(name, role, body)| ManifestFile {
                name: name.clone(),
                role: role.clone(),
                sha256: sha256_hex(body.as_bytes()),
            })
            .collect(),
        variants,
    };
    let manifest = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";

    std::fs::create_dir_all(&a.out_dir).map_err(|e| Failure::io(&a.out_dir, e))?;
    for (name, _, body) in &rendered {
        write_atomic(&a.out_dir.join(name), body)?;
    }
    write_atomic(&a.out_dir.join("manifest.json"), &manifest)?;
    println!(
        "wrote {} trace file(s) and manifest.json to {}",
        rendered.len(),
        a.out_dir.display()
    );
    Ok(())
}

fn read_s1p(path: &Path) -> Result<ComplexTrace, Failure> {
    let text = read_text(path)?;
    parse_touchstone_1port(&text).map_err(in_file(path))
}

fn file_label(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}

pub struct CalibrateArgs {
    pub open: PathBuf,
    pub short: PathBuf,
    pub load: PathBuf,
    pub r_load: f64,
    pub conditioning_floor: f64,
    pub out: PathBuf,
}

pub fn calibrate(a: &CalibrateArgs) -> Result<(), Failure> {
    let open = read_s1p(&a.open)?;
    let short = read_s1p(&a.short)?;
    let load = read_s1p(&a.load)?;
    for (path, t) in [(&a.short, &short), (&a.load, &load)] {
        if let Some(i) = open.grid().first_difference(t.grid()) {
            let freq = |g: &dmimp_core::FrequencyGrid| {
                g.points()
                    .get(i)
                    .map_or("(missing)".to_owned(), |f| format!("{f} Hz"))
            };
            return Err(Failure::invalid(format!(
                "{}: frequency grid differs from {} at point {} ({} vs {})",
                path.display(),
                a.open.display(),
                i + 1,
                freq(t.grid()),
                freq(open.grid()),
            )));
        }
    }
    if open.is_empty() {
        return Err(Failure::invalid(format!(
            "{}: no data rows",
            a.open.display()
        )));
    }
    let s = StandardsTriple::new(open, short, load).map_err(|e| Failure::invalid(e.to_string()))?;
    let opts = OslOptions {
        r_load: a.r_load,
        conditioning_floor: a.conditioning_floor,
        ..Default::default()
    };
    let cal = solve_osl_with(&s, &opts).map_err(|e| Failure::invalid(e.to_string()))?;
    let report = conditioning_report(&cal, &s).map_err(|e| Failure::invalid(e.to_string()))?;
    let prov = CalibrationProvenance {
        created_by: format!("{} calibrate", tool_id()),
        sources: [&a.open, &a.short, &a.load]
            .iter()
            .map(|p| file_label(p))
            .collect(),
    };
    write_atomic(&a.out, &write_calibration(&cal, &prov))?;

    println!(
        "calibration {}: {} points, {} flagged (floor {:e})",
        cal.fingerprint(),
        cal.len(),
        cal.flagged_count(),
        report.floor
    );
    for (lo, hi) in &report.flagged_bands {
        eprintln!("warning: ill-conditioned calibration between {lo} Hz and {hi} Hz");
    }
    Ok(())
}

pub struct ExtractArgs {
    pub cal: PathBuf,
    pub meas: PathBuf,
    pub out: PathBuf,
    pub resample: bool,
}

pub fn extract(a: &ExtractArgs) -> Result<(), Failure> {
    let (cal, _) = read_calibration(&read_text(&a.cal)?).map_err(in_file(&a.cal))?;
    let mut meas = read_s1p(&a.meas)?;
    if !meas.grid().is_identical(cal.grid()) {
        if !a.resample {
            let err = meas.grid().ensure_identical(cal.grid()).unwrap_err();
            return Err(Failure::invalid(format!(
                "{} does not share the calibration grid of {} ({err}); pass --resample to interpolate",
                a.meas.display(),
                a.cal.display()
            )));
        }
        meas = resample(&meas, cal.grid()).map_err(in_file(&a.meas))?;
        eprintln!(
            "warning: {} resampled onto the calibration grid",
            a.meas.display()
        );
    }
    meas.meta.name = Some(file_label(&a.meas));
    let z = extract_impedance(&meas, &cal).map_err(in_file(&a.meas))?;
    write_atomic(&a.out, &write_impedance_csv(&z))?;

    let count = |s: PointStatus| z.status().iter().filter(|&&x| x == s).count();
    println!(
        "extracted {} points: {} ok, {} near-open, {} ill-conditioned-cal",
        z.len(),
        z.ok_count(),
        count(PointStatus::NearOpen),
        count(PointStatus::IllConditioned)
    );
    Ok(())
}

pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    pub threshold_db: f64,
    pub out: PathBuf,
    pub fail_on_deviation: bool,
}

pub fn compare_cmd(a: &CompareArgs) -> Result<(), Failure> {
    let za = read_impedance_csv(&read_text(&a.a)?).map_err(in_file(&a.a))?;
    let zb = read_impedance_csv(&read_text(&a.b)?).map_err(in_file(&a.b))?;
    let report = compare(&za, &zb, a.threshold_db)
        .map_err(|e| Failure::invalid(format!("{} vs {}: {e}", a.a.display(), a.b.display())))?;
    let bands_path = sibling_with_suffix(&a.out, "_bands");
    write_atomic(&a.out, &write_compare_csv(&report))?;
    write_atomic(&bands_path, &write_bands_csv(&report))?;

    println!(
        "max deviation {:.4} dB, {} band(s) above {} dB",
        report.max_deviation_db,
        report.band_count(),
        report.threshold_db
    );
    for b in &report.bands {
        println!(
            "  band {} Hz .. {} Hz ({} points, peak {:.4} dB)",
            b.f_lo_hz,
            b.f_hi_hz,
            b.n_points(),
            b.peak_abs_db
        );
    }
    if a.fail_on_deviation && report.band_count() > 0 {
        return Err(Failure {
            code: EXIT_DEVIATION,
            msg: format!("{} deviation band(s) found", report.band_count()),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Touchstone(DataFormat),
    Csv,
}

pub fn convert(input: &Path, out: &Path, format: OutFormat) -> Result<(), Failure> {
    let text = read_text(input)?;
    let is_csv = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with("freq_hz,"));
    let trace = if is_csv {
        read_trace_csv(&text).map_err(in_file(input))?
    } else {
        parse_touchstone_1port(&text).map_err(in_file(input))?
    };
    let body = match format {
        OutFormat::Touchstone(f) => write_touchstone_1port(&trace, f),
        OutFormat::Csv => write_trace_csv(&trace),
    };
    write_atomic(out, &body)?;
    println!("converted {} points", trace.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edit_sets_parse() {
        assert_eq!(
            parse_edit_set("c_b=1.2, l_b=0.9").unwrap(),
            vec![("c_b".to_string(), 1.2), ("l_b".to_string(), 0.9)]
        );
        assert!(parse_edit_set("c_b").is_err());
        assert!(parse_edit_set("c_b=x").is_err());
    }
}
