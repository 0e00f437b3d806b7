use dmimp_core::benchsim::random::{random_bench, RandomRanges};
use dmimp_core::benchsim::{Spacing, Sweep, EXAMPLE_BENCH_TOML};
use dmimp_core::io::{
    parse_touchstone_1port, read_bench_config, read_calibration, read_impedance_csv,
    read_trace_csv, resample, write_bench_config, write_calibration, write_impedance_csv,
    write_touchstone_1port, write_trace_csv, CalibrationProvenance, DataFormat,
};
use dmimp_core::{
    solve_osl, synth_standards, Complex64, ComplexTrace, FrequencyGrid, ImpedanceTrace, PointStatus,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FORMATS: [DataFormat; 3] = [DataFormat::Ri, DataFormat::Ma, DataFormat::Db];

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * b.norm().max(1e-300)
}

/// Strictly increasing frequencies and values spanning many decades.
fn random_trace(rng: &mut impl Rng, n: usize) -> ComplexTrace {
    let mut f = rng.random_range(1.0..1e3);
    let mut freqs = Vec::with_capacity(n);
    for _ in 0..n {
        freqs.push(f);
        f *= 1.0 + rng.random_range(1e-6..0.5);
    }
    let values = (0..n)
        .map(|_| {
            let m = 10f64.powf(rng.random_range(-6.0..6.0));
            Complex64::from_polar(
                m,
                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            )
        })
        .collect();
    ComplexTrace::new(FrequencyGrid::new(freqs).unwrap(), values).unwrap()
}

fn assert_same(a: &ComplexTrace, b: &ComplexTrace) {
    assert_eq!(a.len(), b.len());
    for ((fa, za, _), (fb, zb, _)) in a.iter().zip(b.iter()) {
        assert!((fa - fb).abs() <= 1e-9 * fb, "freq {fa} vs {fb}");
        assert!(close(za, zb), "{za} vs {zb}");
    }
}

#[test]
fn touchstone_round_trips_in_every_format() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..1000 {
        let t = random_trace(&mut rng, 1 + i % 201);
        for fmt in FORMATS {
            let back = parse_touchstone_1port(&write_touchstone_1port(&t, fmt)).unwrap();
            assert_same(&back, &t);
        }
    }
}

#[test]
fn touchstone_format_chain_preserves_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let t = random_trace(&mut rng, 201);
    let ma = parse_touchstone_1port(&write_touchstone_1port(&t, DataFormat::Ma)).unwrap();
    let db = parse_touchstone_1port(&write_touchstone_1port(&ma, DataFormat::Db)).unwrap();
    let ri = parse_touchstone_1port(&write_touchstone_1port(&db, DataFormat::Ri)).unwrap();
    assert_same(&ri, &t);
}

#[test]
fn trace_csv_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..1000 {
        let t = random_trace(&mut rng, 1 + i % 201);
        assert_same(&read_trace_csv(&write_trace_csv(&t)).unwrap(), &t);
    }
}

#[test]
fn impedance_csv_round_trips_with_flags_and_metadata() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let flags = [PointStatus::NearOpen, PointStatus::IllConditioned];
    for i in 0..1000 {
        let t = random_trace(&mut rng, 1 + i % 201);
        let mut values = t.values().to_vec();
        let mut status = vec![PointStatus::Ok; values.len()];
        for _ in 0..(i % 4) {
            let k = rng.random_range(0..values.len());
            values[k] = Complex64::new(f64::NAN, f64::NAN);
            status[k] = flags[k % 2];
        }
        let mut z = ComplexTrace::with_status(t.grid().clone(), values, status.clone()).unwrap();
        z.meta.resampled = i % 2 == 0;
        let it = ImpedanceTrace::new(z, format!("cal{i}"), Some("meas.s1p".into()));
        let back = read_impedance_csv(&write_impedance_csv(&it)).unwrap();
        assert_eq!(back.status(), status.as_slice());
        assert_eq!(back.calibration_id, format!("cal{i}"));
        assert_eq!(back.source.as_deref(), Some("meas.s1p"));
        assert_eq!(back.meta().resampled, i % 2 == 0);
        for ((a, b), s) in back.z().iter().zip(it.z()).zip(&status) {
            if s.is_ok() {
                assert!(close(*a, *b), "{a} vs {b}");
            } else {
                assert!(a.re.is_nan());
            }
        }
    }
}

/// Ways to break a single data line. Each returns the replacement line.
fn corrupt(kind: usize, line: &str, prev_freq: Option<&str>, rng: &mut impl Rng) -> String {
    let toks: Vec<&str> = line.split_whitespace().collect();
    match kind {
        0 => toks[..2].join(" "),
        1 => format!("{line} 0.5"),
        2 => format!("{} {} abc", toks[0], toks[1]),
        3 => format!("{} nan {}", toks[0], toks[2]),
        4 => format!("{} {} {}", prev_freq.unwrap_or("0"), toks[1], toks[2]),
        5 => format!("-{} {} {}", toks[0], toks[1], toks[2]),
        6 => "# MHz S RI R 50".to_owned(),
        7 => format!("{}x {} {}", toks[0], toks[1], toks[2]),
        _ => {
            let n = rng.random_range(4..8);
            vec!["1"; n].join(" ")
        }
    }
}

#[test]
fn corrupted_touchstone_lines_are_reported_with_their_line_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for i in 0..2000 {
        let t = random_trace(&mut rng, 2 + i % 50);
        let text = write_touchstone_1port(&t, FORMATS[i % 3]);
        let lines: Vec<&str> = text.lines().collect();
        let data: Vec<usize> = (0..lines.len())
            .filter(|&k| !lines[k].starts_with('!') && !lines[k].starts_with('#'))
            .collect();
        let pos = rng.random_range(0..data.len());
        let k = data[pos];
        let prev = (pos > 0).then(|| lines[data[pos - 1]].split_whitespace().next().unwrap());
        let kind = rng.random_range(0..9);
        let mut broken: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        broken[k] = corrupt(kind, lines[k], prev, &mut rng);
        let res = parse_touchstone_1port(&(broken.join("\n") + "\n"));
        let err = res.expect_err(&format!("kind {kind} accepted: {}", broken[k]));
        assert_eq!(err.line(), Some(k + 1), "kind {kind}: {err}");
    }
}

#[test]
fn corrupted_csv_lines_are_reported_with_their_line_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for i in 0..1000 {
        let t = random_trace(&mut rng, 2 + i % 50);
        let it = ImpedanceTrace::new(t, "c", None);
        let text = write_impedance_csv(&it);
        let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
        let first_row = lines.iter().position(|l| l.starts_with("freq_hz")).unwrap() + 1;
        let k = rng.random_range(first_row..lines.len());
        let cols: Vec<String> = lines[k].split(',').map(str::to_owned).collect();
        lines[k] = match rng.random_range(0..5) {
            0 => cols[..5].join(","),
            1 => format!("{},extra", lines[k]),
            2 => format!(
                "{},{},zz,{},{},{}",
                cols[0], cols[1], cols[3], cols[4], cols[5]
            ),
            3 => format!(
                "{},{},{},{},{},bogus",
                cols[0], cols[1], cols[2], cols[3], cols[4]
            ),
            _ => format!(
                "{},{},{},{},{},ok",
                cols[0], "inf", cols[2], cols[3], cols[4]
            ),
        };
        let err = read_impedance_csv(&(lines.join("\n") + "\n")).unwrap_err();
        assert_eq!(err.line(), Some(k + 1), "{err}");
    }
}

proptest! {
    #[test]
    fn arbitrary_text_never_panics(s in "\\PC{0,400}") {
        let _ = parse_touchstone_1port(&s);
        let _ = read_impedance_csv(&s);
        let _ = read_trace_csv(&s);
    }

    #[test]
    fn hz_and_mhz_option_lines_give_identical_traces(
        rows in prop::collection::vec((0.001f64..10.0, -1.0f64..1.0, -1.0f64..1.0), 1..30),
    ) {
        let mut f_mhz = 0.0;
        let mut hz = String::from("# Hz S RI R 50\n");
        let mut mhz = String::from("# MHz S RI R 50\n");
        for (df, re, im) in &rows {
            f_mhz += df;
            hz.push_str(&format!("{} {re} {im}\n", f_mhz * 1e6));
            mhz.push_str(&format!("{f_mhz} {re} {im}\n"));
        }
        let (a, b) = (parse_touchstone_1port(&hz).unwrap(), parse_touchstone_1port(&mhz).unwrap());
        prop_assert!(a.grid().is_identical(b.grid()));
        prop_assert_eq!(a.values(), b.values());
    }
}

#[test]
fn calibration_file_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let b = random_bench(&mut rng, Sweep::conducted_band(), &RandomRanges::default());
        let cal = solve_osl(&synth_standards(&b).unwrap(), 50.0).unwrap();
        let prov = CalibrationProvenance {
            created_by: "test".into(),
            sources: vec!["open.s1p".into(), "short.s1p".into(), "load.s1p".into()],
        };
        let (back, p) = read_calibration(&write_calibration(&cal, &prov)).unwrap();
        assert_eq!(p, prov);
        assert_eq!(back.fingerprint(), cal.fingerprint());
        assert_eq!(back.status(), cal.status());
        for i in 0..cal.len() {
            let (a1, a2, a3, s) = cal.point(i);
            let (b1, b2, b3, _) = back.point(i);
            if s.is_ok() {
                assert_eq!((a1, a2, a3), (b1, b2, b3));
            }
        }
    }
}

#[test]
fn random_benches_round_trip_through_bench_file() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..50 {
        let mut b = random_bench(&mut rng, Sweep::conducted_band(), &RandomRanges::default());
        b.sweep.spacing = Spacing::Linear;
        b.noise.sigma = 1e-3;
        b.attenuator_db = Some(6.0);
        let back = read_bench_config(&write_bench_config(&b)).unwrap();
        assert_eq!(back, b);
    }
    let ex = read_bench_config(EXAMPLE_BENCH_TOML).unwrap();
    assert_eq!(read_bench_config(&write_bench_config(&ex)).unwrap(), ex);
}

#[test]
fn resampling_is_exact_on_source_grid_and_linear_in_log_frequency() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let t = random_trace(&mut rng, 50);
    let same = resample(&t, t.grid()).unwrap();
    assert_eq!(same.values(), t.values());
    assert!(same.meta.resampled);

    let p = t.grid().points();
    let mids: Vec<f64> = p.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
    let r = resample(&t, &FrequencyGrid::new(mids).unwrap()).unwrap();
    for (i, v) in r.values().iter().enumerate() {
        let mean = (t.values()[i] + t.values()[i + 1]) / 2.0;
        assert!((v - mean).norm() <= 1e-9 * (t.values()[i].norm() + t.values()[i + 1].norm()));
    }

    let outside = FrequencyGrid::new(vec![p[0] / 2.0]).unwrap();
    assert!(resample(&t, &outside).is_err());
}
