use dmimp_core::benchsim::{mode_variants, EXAMPLE_BENCH_TOML};
use dmimp_core::io::read_bench_config;
use dmimp_core::{
    compare, extract_batch, extract_impedance, solve_osl, synth_gamma, synth_standards, BenchModel,
    Complex64, ComplexTrace, ImpedanceTrace,
};

fn example() -> BenchModel {
    read_bench_config(EXAMPLE_BENCH_TOML).unwrap()
}

#[test]
fn example_bench_recovers_dut_through_full_pipeline() {
    let b = example();
    let cal = solve_osl(&synth_standards(&b).unwrap(), 50.0).unwrap();
    assert_eq!(cal.flagged_count(), 0);
    let z = extract_impedance(&synth_gamma(&b, None).unwrap(), &cal).unwrap();
    let truth = b.dut_impedance().unwrap();
    assert_eq!(z.ok_count(), 201);
    for (a, t) in z.z().iter().zip(truth.values()) {
        assert!((a - t).norm() <= 1e-9 * t.norm(), "{a} vs {t}");
    }
}

#[test]
fn scaled_branch_capacitor_shows_a_band_at_its_resonance() {
    let b = example();
    let edits = vec![vec![], vec![("c_b".to_string(), 1.2)]];
    let variants = mode_variants(&b.dut, &edits).unwrap();
    assert_eq!(variants.len(), 3);
    assert_eq!(variants[0], b.dut);
    assert_eq!(variants[1], b.dut);

    let cal = solve_osl(&synth_standards(&b).unwrap(), 50.0).unwrap();
    let named: Vec<(String, ComplexTrace)> = variants
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("v{i}"), synth_gamma(&b, Some(v)).unwrap()))
        .collect();
    let traces = extract_batch(&named, &cal).unwrap();

    let same = compare(&traces[0], &traces[1], 3.0).unwrap();
    assert!(same.bands.is_empty());
    assert_eq!(same.max_deviation_db, 0.0);

    let f0 = 1.0 / (2.0 * std::f64::consts::PI * (1e-6f64 * 1e-9).sqrt());
    let diff = compare(&traces[0], &traces[2], 3.0).unwrap();
    assert!(!diff.bands.is_empty());
    let g = cal.grid();
    let hit = diff
        .bands
        .iter()
        .find(|band| band.f_lo_hz <= f0 * 1.1 && band.f_hi_hz >= f0 / 1.2);
    assert!(hit.is_some(), "no band near {f0}: {:?}", diff.bands);
    let covered: usize = diff.bands.iter().map(|b| b.n_points()).sum();
    assert!(
        covered < g.len() / 4,
        "bands not localized: {:?}",
        diff.bands
    );
}

#[test]
fn doubled_trace_gives_one_full_span_band() {
    let b = example();
    let cal = solve_osl(&synth_standards(&b).unwrap(), 50.0).unwrap();
    let a = extract_impedance(&synth_gamma(&b, None).unwrap(), &cal).unwrap();
    let doubled = ImpedanceTrace::new(
        a.as_trace().map_values(|z| z * Complex64::new(2.0, 0.0)),
        "x",
        None,
    );
    let r = compare(&doubled, &a, 3.0).unwrap();
    assert_eq!(r.bands.len(), 1);
    assert_eq!(r.bands[0].first_index, 0);
    assert_eq!(r.bands[0].last_index, a.len() - 1);
    assert!((r.max_deviation_db - 6.0206).abs() < 1e-4);
}
