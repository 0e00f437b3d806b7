use dmimp_core::{
    impedance_from_reflection, reflection_from_impedance, Abcd, AbcdNetwork, Complex64,
    ComplexTrace, FrequencyGrid, PointStatus, ReferenceImpedance,
};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

fn log_mag() -> impl Strategy<Value = f64> {
    (-3.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

fn complex_val() -> impl Strategy<Value = Complex64> {
    (log_mag(), -std::f64::consts::PI..std::f64::consts::PI)
        .prop_map(|(m, a)| Complex64::from_polar(m, a))
}

/// A reciprocal element: series impedance, shunt admittance or ideal transformer.
fn element() -> impl Strategy<Value = Abcd> {
    prop_oneof![
        complex_val().prop_map(Abcd::series),
        complex_val().prop_map(Abcd::shunt),
        (0.25f64..4.0).prop_map(Abcd::transformer),
    ]
}

/// Elements that keep Γ away from ±1, where the cross-ratio is well conditioned.
fn moderate_element() -> impl Strategy<Value = Abcd> {
    let z = ((-1.0f64..2.5).prop_map(|e| 10f64.powf(e)), -1.5f64..1.5)
        .prop_map(|(m, a)| Complex64::from_polar(m, a));
    prop_oneof![
        z.clone().prop_map(Abcd::series),
        z.prop_map(|z| Abcd::shunt(1.0 / z)),
        (0.5f64..2.0).prop_map(Abcd::transformer),
    ]
}

fn norm(m: &Abcd) -> f64 {
    m.entries().iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
}

fn grid() -> FrequencyGrid {
    FrequencyGrid::log_spaced(150e3, 30e6, 7).unwrap()
}

fn net(m: Abcd) -> AbcdNetwork {
    AbcdNetwork::from_fn(&grid(), |_| m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn cascade_is_associative(a in element(), b in element(), c in element()) {
        let left = net(a).cascade(&net(b)).unwrap().cascade(&net(c)).unwrap();
        let right = net(a).cascade(&net(b).cascade(&net(c)).unwrap()).unwrap();
        let scale = norm(&a) * norm(&b) * norm(&c);
        for (l, r) in left.matrices().iter().zip(right.matrices()) {
            for (x, y) in l.entries().iter().zip(r.entries()) {
                prop_assert!((x - y).norm() <= 1e-12 * scale, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn reciprocal_cascades_have_unit_determinant(elems in prop::collection::vec(element(), 1..8)) {
        let mut total = AbcdNetwork::identity(&grid());
        let mut scale = 1.0;
        for m in &elems {
            total = total.cascade(&net(*m)).unwrap();
            scale *= norm(m);
        }
        for det in total.determinants() {
            // Rounding in A·D − B·C grows with the product of entry magnitudes.
            prop_assert!((det - 1.0).norm() <= 1e-9f64.max(1e-15 * scale * scale), "det {det}");
        }
    }

    #[test]
    fn series_elements_compose_by_addition(z1 in complex_val(), z2 in complex_val()) {
        let g = grid();
        let a = AbcdNetwork::series(&ComplexTrace::constant(&g, z1).unwrap());
        let b = AbcdNetwork::series(&ComplexTrace::constant(&g, z2).unwrap());
        let joined = AbcdNetwork::series(&ComplexTrace::constant(&g, z1 + z2).unwrap());
        let cascaded = a.cascade(&b).unwrap();
        for (x, y) in cascaded.matrices().iter().zip(joined.matrices()) {
            prop_assert_eq!(x.a, y.a);
            prop_assert_eq!(x.c, y.c);
            prop_assert_eq!(x.d, y.d);
            prop_assert!((x.b - y.b).norm() <= 1e-15 * (z1.norm() + z2.norm()));
        }
    }

    #[test]
    fn passive_impedance_survives_reflection_round_trip(
        mag in (-1.0f64..4.0).prop_map(|e| 10f64.powf(e)),
        angle in -FRAC_PI_2..FRAC_PI_2,
    ) {
        let z = Complex64::from_polar(mag, angle);
        let g = grid();
        let r = ReferenceImpedance::default();
        let back = impedance_from_reflection(
            &reflection_from_impedance(&ComplexTrace::constant(&g, z).unwrap(), r),
            r,
        );
        for (v, s) in back.values().iter().zip(back.status()) {
            prop_assert_eq!(*s, PointStatus::Ok);
            prop_assert!((v - z).norm() <= 1e-12 * z.norm(), "{v} vs {z}");
        }
    }

    #[test]
    fn reflection_survives_impedance_round_trip(
        mag in 0.0f64..(1.0 - 1e-6),
        angle in -std::f64::consts::PI..std::f64::consts::PI,
        z0 in 1.0f64..200.0,
    ) {
        let gamma = Complex64::from_polar(mag, angle);
        let g = grid();
        let r = ReferenceImpedance::new(z0).unwrap();
        let back = reflection_from_impedance(
            &impedance_from_reflection(&ComplexTrace::constant(&g, gamma).unwrap(), r),
            r,
        );
        for v in back.values() {
            prop_assert!((v - gamma).norm() <= 1e-12, "{v} vs {gamma}");
        }
    }

    /// A terminated two-port and the Γ conversion are both Möbius maps, so
    /// the cross-ratio of four loads survives all the way to Γ.
    #[test]
    fn cross_ratio_is_preserved_through_chain_and_conversion(
        elems in prop::collection::vec(moderate_element(), 1..4),
        loads in prop::array::uniform4((0.0f64..3.0, -2.0f64..2.0)),
    ) {
        let g = FrequencyGrid::new(vec![1e6]).unwrap();
        let mut chain = AbcdNetwork::identity(&g);
        for m in &elems {
            chain = chain.cascade(&AbcdNetwork::from_fn(&g, |_| *m)).unwrap();
        }
        let zs: Vec<Complex64> = loads
            .iter()
            .map(|&(re, im)| Complex64::new(10f64.powf(re), 10f64.powf(re) * im))
            .collect();
        let gammas: Vec<Complex64> = zs
            .iter()
            .map(|z| {
                let zin = chain.input_impedance(&ComplexTrace::constant(&g, *z).unwrap()).unwrap();
                reflection_from_impedance(&zin, ReferenceImpedance::default()).values()[0]
            })
            .collect();
        let cr = |p: &[Complex64]| (p[0] - p[2]) * (p[1] - p[3]) / ((p[0] - p[3]) * (p[1] - p[2]));
        // Nearly coincident points lose digits to cancellation in the differences.
        let separated = |p: &[Complex64]| {
            (0..4).all(|i| (i + 1..4).all(|j| (p[i] - p[j]).norm() >= 1e-2 * (p[i].norm() + p[j].norm())))
        };
        prop_assume!(separated(&zs) && separated(&gammas));
        let (a, b) = (cr(&zs), cr(&gammas));
        prop_assume!(a.is_finite() && a.norm() > 1e-6 && a.norm() < 1e6);
        prop_assert!((a - b).norm() <= 1e-9 * a.norm(), "{a} vs {b}");
    }
}

#[test]
fn identity_network_returns_load_exactly() {
    let g = grid();
    let load = ComplexTrace::from_fn(&g, |f| Complex64::new(f.sqrt(), -1.0 / f)).unwrap();
    let z = AbcdNetwork::identity(&g).input_impedance(&load).unwrap();
    assert_eq!(z.values(), load.values());
}

#[test]
fn ideal_transformer_scales_impedance_by_turns_ratio_squared() {
    let g = grid();
    let t = AbcdNetwork::transformer(3.0, &g).unwrap();
    let z = t
        .input_impedance(&ComplexTrace::constant(&g, Complex64::new(10.0, 5.0)).unwrap())
        .unwrap();
    for v in z.values() {
        assert!((v - Complex64::new(90.0, 45.0)).norm() < 1e-12);
    }
}

#[test]
fn matched_line_presents_its_characteristic_impedance() {
    let g = grid();
    let line = AbcdNetwork::transmission_line(100.0, 3.7, 2e8, &g).unwrap();
    let z = line
        .input_impedance(&ComplexTrace::constant(&g, Complex64::new(100.0, 0.0)).unwrap())
        .unwrap();
    for v in z.values() {
        assert!((v - Complex64::new(100.0, 0.0)).norm() < 1e-9);
    }
}
