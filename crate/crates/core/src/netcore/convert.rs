use num_complex::Complex64;

use super::trace::{ComplexTrace, PointStatus};
use super::{ReferenceImpedance, SINGULAR_EPS};

/// `Γ = (Z − Z0) / (Z + Z0)`. Open points map to `Γ = 1`; `Z = −Z0` is
/// flagged singular.
pub fn reflection_from_impedance(z: &ComplexTrace, z0: ReferenceImpedance) -> ComplexTrace {
    let r = Complex64::new(z0.ohms(), 0.0);
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let (values, status) = z
        .iter()
        .map(|(_, z, s)| match s {
            PointStatus::Open => (Complex64::new(1.0, 0.0), PointStatus::Ok),
            PointStatus::Ok => {
                let den = z + r;
                if den.norm() < SINGULAR_EPS {
                    (nan, PointStatus::Singular)
                } else {
                    ((z - r) / den, PointStatus::Ok)
                }
            }
            other => (nan, other),
        })
        .unzip();
    ComplexTrace::from_parts(z.grid().clone(), values, status, z.meta.clone())
}

/// `Z = Z0 · (1 + Γ) / (1 − Γ)`. `Γ = 1` is flagged open.
pub fn impedance_from_reflection(g: &ComplexTrace, z0: ReferenceImpedance) -> ComplexTrace {
    let one = Complex64::new(1.0, 0.0);
    let (values, status) = g
        .iter()
        .map(|(_, g, s)| match s {
            PointStatus::Ok => {
                let den = one - g;
                if den.norm() < SINGULAR_EPS {
                    (Complex64::new(f64::INFINITY, 0.0), PointStatus::Open)
                } else {
                    (z0.ohms() * (one + g) / den, PointStatus::Ok)
                }
            }
            other => (Complex64::new(f64::NAN, f64::NAN), other),
        })
        .unzip();
    ComplexTrace::from_parts(g.grid().clone(), values, status, g.meta.clone())
}
