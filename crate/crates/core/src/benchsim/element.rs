use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::netcore::{AbcdNetwork, ComplexTrace, FrequencyGrid};

/// Node of a lumped loop-impedance tree.
#[derive(Debug, Clone, PartialEq)]
pub enum LoopElement {
    Resistor {
        ohms: f64,
        label: Option<String>,
    },
    Inductor {
        henries: f64,
        label: Option<String>,
    },
    Capacitor {
        farads: f64,
        label: Option<String>,
    },
    Series {
        elements: Vec<LoopElement>,
        label: Option<String>,
    },
    Parallel {
        elements: Vec<LoopElement>,
        label: Option<String>,
    },
    /// Lossless line. A two-port: only valid in series position of a loop
    /// (LISN or cable), never inside a parallel group or the DUT.
    TransmissionLine {
        z0_ohm: f64,
        length_m: f64,
        velocity_m_per_s: f64,
        label: Option<String>,
    },
}

impl LoopElement {
    pub fn resistor(ohms: f64) -> Self {
        LoopElement::Resistor { ohms, label: None }
    }

    pub fn inductor(henries: f64) -> Self {
        LoopElement::Inductor {
            henries,
            label: None,
        }
    }

    pub fn capacitor(farads: f64) -> Self {
        LoopElement::Capacitor {
            farads,
            label: None,
        }
    }

    pub fn series(elements: Vec<LoopElement>) -> Self {
        LoopElement::Series {
            elements,
            label: None,
        }
    }

    pub fn parallel(elements: Vec<LoopElement>) -> Self {
        LoopElement::Parallel {
            elements,
            label: None,
        }
    }

    pub fn tline(z0_ohm: f64, length_m: f64, velocity_m_per_s: f64) -> Self {
        LoopElement::TransmissionLine {
            z0_ohm,
            length_m,
            velocity_m_per_s,
            label: None,
        }
    }

    /// Builder-style label setter.
    pub fn labeled(mut self, name: impl Into<String>) -> Self {
        *self.label_mut() = Some(name.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            LoopElement::Resistor { label, .. }
            | LoopElement::Inductor { label, .. }
            | LoopElement::Capacitor { label, .. }
            | LoopElement::Series { label, .. }
            | LoopElement::Parallel { label, .. }
            | LoopElement::TransmissionLine { label, .. } => label.as_deref(),
        }
    }

    fn label_mut(&mut self) -> &mut Option<String> {
        match self {
            LoopElement::Resistor { label, .. }
            | LoopElement::Inductor { label, .. }
            | LoopElement::Capacitor { label, .. }
            | LoopElement::Series { label, .. }
            | LoopElement::Parallel { label, .. }
            | LoopElement::TransmissionLine { label, .. } => label,
        }
    }

    fn invalid(&self, msg: impl Into<String>) -> Error {
        Error::InvalidElement {
            label: self.label().map(str::to_owned),
            msg: msg.into(),
        }
    }

    /// Check values and structure. `allow_two_port` permits transmission
    /// lines in series position; `allow_empty` permits empty series groups
    /// (an empty loop section is a through connection).
    pub fn validate(&self, allow_two_port: bool, allow_empty: bool) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(self.invalid(format!("{what} must be finite and > 0 (got {v})")))
            }
        };
        match self {
            LoopElement::Resistor { ohms, .. } => positive(*ohms, "resistance"),
            LoopElement::Inductor { henries, .. } => positive(*henries, "inductance"),
            LoopElement::Capacitor { farads, .. } => positive(*farads, "capacitance"),
            LoopElement::TransmissionLine {
                z0_ohm,
                length_m,
                velocity_m_per_s,
                ..
            } => {
                if !allow_two_port {
                    return Err(self.invalid(
                        "a transmission line is a two-port; it may only appear in series position of the lisn or cable",
                    ));
                }
                positive(*z0_ohm, "characteristic impedance")?;
                positive(*length_m, "length")?;
                positive(*velocity_m_per_s, "velocity")
            }
            LoopElement::Series { elements, .. } => {
                if elements.is_empty() && !allow_empty {
                    return Err(self.invalid("empty series group"));
                }
                elements
                    .iter()
                    .try_for_each(|e| e.validate(allow_two_port, false))
            }
            LoopElement::Parallel { elements, .. } => {
                if elements.is_empty() {
                    return Err(self.invalid("empty parallel group"));
                }
                elements.iter().try_for_each(|e| e.validate(false, false))
            }
        }
    }

    /// One-port impedance at angular frequency `omega`.
    pub fn impedance_at(&self, omega: f64) -> Result<Complex64> {
        Ok(match self {
            LoopElement::Resistor { ohms, .. } => Complex64::new(*ohms, 0.0),
            LoopElement::Inductor { henries, .. } => Complex64::new(0.0, omega * henries),
            LoopElement::Capacitor { farads, .. } => Complex64::new(0.0, -1.0 / (omega * farads)),
            LoopElement::Series { elements, .. } => {
                if elements.is_empty() {
                    return Err(self.invalid("empty series group"));
                }
                let mut sum = Complex64::new(0.0, 0.0);
                for e in elements {
                    sum += e.impedance_at(omega)?;
                }
                sum
            }
            LoopElement::Parallel { elements, .. } => {
                if elements.is_empty() {
                    return Err(self.invalid("empty parallel group"));
                }
                let mut y = Complex64::new(0.0, 0.0);
                for e in elements {
                    let z = e.impedance_at(omega)?;
                    if z == Complex64::new(0.0, 0.0) {
                        return Ok(z);
                    }
                    y += z.inv();
                }
                y.inv()
            }
            LoopElement::TransmissionLine { .. } => {
                return Err(self.invalid("a transmission line has no one-port impedance"))
            }
        })
    }

    /// Impedance over a grid. Transmission lines are rejected here; they
    /// enter a bench through [`LoopElement::loop_network`].
    pub fn eval_impedance(&self, grid: &FrequencyGrid) -> Result<ComplexTrace> {
        let values = grid
            .omegas()
            .map(|w| self.impedance_at(w))
            .collect::<Result<Vec<_>>>()?;
        ComplexTrace::new(grid.clone(), values)
    }

    /// Two-port of this element in series position of the DM loop, with
    /// every impedance and line length multiplied by `fraction` (the cable
    /// is split in halves around the LISN). Series groups cascade their
    /// members; an empty series group is a through connection.
    pub fn loop_network(&self, grid: &FrequencyGrid, fraction: f64) -> Result<AbcdNetwork> {
        match self {
            LoopElement::Series { elements, .. } => {
                let mut net = AbcdNetwork::identity(grid);
                for e in elements {
                    net = net.cascade(&e.loop_network(grid, fraction)?)?;
                }
                Ok(net)
            }
            LoopElement::TransmissionLine {
                z0_ohm,
                length_m,
                velocity_m_per_s,
                ..
            } => AbcdNetwork::transmission_line(
                *z0_ohm,
                length_m * fraction,
                *velocity_m_per_s,
                grid,
            ),
            one_port => {
                let z = one_port.eval_impedance(grid)?;
                Ok(AbcdNetwork::series(&z.map_values(|v| fraction * v)))
            }
        }
    }

    /// Every label in the tree, depth-first.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Some(l) = e.label() {
                out.push(l);
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a LoopElement)) {
        f(self);
        if let LoopElement::Series { elements, .. } | LoopElement::Parallel { elements, .. } = self
        {
            for e in elements {
                e.visit(f);
            }
        }
    }

    /// Multiply the value of every R, L or C carrying `label` by `factor`.
    /// Returns how many elements were scaled.
    pub fn scale_labeled(&mut self, label: &str, factor: f64) -> Result<usize> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor for `{label}` must be finite and > 0 (got {factor})"
            )));
        }
        let mut scaled = 0;
        let mut unscalable = false;
        self.scale_rec(label, factor, &mut scaled, &mut unscalable);
        match (scaled, unscalable) {
            (0, true) => Err(Error::InvalidElement {
                label: Some(label.to_owned()),
                msg: "only resistors, inductors and capacitors can be scaled".into(),
            }),
            (0, false) => Err(Error::UnknownLabel(label.to_owned())),
            (n, _) => Ok(n),
        }
    }

    fn scale_rec(&mut self, label: &str, factor: f64, scaled: &mut usize, unscalable: &mut bool) {
        let hit = self.label() == Some(label);
        match self {
            LoopElement::Resistor { ohms: v, .. }
            | LoopElement::Inductor { henries: v, .. }
            | LoopElement::Capacitor { farads: v, .. } => {
                if hit {
                    *v *= factor;
                    *scaled += 1;
                }
            }
            LoopElement::TransmissionLine { .. } => *unscalable |= hit,
            LoopElement::Series { elements, .. } | LoopElement::Parallel { elements, .. } => {
                *unscalable |= hit;
                for e in elements {
                    e.scale_rec(label, factor, scaled, unscalable);
                }
            }
        }
    }
}

/// Named-element scalings defining one variant of a DUT tree.
pub type EditSet = Vec<(String, f64)>;

/// The base tree followed by one tree per edit set. Variant 0 is `base`
/// unmodified.
pub fn mode_variants(base: &LoopElement, edits: &[EditSet]) -> Result<Vec<LoopElement>> {
    let mut out = Vec::with_capacity(edits.len() + 1);
    out.push(base.clone());
    for set in edits {
        let mut v = base.clone();
        for (label, factor) in set {
            v.scale_labeled(label, *factor)?;
        }
        out.push(v);
    }
    Ok(out)
}
