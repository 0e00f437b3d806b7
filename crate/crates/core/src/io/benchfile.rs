//! Bench description files (TOML).
//!
//! ```toml
//! z0 = 50.0
//! [probe]            # l_lk_h, c_p_f, n, topology
//! [[lisn.elements]]  # loop elements, in series
//! [[cable.elements]]
//! [[dut.elements]]
//! [sweep]            # f_start_hz, f_stop_hz, n_points, spacing = "log" | "linear"
//! [noise]            # sigma, seed
//! [sap]              # attenuation_db (optional)
//! ```
//!
//! An element is a table with `kind` (`resistor`, `inductor`, `capacitor`,
//! `series`, `parallel`, `transmission_line`), an optional `label`, and
//! `value` (SI units) for R/L/C, `elements` for groups, or `z0`, `length_m`
//! and `velocity_m_per_s` for a line.

use toml::{Table, Value};

use crate::benchsim::{
    BenchModel, LoopElement, NoiseModel, ProbeModel, ProbeStage, Spacing, Sweep,
};
use crate::error::{Error, Result};
use crate::netcore::ReferenceImpedance;

struct Reader {
    strict: bool,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_owned()
    } else {
        format!("{path}.{key}")
    }
}

impl Reader {
    fn check_keys(&self, t: &Table, path: &str, allowed: &[&str]) -> Result<()> {
        if !self.strict {
            return Ok(());
        }
        match t.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::schema(join(path, k), "unknown key")),
            None => Ok(()),
        }
    }

    fn table<'a>(&self, t: &'a Table, path: &str, key: &str) -> Result<Option<&'a Table>> {
        match t.get(key) {
            None => Ok(None),
            Some(Value::Table(x)) => Ok(Some(x)),
            Some(_) => Err(Error::schema(join(path, key), "expected a table")),
        }
    }

    fn required_table<'a>(&self, t: &'a Table, path: &str, key: &str) -> Result<&'a Table> {
        self.table(t, path, key)?
            .ok_or_else(|| Error::schema(join(path, key), "missing required table"))
    }

    fn float(&self, t: &Table, path: &str, key: &str) -> Result<Option<f64>> {
        match t.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(x)) => Ok(Some(*x as f64)),
            Some(_) => Err(Error::schema(join(path, key), "expected a number")),
        }
    }

    fn required_float(&self, t: &Table, path: &str, key: &str) -> Result<f64> {
        self.float(t, path, key)?
            .ok_or_else(|| Error::schema(join(path, key), "missing required number"))
    }

    fn uint(&self, t: &Table, path: &str, key: &str) -> Result<Option<u64>> {
        match t.get(key) {
            None => Ok(None),
            Some(Value::Integer(x)) if *x >= 0 => Ok(Some(*x as u64)),
            Some(_) => Err(Error::schema(
                join(path, key),
                "expected a non-negative integer",
            )),
        }
    }

    fn string<'a>(&self, t: &'a Table, path: &str, key: &str) -> Result<Option<&'a str>> {
        match t.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(Error::schema(join(path, key), "expected a string")),
        }
    }

    fn elements(&self, t: &Table, path: &str) -> Result<Vec<LoopElement>> {
        let p = join(path, "elements");
        match t.get("elements") {
            None => Ok(Vec::new()),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let ip = format!("{p}[{i}]");
                    match v {
                        Value::Table(e) => self.element(e, &ip),
                        _ => Err(Error::schema(ip, "expected an element table")),
                    }
                })
                .collect(),
            Some(_) => Err(Error::schema(p, "expected an array of element tables")),
        }
    }

    fn element(&self, t: &Table, path: &str) -> Result<LoopElement> {
        let kind = self
            .string(t, path, "kind")?
            .ok_or_else(|| Error::schema(join(path, "kind"), "missing element kind"))?;
        let label = self.string(t, path, "label")?.map(str::to_owned);
        let positive = |key: &str| -> Result<f64> {
            let v = self.required_float(t, path, key)?;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::schema(
                    join(path, key),
                    format!("must be > 0 (got {v})"),
                ))
            }
        };
        let el = match kind {
            "resistor" | "inductor" | "capacitor" => {
                self.check_keys(t, path, &["kind", "label", "value"])?;
                let value = positive("value")?;
                match kind {
                    "resistor" => LoopElement::Resistor { ohms: value, label },
                    "inductor" => LoopElement::Inductor {
                        henries: value,
                        label,
                    },
                    _ => LoopElement::Capacitor {
                        farads: value,
                        label,
                    },
                }
            }
            "series" | "parallel" => {
                self.check_keys(t, path, &["kind", "label", "elements"])?;
                let elements = self.elements(t, path)?;
                if elements.is_empty() {
                    return Err(Error::schema(
                        join(path, "elements"),
                        "group must not be empty",
                    ));
                }
                if kind == "series" {
                    LoopElement::Series { elements, label }
                } else {
                    LoopElement::Parallel { elements, label }
                }
            }
            "transmission_line" => {
                self.check_keys(
                    t,
                    path,
                    &["kind", "label", "z0", "length_m", "velocity_m_per_s"],
                )?;
                LoopElement::TransmissionLine {
                    z0_ohm: positive("z0")?,
                    length_m: positive("length_m")?,
                    velocity_m_per_s: positive("velocity_m_per_s")?,
                    label,
                }
            }
            other => {
                return Err(Error::schema(
                    join(path, "kind"),
                    format!("unknown element kind `{other}`"),
                ))
            }
        };
        Ok(el)
    }

    fn section(&self, root: &Table, key: &str, required: bool) -> Result<LoopElement> {
        let t = if required {
            Some(self.required_table(root, "", key)?)
        } else {
            self.table(root, "", key)?
        };
        let Some(t) = t else {
            return Ok(LoopElement::series(vec![]));
        };
        self.check_keys(t, key, &["elements"])?;
        let elements = self.elements(t, key)?;
        if required && elements.is_empty() {
            return Err(Error::schema(
                join(key, "elements"),
                "at least one element is required",
            ));
        }
        Ok(LoopElement::series(elements))
    }

    fn bench(&self, root: &Table) -> Result<BenchModel> {
        self.check_keys(
            root,
            "",
            &[
                "z0", "probe", "lisn", "cable", "dut", "sweep", "noise", "sap",
            ],
        )?;

        let z0 = match self.float(root, "", "z0")? {
            None => ReferenceImpedance::default(),
            Some(v) => {
                ReferenceImpedance::new(v).map_err(|e| Error::schema("z0", e.to_string()))?
            }
        };

        let p = self.required_table(root, "", "probe")?;
        self.check_keys(p, "probe", &["l_lk_h", "c_p_f", "n", "topology"])?;
        let mut probe = ProbeModel::new(
            self.required_float(p, "probe", "l_lk_h")?,
            self.required_float(p, "probe", "c_p_f")?,
            self.required_float(p, "probe", "n")?,
        );
        match p.get("topology") {
            None => {}
            Some(Value::Array(items)) => {
                probe.topology = items
                    .iter()
                    .enumerate()
                    .map(|(i, v)| match v {
                        Value::String(s) => s
                            .parse::<ProbeStage>()
                            .map_err(|e| Error::schema(format!("probe.topology[{i}]"), e)),
                        _ => Err(Error::schema(
                            format!("probe.topology[{i}]"),
                            "expected a string",
                        )),
                    })
                    .collect::<Result<_>>()?;
            }
            Some(_) => {
                return Err(Error::schema(
                    "probe.topology",
                    "expected an array of strings",
                ))
            }
        }
        probe
            .validate()
            .map_err(|e| Error::schema("probe", e.to_string()))?;

        let lisn = self.section(root, "lisn", false)?;
        let cable = self.section(root, "cable", false)?;
        let dut = self.section(root, "dut", true)?;

        let s = self.required_table(root, "", "sweep")?;
        self.check_keys(
            s,
            "sweep",
            &["f_start_hz", "f_stop_hz", "n_points", "spacing"],
        )?;
        let spacing = match self.string(s, "sweep", "spacing")? {
            None | Some("log") => Spacing::Log,
            Some("linear") => Spacing::Linear,
            Some(other) => {
                return Err(Error::schema(
                    "sweep.spacing",
                    format!("expected `log` or `linear`, got `{other}`"),
                ))
            }
        };
        let sweep = Sweep {
            f_start_hz: self.required_float(s, "sweep", "f_start_hz")?,
            f_stop_hz: self.required_float(s, "sweep", "f_stop_hz")?,
            n_points: self
                .uint(s, "sweep", "n_points")?
                .ok_or_else(|| Error::schema("sweep.n_points", "missing required integer"))?
                as usize,
            spacing,
        };
        sweep
            .grid()
            .map_err(|e| Error::schema("sweep", e.to_string()))?;

        let noise = match self.table(root, "", "noise")? {
            None => NoiseModel::default(),
            Some(n) => {
                self.check_keys(n, "noise", &["sigma", "seed"])?;
                NoiseModel::new(
                    self.float(n, "noise", "sigma")?.unwrap_or(0.0),
                    self.uint(n, "noise", "seed")?.unwrap_or(0),
                )
                .map_err(|e| Error::schema("noise.sigma", e.to_string()))?
            }
        };

        let attenuator_db = match self.table(root, "", "sap")? {
            None => None,
            Some(t) => {
                self.check_keys(t, "sap", &["attenuation_db"])?;
                self.float(t, "sap", "attenuation_db")?
            }
        };

        let bench = BenchModel {
            probe,
            lisn,
            cable,
            dut,
            sweep,
            z0,
            noise,
            attenuator_db,
        };
        bench
            .validate()
            .map_err(|e| Error::schema("", e.to_string()))?;
        Ok(bench)
    }
}

/// Parse a bench description, rejecting unknown keys.
pub fn read_bench_config(text: &str) -> Result<BenchModel> {
    read_bench_config_with(text, true)
}

/// Parse a bench description; `strict = false` ignores unknown keys.
pub fn read_bench_config_with(text: &str, strict: bool) -> Result<BenchModel> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::schema("", e.to_string().trim().to_owned()))?;
    Reader { strict }.bench(&root)
}

fn element_value(e: &LoopElement) -> Value {
    let mut t = Table::new();
    let (kind, extra): (&str, Vec<(&str, Value)>) = match e {
        LoopElement::Resistor { ohms, .. } => ("resistor", vec![("value", Value::Float(*ohms))]),
        LoopElement::Inductor { henries, .. } => {
            ("inductor", vec![("value", Value::Float(*henries))])
        }
        LoopElement::Capacitor { farads, .. } => {
            ("capacitor", vec![("value", Value::Float(*farads))])
        }
        LoopElement::Series { elements, .. } => {
            ("series", vec![("elements", elements_value(elements))])
        }
        LoopElement::Parallel { elements, .. } => {
            ("parallel", vec![("elements", elements_value(elements))])
        }
        LoopElement::TransmissionLine {
            z0_ohm,
            length_m,
            velocity_m_per_s,
            ..
        } => (
            "transmission_line",
            vec![
                ("z0", Value::Float(*z0_ohm)),
                ("length_m", Value::Float(*length_m)),
                ("velocity_m_per_s", Value::Float(*velocity_m_per_s)),
            ],
        ),
    };
    t.insert("kind".into(), Value::String(kind.into()));
    if let Some(l) = e.label() {
        t.insert("label".into(), Value::String(l.into()));
    }
    for (k, v) in extra {
        t.insert(k.into(), v);
    }
    Value::Table(t)
}

fn elements_value(elements: &[LoopElement]) -> Value {
    Value::Array(elements.iter().map(element_value).collect())
}

fn section_value(e: &LoopElement) -> Value {
    let mut t = Table::new();
    let list = match e {
        LoopElement::Series {
            elements,
            label: None,
        } => elements_value(elements),
        other => elements_value(std::slice::from_ref(other)),
    };
    t.insert("elements".into(), list);
    Value::Table(t)
}

/// Serialize a bench; [`read_bench_config`] parses the result back to an
/// equal model.
pub fn write_bench_config(b: &BenchModel) -> String {
    let mut root = Table::new();
    root.insert("z0".into(), Value::Float(b.z0.ohms()));

    let mut p = Table::new();
    p.insert("l_lk_h".into(), Value::Float(b.probe.leakage_inductance_h));
    p.insert(
        "c_p_f".into(),
        Value::Float(b.probe.parasitic_capacitance_f),
    );
    p.insert("n".into(), Value::Float(b.probe.turns_ratio));
    p.insert(
        "topology".into(),
        Value::Array(
            b.probe
                .topology
                .iter()
                .map(|s| Value::String(s.as_str().into()))
                .collect(),
        ),
    );
    root.insert("probe".into(), Value::Table(p));
    root.insert("lisn".into(), section_value(&b.lisn));
    root.insert("cable".into(), section_value(&b.cable));
    root.insert("dut".into(), section_value(&b.dut));

    let mut s = Table::new();
    s.insert("f_start_hz".into(), Value::Float(b.sweep.f_start_hz));
    s.insert("f_stop_hz".into(), Value::Float(b.sweep.f_stop_hz));
    s.insert("n_points".into(), Value::Integer(b.sweep.n_points as i64));
    s.insert(
        "spacing".into(),
        Value::String(b.sweep.spacing.as_str().into()),
    );
    root.insert("sweep".into(), Value::Table(s));

    let mut n = Table::new();
    n.insert("sigma".into(), Value::Float(b.noise.sigma));
    n.insert("seed".into(), Value::Integer(b.noise.seed as i64));
    root.insert("noise".into(), Value::Table(n));

    if let Some(db) = b.attenuator_db {
        let mut t = Table::new();
        t.insert("attenuation_db".into(), Value::Float(db));
        root.insert("sap".into(), Value::Table(t));
    }
    toml::to_string(&root).expect("bench serializes")
}
