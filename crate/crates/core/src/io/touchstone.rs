//! Touchstone v1 one-port (`.s1p`) reader and writer.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::netcore::{ComplexTrace, FrequencyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FrequencyUnit {
    pub fn multiplier(self) -> f64 {
        match self {
            FrequencyUnit::Hz => 1.0,
            FrequencyUnit::KHz => 1e3,
            FrequencyUnit::MHz => 1e6,
            FrequencyUnit::GHz => 1e9,
        }
    }

    fn token(self) -> &'static str {
        match self {
            FrequencyUnit::Hz => "Hz",
            FrequencyUnit::KHz => "kHz",
            FrequencyUnit::MHz => "MHz",
            FrequencyUnit::GHz => "GHz",
        }
    }

    fn from_token(t: &str) -> Option<Self> {
        Some(match t.to_ascii_uppercase().as_str() {
            "HZ" => FrequencyUnit::Hz,
            "KHZ" => FrequencyUnit::KHz,
            "MHZ" => FrequencyUnit::MHz,
            "GHZ" => FrequencyUnit::GHz,
            _ => return None,
        })
    }
}

/// Number pair encoding of a complex sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// Real, imaginary.
    Ri,
    /// Magnitude, angle in degrees.
    Ma,
    /// Magnitude in dB, angle in degrees.
    Db,
}

impl DataFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            DataFormat::Ri => "RI",
            DataFormat::Ma => "MA",
            DataFormat::Db => "DB",
        }
    }

    pub fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            DataFormat::Ri => Complex64::new(a, b),
            DataFormat::Ma => Complex64::from_polar(a, b.to_radians()),
            DataFormat::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    pub fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            DataFormat::Ri => (z.re, z.im),
            DataFormat::Ma => (z.norm(), z.arg().to_degrees()),
            DataFormat::Db => (20.0 * z.norm().log10(), z.arg().to_degrees()),
        }
    }
}

impl fmt::Display for DataFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DataFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "RI" => Ok(DataFormat::Ri),
            "MA" => Ok(DataFormat::Ma),
            "DB" => Ok(DataFormat::Db),
            _ => Err(format!("unknown data format `{s}` (expected RI, MA or DB)")),
        }
    }
}

/// A parsed one-port Touchstone file.
#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneDocument {
    pub unit: FrequencyUnit,
    pub format: DataFormat,
    /// Reference resistance from the option line.
    pub reference_ohm: f64,
    /// Comment lines without the leading `!`.
    pub comments: Vec<String>,
    /// Γ in linear complex form on a grid in Hz.
    pub trace: ComplexTrace,
}

struct OptionLine {
    unit: FrequencyUnit,
    format: DataFormat,
    reference_ohm: f64,
}

fn parse_option_line(body: &str, line: usize) -> Result<OptionLine> {
    // Touchstone v1 defaults
    let mut opt = OptionLine {
        unit: FrequencyUnit::GHz,
        format: DataFormat::Ma,
        reference_ohm: 50.0,
    };
    let mut tokens = body.split_whitespace();
    while let Some(tok) = tokens.next() {
        let upper = tok.to_ascii_uppercase();
        if let Some(u) = FrequencyUnit::from_token(tok) {
            opt.unit = u;
        } else if let Ok(f) = tok.parse::<DataFormat>() {
            opt.format = f;
        } else if upper == "S" {
        } else if matches!(upper.as_str(), "Y" | "Z" | "G" | "H") {
            return Err(Error::parse(
                line,
                format!("parameter type `{tok}` is not supported; only S"),
            ));
        } else if upper == "R" {
            let v = tokens
                .next()
                .ok_or_else(|| Error::parse(line, "`R` must be followed by a resistance"))?;
            let r: f64 = v
                .parse()
                .map_err(|_| Error::parse(line, format!("invalid reference resistance `{v}`")))?;
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::parse(
                    line,
                    format!("reference resistance must be > 0 (got {v})"),
                ));
            }
            opt.reference_ohm = r;
        } else {
            return Err(Error::parse(
                line,
                format!("unknown option `{tok}` (units: Hz, kHz, MHz, GHz; formats: RI, MA, DB)"),
            ));
        }
    }
    Ok(opt)
}

fn parse_number(tok: &str, line: usize, what: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}

impl TouchstoneDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut option: Option<OptionLine> = None;
        let mut comments = Vec::new();
        let mut freqs: Vec<f64> = Vec::new();
        let mut values = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let trimmed = raw.trim();
            if let Some(c) = trimmed.strip_prefix('!') {
                comments.push(c.strip_prefix(' ').unwrap_or(c).to_owned());
                continue;
            }
            let content = match trimmed.find('!') {
                Some(i) => trimmed[..i].trim(),
                None => trimmed,
            };
            if content.is_empty() {
                continue;
            }
            if let Some(body) = content.strip_prefix('#') {
                if option.is_some() {
                    return Err(Error::parse(line, "duplicate option line"));
                }
                if !freqs.is_empty() {
                    return Err(Error::parse(line, "option line must precede data rows"));
                }
                option = Some(parse_option_line(body, line)?);
                continue;
            }
            let Some(opt) = &option else {
                return Err(Error::parse(
                    line,
                    "missing option line (`# <unit> S <format> R <ohms>`) before data",
                ));
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    line,
                    format!(
                        "one-port data row needs 3 fields (frequency, two value parts), found {}",
                        fields.len()
                    ),
                ));
            }
            let f = parse_number(fields[0], line, "frequency")? * opt.unit.multiplier();
            let a = parse_number(fields[1], line, "value")?;
            let b = parse_number(fields[2], line, "value")?;
            let db_zero = opt.format == DataFormat::Db && a == f64::NEG_INFINITY;
            if !(f.is_finite() && (a.is_finite() || db_zero) && b.is_finite()) {
                return Err(Error::parse(line, "non-finite number in data row"));
            }
            if f <= 0.0 {
                return Err(Error::parse(
                    line,
                    format!("frequency must be > 0 (got {})", fields[0]),
                ));
            }
            if let Some(&prev) = freqs.last() {
                if f <= prev {
                    return Err(Error::parse(
                        line,
                        format!("frequency {f} Hz does not exceed previous {prev} Hz"),
                    ));
                }
            }
            freqs.push(f);
            values.push(opt.format.decode(a, b));
        }
        let Some(opt) = option else {
            return Err(Error::parse(last_line.max(1), "missing option line"));
        };
        let grid = FrequencyGrid::new_allow_empty(freqs)
            .map_err(|e| Error::parse(last_line, e.to_string()))?;
        let mut trace = ComplexTrace::new(grid, values)?;
        trace.meta.comments = comments.clone();
        Ok(Self {
            unit: opt.unit,
            format: opt.format,
            reference_ohm: opt.reference_ohm,
            comments,
            trace,
        })
    }

    /// A document around `trace` in Hz with a 50 Ω reference.
    pub fn from_trace(trace: ComplexTrace, format: DataFormat) -> Self {
        Self {
            unit: FrequencyUnit::Hz,
            format,
            reference_ohm: 50.0,
            comments: trace.meta.comments.clone(),
            trace,
        }
    }

    /// Serialize. Values use the shortest representation that round-trips.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "! {c}");
        }
        let _ = writeln!(
            out,
            "# {} S {} R {}",
            self.unit.token(),
            self.format,
            self.reference_ohm
        );
        let m = self.unit.multiplier();
        for (f, z, _) in self.trace.iter() {
            let (a, b) = self.format.encode(z);
            let _ = writeln!(out, "{} {:e} {:e}", f / m, a, b);
        }
        out
    }
}

pub fn parse_touchstone_1port(text: &str) -> Result<ComplexTrace> {
    TouchstoneDocument::parse(text).map(|d| d.trace)
}

pub fn write_touchstone_1port(trace: &ComplexTrace, format: DataFormat) -> String {
    TouchstoneDocument::from_trace(trace.clone(), format).to_text()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ri_matched_point() {
        let t = parse_touchstone_1port("# MHz S RI R 50\n1 0 0\n").unwrap();
        assert_eq!(t.grid().points(), &[1e6]);
        assert_eq!(t.values(), &[Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn ma_short() {
        let t = parse_touchstone_1port("# Hz S MA R 50\n150000 1 180\n").unwrap();
        assert_eq!(t.grid().points(), &[150e3]);
        assert!((t.values()[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn db_half() {
        let t = parse_touchstone_1port("# Hz S DB R 50\n1e6 -6.0206 0\n").unwrap();
        assert!((t.values()[0].re - 0.5).abs() < 1e-5);
    }

    #[test]
    fn defaults_comments_and_inline_comments() {
        let d = TouchstoneDocument::parse("! hello\n!world\n#\n1 0.5 90 ! trailing\n").unwrap();
        assert_eq!(d.unit, FrequencyUnit::GHz);
        assert_eq!(d.format, DataFormat::Ma);
        assert_eq!(d.reference_ohm, 50.0);
        assert_eq!(d.comments, vec!["hello".to_string(), "world".to_string()]);
        assert_eq!(d.trace.grid().points(), &[1e9]);
        assert!((d.trace.values()[0] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("1 0 0\n", 1),
            ("! c\n# Hz S RI R 50\n1 0\n", 3),
            ("# Hz S RI R 50\n1 0 0 0\n", 2),
            ("# Hz S RI R 50\n2 0 0\n1 0 0\n", 3),
            ("# Hz S RI R 50\n2 0 0\n2 0 0\n", 3),
            ("# THz S RI R 50\n", 1),
            ("# Hz Z RI R 50\n", 1),
            ("# Hz S RI R 50\n# Hz S RI R 50\n", 2),
            ("# Hz S RI R 50\n1 x 0\n", 2),
            ("# Hz S RI R 50\n0 0 0\n", 2),
            ("# Hz S RI R 50\n1 nan 0\n", 2),
            ("", 1),
        ];
        for (text, line) in cases {
            let err = TouchstoneDocument::parse(text).unwrap_err();
            assert_eq!(err.line(), Some(line), "{text:?} -> {err}");
        }
    }

    #[test]
    fn empty_data_round_trips() {
        let d = TouchstoneDocument::parse("# Hz S RI R 50\n").unwrap();
        assert!(d.trace.is_empty());
        let text = d.to_text();
        assert_eq!(text, "# Hz S RI R 50\n");
        assert!(TouchstoneDocument::parse(&text).unwrap().trace.is_empty());
    }

    #[test]
    fn unit_normalization() {
        let a =
            parse_touchstone_1port("# Hz S RI R 50\n1500000 0.1 0.2\n2000000 0.3 0.4\n").unwrap();
        let b = parse_touchstone_1port("# MHz S RI R 50\n1.5 0.1 0.2\n2 0.3 0.4\n").unwrap();
        assert!(a.grid().is_identical(b.grid()));
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn db_zero_magnitude() {
        let g = FrequencyGrid::new(vec![1e6]).unwrap();
        let t = ComplexTrace::new(g, vec![Complex64::new(0.0, 0.0)]).unwrap();
        let back = parse_touchstone_1port(&write_touchstone_1port(&t, DataFormat::Db)).unwrap();
        assert_eq!(back.values()[0].norm(), 0.0);
    }
}
