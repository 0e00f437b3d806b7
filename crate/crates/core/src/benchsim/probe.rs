use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::netcore::{Abcd, AbcdNetwork, FrequencyGrid};

/// One stage of the clamp-on probe's equivalent two-port, in order from the
/// instrument side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeStage {
    /// Parasitic capacitance `C_p` across the line.
    ShuntCp,
    /// Leakage inductance `L_lk` in series.
    SeriesLlk,
    /// Ideal coupling transformer with turns ratio `n`.
    Transformer,
}

impl ProbeStage {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbeStage::ShuntCp => "shunt_cp",
            ProbeStage::SeriesLlk => "series_llk",
            ProbeStage::Transformer => "transformer",
        }
    }
}

impl fmt::Display for ProbeStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProbeStage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "shunt_cp" => Ok(ProbeStage::ShuntCp),
            "series_llk" => Ok(ProbeStage::SeriesLlk),
            "transformer" => Ok(ProbeStage::Transformer),
            other => Err(format!(
                "unknown probe stage `{other}` (expected shunt_cp, series_llk or transformer)"
            )),
        }
    }
}

/// Clamp-on probe model.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeModel {
    pub leakage_inductance_h: f64,
    pub parasitic_capacitance_f: f64,
    pub turns_ratio: f64,
    pub topology: Vec<ProbeStage>,
}

impl ProbeModel {
    /// Default stage order: shunt `C_p` at the instrument side, then series
    /// `L_lk`, then the transformer.
    pub const DEFAULT_TOPOLOGY: [ProbeStage; 3] = [
        ProbeStage::ShuntCp,
        ProbeStage::SeriesLlk,
        ProbeStage::Transformer,
    ];

    pub fn new(l_lk: f64, c_p: f64, n: f64) -> Self {
        Self {
            leakage_inductance_h: l_lk,
            parasitic_capacitance_f: c_p,
            turns_ratio: n,
            topology: Self::DEFAULT_TOPOLOGY.to_vec(),
        }
    }

    /// A probe that is a through connection: no parasitics, unity ratio.
    pub fn ideal() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    pub fn with_topology(mut self, topology: Vec<ProbeStage>) -> Self {
        self.topology = topology;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("probe: {msg}")));
        if !(self.leakage_inductance_h >= 0.0 && self.leakage_inductance_h.is_finite()) {
            return bad(format!(
                "l_lk_h must be >= 0 (got {})",
                self.leakage_inductance_h
            ));
        }
        if !(self.parasitic_capacitance_f >= 0.0 && self.parasitic_capacitance_f.is_finite()) {
            return bad(format!(
                "c_p_f must be >= 0 (got {})",
                self.parasitic_capacitance_f
            ));
        }
        if !(self.turns_ratio > 0.0 && self.turns_ratio.is_finite()) {
            return bad(format!("n must be > 0 (got {})", self.turns_ratio));
        }
        if self.topology.is_empty() {
            return bad("topology must name at least one stage".into());
        }
        Ok(())
    }

    /// The probe's two-port, stages cascaded in topology order.
    pub fn network(&self, grid: &FrequencyGrid) -> Result<AbcdNetwork> {
        self.validate()?;
        let mut net = AbcdNetwork::identity(grid);
        for stage in &self.topology {
            let next = match stage {
                ProbeStage::ShuntCp => {
                    let c = self.parasitic_capacitance_f;
                    AbcdNetwork::from_fn(grid, |hz| {
                        Abcd::shunt(Complex64::new(0.0, 2.0 * std::f64::consts::PI * hz * c))
                    })
                }
                ProbeStage::SeriesLlk => {
                    let l = self.leakage_inductance_h;
                    AbcdNetwork::from_fn(grid, |hz| {
                        Abcd::series(Complex64::new(0.0, 2.0 * std::f64::consts::PI * hz * l))
                    })
                }
                ProbeStage::Transformer => AbcdNetwork::transformer(self.turns_ratio, grid)?,
            };
            net = net.cascade(&next)?;
        }
        Ok(net)
    }
}
