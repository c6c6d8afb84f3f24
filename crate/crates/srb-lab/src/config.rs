//! Run configuration: one TOML file drives every command.
//!
//! Unknown keys are rejected rather than ignored; a typo in a threshold
//! should fail loudly, not silently run with a default. Every section is
//! optional and falls back to the documented defaults, so a config can be
//! as short as a [model] table.

use crate::dynamics::SurfaceMap;
use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Model selector: a kind plus its one shape parameter, if it takes one.
/// A tagged enum would silently swallow stray keys in the model table, so
/// this stays a plain struct and `build` pairs kinds with parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kick: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amp: Option<f64>,
}

impl ModelConfig {
    pub fn build(&self) -> Result<SurfaceMap> {
        let take = |name: &str, value: Option<f64>, wanted: bool| -> Result<Option<f64>> {
            match (value, wanted) {
                (Some(v), true) => Ok(Some(v)),
                (None, true) => Err(LabError::Config(format!(
                    "model '{}' needs a '{name}' parameter",
                    self.kind
                ))),
                (Some(_), false) => Err(LabError::Config(format!(
                    "model '{}' takes no '{name}' parameter",
                    self.kind
                ))),
                (None, false) => Ok(None),
            }
        };
        let wants = |delta: bool, kick: bool, amp: bool| -> Result<(f64, f64, f64)> {
            Ok((
                take("delta", self.delta, delta)?.unwrap_or(0.0),
                take("kick", self.kick, kick)?.unwrap_or(0.0),
                take("amp", self.amp, amp)?.unwrap_or(0.0),
            ))
        };
        match self.kind.as_str() {
            "identity" => {
                wants(false, false, false)?;
                Ok(SurfaceMap::identity())
            }
            "cat" => {
                wants(false, false, false)?;
                Ok(SurfaceMap::cat())
            }
            "perturbed_cat" => {
                let (delta, _, _) = wants(true, false, false)?;
                SurfaceMap::perturbed_cat(delta)
            }
            "standard" => {
                let (_, kick, _) = wants(false, true, false)?;
                SurfaceMap::standard(kick)
            }
            "morse_smale" => {
                let (_, _, amp) = wants(false, false, true)?;
                SurfaceMap::morse_smale(amp)
            }
            other => Err(LabError::Config(format!("unknown model kind '{other}'"))),
        }
    }
}

/// Smoothness order, smallness thresholds, and the neutral/coloring grids.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    /// Smoothness order r.
    pub order: usize,
    pub eta: f64,
    pub gamma: f64,
    /// Direction-derivative threshold; the coordinate threshold is
    /// eps_hat^2 / 10.
    pub eps_hat: f64,
    /// Checkpoint gap for subdivision schedules.
    pub mark_gap: usize,
    /// Neutrality rates for the decomposition grid, ascending.
    pub alpha_grid: Vec<f64>,
    /// Minimum neutral-window lengths for the grid, ascending.
    pub l_grid: Vec<usize>,
    /// Per-step log-growth charged to filler segments.
    pub filler_constant: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            order: 8,
            eta: 0.2,
            gamma: 0.01,
            eps_hat: 0.9,
            mark_gap: 4,
            alpha_grid: vec![0.05, 0.1, 0.2],
            l_grid: vec![2, 4, 8],
            filler_constant: 2.0,
        }
    }
}

impl Constants {
    /// Coordinate-derivative threshold derived from eps_hat.
    pub fn eps(&self) -> f64 {
        self.eps_hat * self.eps_hat / 10.0
    }
}

/// Band-tightening schedule and clustering radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schedules {
    /// Tightest band index tried: k runs from k_max down to 1.
    pub k_max: u32,
    /// Diameter for parameter clustering in dictionary distance.
    pub delta_cluster: f64,
}

impl Default for Schedules {
    fn default() -> Self {
        Schedules { k_max: 4, delta_cluster: 0.05 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    /// Curve-parameter grid used when collecting expanding parameters.
    pub param_grid: usize,
    pub pilot_horizon: usize,
    pub pilot_params: usize,
    pub transverse_samples: usize,
    pub transverse_horizon: usize,
    /// Horizon and per-axis grid for the bundle dilation estimate.
    pub dilation_n: usize,
    pub dilation_grid: usize,
    /// Seed grid per axis and maximal period for the periodic-orbit scan.
    pub scan_grid: usize,
    pub scan_period: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            param_grid: 512,
            pilot_horizon: 24,
            pilot_params: 32,
            transverse_samples: 64,
            transverse_horizon: 12,
            dilation_n: 2,
            dilation_grid: 12,
            scan_grid: 24,
            scan_period: 2,
        }
    }
}

/// Single-orbit commands: where to start and how far to run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitSection {
    /// Bundle start point (u, v, theta).
    pub xi0: [f64; 3],
    pub length: usize,
    /// Rate for the expansion-time report.
    pub pliss_rate: f64,
}

impl Default for OrbitSection {
    fn default() -> Self {
        OrbitSection { xi0: [0.123, 0.456, 0.3], length: 64, pliss_rate: 0.4 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    /// Inclusive window of candidate good times.
    pub n_range: [usize; 2],
    pub check_d_samples: usize,
    pub check_d_horizon: usize,
    /// Slack for the certificate chain comparisons.
    pub tol_chain: f64,
    /// Allowed corner-versus-neighbor drift in the decomposition grid.
    pub stabilization_tol: f64,
    /// Orbit length used for the measure decomposition stage.
    pub decompose_length: usize,
}

impl Default for PipelineSection {
    fn default() -> Self {
        PipelineSection {
            n_range: [8, 12],
            check_d_samples: 32,
            check_d_horizon: 16,
            tol_chain: 0.05,
            stabilization_tol: 0.5,
            decompose_length: 96,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountSection {
    /// Horizons for the counting experiment.
    pub n_list: Vec<usize>,
    /// Expansion floor and mass base entering the lower bound.
    pub rho: f64,
    pub lambda_min: f64,
}

impl Default for CountSection {
    fn default() -> Self {
        CountSection { n_list: vec![8, 10, 12], rho: 0.9, lambda_min: 0.9 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    pub seed: u64,
    pub workers: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "out".into(), seed: 7, workers: 1 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelConfig,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub schedules: Schedules,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub orbit: OrbitSection,
    #[serde(default)]
    pub pipeline: PipelineSection,
    #[serde(default)]
    pub count: CountSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Config {
    pub fn from_path(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        let config: Config = toml::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.build()?;
        let c = &self.constants;
        if c.order < 2 || c.order > crate::dynamics::MAX_JET_ORDER {
            return Err(LabError::OrderUnavailable {
                requested: c.order,
                available: crate::dynamics::MAX_JET_ORDER,
            });
        }
        if !(c.eta > 0.0) {
            return Err(LabError::Config("eta must be positive".into()));
        }
        if !(c.gamma > 0.0 && 10.0 * c.gamma < 0.5) {
            return Err(LabError::Config(format!(
                "gamma must satisfy 0 < 10 gamma < 1/2, got {}",
                c.gamma
            )));
        }
        if !(c.eps_hat > 0.0) {
            return Err(LabError::Config("eps_hat must be positive".into()));
        }
        if c.mark_gap == 0 {
            return Err(LabError::Config("mark_gap must be at least 1".into()));
        }
        if c.alpha_grid.len() < 2 || c.l_grid.len() < 2 {
            return Err(LabError::Config("alpha_grid and l_grid need two entries each".into()));
        }
        if c.alpha_grid.windows(2).any(|w| w[0] >= w[1])
            || c.l_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(LabError::Config("grids must be strictly ascending".into()));
        }
        if !(c.filler_constant > 0.0) {
            return Err(LabError::Config("filler_constant must be positive".into()));
        }
        if self.schedules.k_max == 0 {
            return Err(LabError::Config("k_max must be at least 1".into()));
        }
        if !(self.schedules.delta_cluster > 0.0) {
            return Err(LabError::Config("delta_cluster must be positive".into()));
        }
        let s = &self.sampling;
        for (name, v) in [
            ("param_grid", s.param_grid),
            ("pilot_horizon", s.pilot_horizon),
            ("pilot_params", s.pilot_params),
            ("transverse_samples", s.transverse_samples),
            ("transverse_horizon", s.transverse_horizon),
            ("dilation_n", s.dilation_n),
            ("dilation_grid", s.dilation_grid),
            ("scan_grid", s.scan_grid),
            ("scan_period", s.scan_period),
        ] {
            if v == 0 {
                return Err(LabError::Config(format!("{name} must be at least 1")));
            }
        }
        if self.orbit.length == 0 {
            return Err(LabError::Config("orbit length must be at least 1".into()));
        }
        let p = &self.pipeline;
        if p.n_range[0] < 1 || p.n_range[0] > p.n_range[1] {
            return Err(LabError::Config("n_range must satisfy 1 <= lo <= hi".into()));
        }
        if p.decompose_length == 0 || p.check_d_samples == 0 || p.check_d_horizon == 0 {
            return Err(LabError::Config("pipeline sizes must be at least 1".into()));
        }
        if !(p.tol_chain > 0.0) || !(p.stabilization_tol > 0.0) {
            return Err(LabError::Config("pipeline tolerances must be positive".into()));
        }
        let k = &self.count;
        if k.n_list.is_empty() {
            return Err(LabError::Config("count n_list must not be empty".into()));
        }
        if !(k.rho > 0.0 && k.rho < 1.0) {
            return Err(LabError::Config("rho must lie in (0, 1)".into()));
        }
        if self.output.workers == 0 {
            return Err(LabError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}
