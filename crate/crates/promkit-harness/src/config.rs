//! JSON experiment configuration shared by the CLI subcommands.

use std::path::Path;

use promkit::dmd::RankPolicy;
use promkit::manifold::InterpolationConfig;
use promkit::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// Advection–diffusion of a heated inlet profile; parameter = velocity.
    HeatedInlet,
    /// Conduction around a hot cavity; parameter = heat capacity.
    MaskedPlate,
    /// Viscous Burgers equation; parameter = viscosity.
    Burgers,
}

impl Problem {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::HeatedInlet => "heated_inlet",
            Self::MaskedPlate => "masked_plate",
            Self::Burgers => "burgers",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QoiKind {
    #[default]
    State,
    Flux,
    HeatRate,
}

impl QoiKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::State => "state",
            Self::Flux => "flux",
            Self::HeatRate => "heat_rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BurgersOptions {
    pub n_cells: usize,
    pub window_start: f64,
    pub window_end: f64,
}

impl Default for BurgersOptions {
    fn default() -> Self {
        Self { n_cells: 256, window_start: 4.125, window_end: 4.5 }
    }
}

fn default_hermite_order() -> usize {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Problem,
    /// Scalar parameter values of the training samples.
    pub train_parameters: Vec<f64>,
    /// Scalar parameter values where predictions are evaluated.
    pub test_parameters: Vec<f64>,
    /// Number of training snapshot steps (columns minus one).
    pub snapshots: usize,
    pub rank: RankPolicy,
    #[serde(default)]
    pub qoi: QoiKind,
    #[serde(default = "default_hermite_order")]
    pub hermite_order: usize,
    #[serde(default)]
    pub interpolation: InterpolationConfig,
    /// Prediction horizon; defaults to the training horizon.
    #[serde(default)]
    pub steps: Option<usize>,
    /// Include the shared initial column in the aggregate error.
    #[serde(default)]
    pub include_initial: bool,
    #[serde(default)]
    pub burgers: BurgersOptions,
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path.as_ref())?;
        let cfg: Self = serde_json::from_reader(std::io::BufReader::new(f))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.train_parameters.len() < 2 {
            return Err(Error::InvalidInput("need >= 2 training parameters".into()));
        }
        if self.test_parameters.is_empty() {
            return Err(Error::InvalidInput("need >= 1 test parameter".into()));
        }
        let all = self.train_parameters.iter().chain(&self.test_parameters);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("parameter list".into()));
        }
        for (i, a) in self.train_parameters.iter().enumerate() {
            for b in &self.train_parameters[i + 1..] {
                if a == b {
                    return Err(Error::InvalidInput(format!("duplicate training parameter {a}")));
                }
            }
        }
        if self.snapshots < 2 {
            return Err(Error::InvalidInput("need >= 2 snapshot steps".into()));
        }
        if self.qoi != QoiKind::State && self.problem != Problem::MaskedPlate {
            return Err(Error::InvalidInput(
                "flux and heat-rate outputs are only defined for the plate problem".into(),
            ));
        }
        if self.hermite_order < 2 {
            return Err(Error::InvalidInput("hermite_order must be >= 2".into()));
        }
        if self.problem == Problem::Burgers {
            let b = &self.burgers;
            if b.n_cells < 8 || !(b.window_end > b.window_start) || b.window_start < 0.0 {
                return Err(Error::InvalidInput("bad Burgers options".into()));
            }
            if self.train_parameters.iter().chain(&self.test_parameters).any(|&v| v < 0.0) {
                return Err(Error::InvalidInput("viscosity must be nonnegative".into()));
            }
        }
        Ok(())
    }

    pub fn prediction_steps(&self) -> usize {
        self.steps.unwrap_or(self.snapshots)
    }
}
