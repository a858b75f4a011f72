use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use assim_core::var3d::{GdConfig, Solver};

use crate::error::HarnessError;

/// Estimators a run can include. Ordering fixes the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Kf,
    Enkf,
    Var3d,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Kf, Method::Enkf, Method::Var3d];

    pub fn name(self) -> &'static str {
        match self {
            Method::Kf => "kf",
            Method::Enkf => "enkf",
            Method::Var3d => "var3d",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kf" => Ok(Method::Kf),
            "enkf" => Ok(Method::Enkf),
            "var3d" | "3dvar" => Ok(Method::Var3d),
            other => Err(HarnessError::InvalidConfig(format!(
                "unknown method `{other}` (expected kf, enkf or var3d)"
            ))),
        }
    }
}

/// Parses a comma-separated method list; `""` and `none` select nothing.
pub fn parse_methods(list: &str) -> Result<BTreeSet<Method>, HarnessError> {
    let trimmed = list.trim();
    if trimmed.is_empty() || trimmed.eq_ignore_ascii_case("none") {
        return Ok(BTreeSet::new());
    }
    trimmed.split(',').map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    /// Observation noise variance; `R = [[r_var]]`.
    pub r_var: f64,
    pub ensemble_size: usize,
    /// 3D-Var background covariance is `d_scale * I`.
    pub d_scale: f64,
    pub methods: BTreeSet<Method>,
    pub solver: Solver,
    pub gd: GdConfig,
    /// Observe every `obs_stride`-th step, starting at step 0.
    pub obs_stride: usize,
    /// Assimilate the step-0 observation instead of reporting the guess as-is.
    pub initial_analysis: bool,
    /// Add process noise to EnKF members during the forecast.
    pub enkf_process_noise: bool,
    /// Build the EnKF gain from the previous analysis ensemble.
    pub enkf_lagged_covariance: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            steps: 2000,
            seed: 42,
            r_var: 0.01,
            ensemble_size: 100,
            d_scale: 0.05,
            methods: Method::ALL.into_iter().collect(),
            solver: Solver::Analytic,
            gd: GdConfig::default(),
            obs_stride: 1,
            initial_analysis: false,
            enkf_process_noise: true,
            enkf_lagged_covariance: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::InvalidConfig(msg.to_owned()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if self.steps < 1 {
            return bad("steps must be at least 1");
        }
        if !(self.r_var > 0.0 && self.r_var.is_finite()) {
            return bad("r-var must be positive");
        }
        if self.ensemble_size < 2 {
            return bad("ensemble-size must be at least 2");
        }
        if !(self.d_scale > 0.0 && self.d_scale.is_finite()) {
            return bad("d-scale must be positive");
        }
        if self.obs_stride < 1 {
            return bad("obs-stride must be at least 1");
        }
        self.gd.validate().map_err(|e| HarnessError::InvalidConfig(e.to_string()))
    }
}
