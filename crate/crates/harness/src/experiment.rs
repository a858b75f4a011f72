use assim_core::enkf::{run_enkf_with, CovarianceSource, EnkfConfig, EnkfRun};
use assim_core::kalman::{run_kf_with, CovarianceForm, GaussianState, KfConfig};
use assim_core::metrics::{rmse, second_half};
use assim_core::ssmodel::{
    discretize, generate_observations, simulate_truth, spring_mass_default, ObservationModel, Trajectory,
};
use assim_core::var3d::{run_cycled_3dvar_with, CycleConfig};
use assim_core::{Matrix, RngStream, Vector};

use crate::config::{ExperimentConfig, Method};
use crate::error::HarnessError;

// Substream tags under the run seed.
const TRUTH_STREAM: u64 = 1;
const OBS_STREAM: u64 = 2;
const ENKF_STREAM: u64 = 3;

/// RMSE summary of one estimate series against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodMetrics {
    pub name: &'static str,
    pub rmse_x1: f64,
    pub rmse_x2: f64,
    pub rmse_x1_second_half: f64,
}

/// Everything one run produced; every series has `steps + 1` entries.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub truth: Trajectory,
    /// `None` at steps skipped by the observation stride.
    pub observations: Vec<Option<Vector>>,
    /// Noise-free model forecast from the initial guess, no assimilation.
    pub open_loop: Vec<Vector>,
    pub kf: Option<Vec<GaussianState>>,
    pub enkf: Option<EnkfRun>,
    pub var3d: Option<Vec<Vector>>,
    /// Selected methods in [`Method`] order, then `openloop`.
    pub metrics: Vec<MethodMetrics>,
}

impl RunResult {
    pub fn estimates(&self, method: Method) -> Option<Vec<Vector>> {
        match method {
            Method::Kf => self.kf.as_ref().map(|s| s.iter().map(|g| g.mean.clone()).collect()),
            Method::Enkf => self.enkf.as_ref().map(|r| r.means.clone()),
            Method::Var3d => self.var3d.clone(),
        }
    }

    pub fn metric(&self, name: &str) -> Option<&MethodMetrics> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

fn score(name: &'static str, estimates: &[Vector], truth: &Trajectory) -> Result<MethodMetrics, HarnessError> {
    let all = 0..truth.len();
    Ok(MethodMetrics {
        name,
        rmse_x1: rmse(estimates, truth, 0, all.clone())?,
        rmse_x2: rmse(estimates, truth, 1, all)?,
        rmse_x1_second_half: rmse(estimates, truth, 0, second_half(truth.len()))?,
    })
}

/// Runs the configured twin experiment. Deterministic for a given config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult, HarnessError> {
    cfg.validate()?;
    let setup = spring_mass_default();
    let model = discretize(&setup.system, cfg.dt, setup.q.clone())?;
    let obs_model = ObservationModel::new(setup.h.clone(), Matrix::diagonal(&[cfg.r_var]))?;

    let truth = simulate_truth(&model, &setup.truth_x0, cfg.steps, &mut RngStream::with_stream(cfg.seed, TRUTH_STREAM))?;
    // Draw every observation so the realization does not depend on the stride.
    let all_obs = generate_observations(&truth, &obs_model, &mut RngStream::with_stream(cfg.seed, OBS_STREAM))?;
    let observations: Vec<Option<Vector>> = all_obs
        .into_iter()
        .enumerate()
        .map(|(k, z)| (k % cfg.obs_stride == 0).then_some(z))
        .collect();

    let mut open_loop = Vec::with_capacity(truth.len());
    open_loop.push(setup.guess_x0.clone());
    for k in 1..truth.len() {
        let next = model.propagate(&open_loop[k - 1], (k - 1) as f64 * cfg.dt)?;
        open_loop.push(next);
    }

    let kf = if cfg.methods.contains(&Method::Kf) {
        let kf_cfg = KfConfig { form: CovarianceForm::Joseph, initial_analysis: cfg.initial_analysis };
        Some(run_kf_with(&model, &obs_model, &observations, &setup.guess_x0, &setup.p0, &kf_cfg)?)
    } else {
        None
    };

    let enkf = if cfg.methods.contains(&Method::Enkf) {
        let enkf_cfg = EnkfConfig {
            ensemble_size: cfg.ensemble_size,
            add_noise: cfg.enkf_process_noise,
            covariance_source: if cfg.enkf_lagged_covariance {
                CovarianceSource::PreviousAnalysis
            } else {
                CovarianceSource::Forecast
            },
            initial_analysis: cfg.initial_analysis,
        };
        let mut rng = RngStream::with_stream(cfg.seed, ENKF_STREAM);
        Some(run_enkf_with(&model, &obs_model, &observations, &setup.guess_x0, &setup.p0, &enkf_cfg, &mut rng)?)
    } else {
        None
    };

    let var3d = if cfg.methods.contains(&Method::Var3d) {
        let d = Matrix::identity(2).scale(cfg.d_scale);
        let cycle = CycleConfig { solver: cfg.solver, gd: cfg.gd, initial_analysis: cfg.initial_analysis };
        Some(run_cycled_3dvar_with(&model, &obs_model, &observations, &setup.guess_x0, &d, &cycle)?)
    } else {
        None
    };

    let mut result = RunResult {
        config: cfg.clone(),
        truth,
        observations,
        open_loop,
        kf,
        enkf,
        var3d,
        metrics: Vec::new(),
    };
    for method in &cfg.methods {
        let estimates = result.estimates(*method).expect("selected methods were run");
        result.metrics.push(score(method.name(), &estimates, &result.truth)?);
    }
    result.metrics.push(score("openloop", &result.open_loop, &result.truth)?);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn short(methods: &[Method]) -> ExperimentConfig {
        ExperimentConfig { steps: 300, methods: methods.iter().copied().collect(), ..Default::default() }
    }

    #[test]
    fn no_methods_gives_truth_and_observations_only() {
        let r = run_experiment(&ExperimentConfig { methods: BTreeSet::new(), ..short(&[]) }).unwrap();
        assert_eq!(r.truth.len(), 301);
        assert_eq!(r.observations.len(), 301);
        assert!(r.kf.is_none() && r.enkf.is_none() && r.var3d.is_none());
        assert_eq!(r.metrics.len(), 1);
        assert_eq!(r.metrics[0].name, "openloop");
    }

    #[test]
    fn series_lengths_match_truth() {
        let r = run_experiment(&short(&Method::ALL)).unwrap();
        for m in Method::ALL {
            assert_eq!(r.estimates(m).unwrap().len(), r.truth.len());
        }
        assert_eq!(r.open_loop.len(), r.truth.len());
        let names: Vec<_> = r.metrics.iter().map(|m| m.name).collect();
        assert_eq!(names, ["kf", "enkf", "var3d", "openloop"]);
    }

    #[test]
    fn stride_masks_observations_but_keeps_realization() {
        let dense = run_experiment(&short(&[])).unwrap();
        let sparse = run_experiment(&ExperimentConfig { obs_stride: 4, ..short(&[]) }).unwrap();
        for (k, (a, b)) in dense.observations.iter().zip(&sparse.observations).enumerate() {
            if k % 4 == 0 {
                assert_eq!(a, b);
            } else {
                assert!(b.is_none());
            }
        }
    }

    #[test]
    fn method_selection_does_not_change_shared_data() {
        let a = run_experiment(&short(&[Method::Kf])).unwrap();
        let b = run_experiment(&short(&Method::ALL)).unwrap();
        assert_eq!(a.truth, b.truth);
        assert_eq!(a.observations, b.observations);
        assert_eq!(a.kf, b.kf);
    }

    #[test]
    fn gd_and_analytic_cycles_agree() {
        use assim_core::var3d::{GdConfig, Solver};
        let analytic = run_experiment(&short(&[Method::Var3d])).unwrap();
        let gd = run_experiment(&ExperimentConfig {
            solver: Solver::GradientDescent,
            gd: GdConfig { epsilon: 1e-8, ..GdConfig::default() },
            ..short(&[Method::Var3d])
        })
        .unwrap();
        for (a, b) in analytic.var3d.unwrap().iter().zip(gd.var3d.unwrap().iter()) {
            assert!(a.max_abs_diff(b) < 1e-5);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let err = run_experiment(&ExperimentConfig { dt: -1.0, ..Default::default() }).unwrap_err();
        assert!(matches!(err, HarnessError::InvalidConfig(_)));
    }
}
