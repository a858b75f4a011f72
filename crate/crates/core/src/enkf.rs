//! Stochastic (perturbed-observation) ensemble Kalman filter.
//!
//! The forecast distribution is carried by `m` members. At each analysis the
//! gain is built from the sample covariance of the ensemble,
//! `K = Pₑ Hᵀ (H Pₑ Hᵀ + R)⁻¹`, and every member is pulled toward its own
//! noisy copy of the observation, `xᵢ ← xᵢ + K (z + uᵢ − H xᵢ)` with
//! `uᵢ ~ N(0, R)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kalman::kalman_gain;
use crate::linalg::{Matrix, Vector};
use crate::rng::{GaussianSampler, RngStream};
use crate::ssmodel::{DiscreteModel, ObservationModel};

/// `m ≥ 2` state realizations of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<Vector>,
}

impl Ensemble {
    pub fn new(members: Vec<Vector>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::InvalidArgument {
                name: "ensemble size",
                reason: "need at least 2 members",
            });
        }
        let n = members[0].len();
        if let Some(bad) = members.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                op: "Ensemble",
                expected: (n, 1),
                found: (bad.len(), 1),
            });
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[Vector] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn state_dim(&self) -> usize {
        self.members[0].len()
    }

    fn map(&self, f: impl FnMut(&Vector) -> Result<Vector>) -> Result<Ensemble> {
        Ok(Ensemble { members: self.members.iter().map(f).collect::<Result<_>>()? })
    }
}

/// `m` independent draws from `N(x0, P0)`.
pub fn init_ensemble(x0: &Vector, p0: &Matrix, m: usize, rng: &mut RngStream) -> Result<Ensemble> {
    if m < 2 {
        return Err(Error::InvalidArgument { name: "ensemble size", reason: "need at least 2 members" });
    }
    let sampler = GaussianSampler::new(x0.clone(), p0)?;
    Ensemble::new((0..m).map(|_| sampler.sample(rng)).collect())
}

pub fn ensemble_mean(e: &Ensemble) -> Vector {
    let m = e.size() as f64;
    let mut acc = Vector::zeros(e.state_dim());
    for x in e.members() {
        for i in 0..acc.len() {
            acc[i] += x[i];
        }
    }
    acc.scale(1.0 / m)
}

/// Unbiased sample covariance `Σ (xᵢ − x̄)(xᵢ − x̄)ᵀ / (m − 1)`.
pub fn ensemble_covariance(e: &Ensemble) -> Matrix {
    let n = e.state_dim();
    let mean = ensemble_mean(e);
    let mut cov = Matrix::zeros(n, n);
    for x in e.members() {
        let d = x.sub(&mean).expect("members share the mean's dimension");
        for i in 0..n {
            for j in 0..=i {
                cov[(i, j)] += d[i] * d[j];
            }
        }
    }
    let norm = 1.0 / (e.size() - 1) as f64;
    for i in 0..n {
        for j in 0..=i {
            let v = cov[(i, j)] * norm;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    cov
}

/// Pushes every member through `Ad x + Bd u(t_prev)`, adding an independent
/// `N(0, Q)` draw per member when `add_noise` is set.
pub fn forecast_ensemble(
    e: &Ensemble,
    model: &DiscreteModel,
    t_prev: f64,
    rng: &mut RngStream,
    add_noise: bool,
) -> Result<Ensemble> {
    if e.state_dim() != model.state_dim() {
        return Err(Error::DimensionMismatch {
            op: "forecast_ensemble",
            expected: (model.state_dim(), 1),
            found: (e.state_dim(), 1),
        });
    }
    let noise = if add_noise {
        Some(GaussianSampler::new(Vector::zeros(model.state_dim()), model.q())?)
    } else {
        None
    };
    e.map(|x| {
        let next = model.propagate(x, t_prev)?;
        match &noise {
            Some(w) => next.add(&w.sample(rng)),
            None => Ok(next),
        }
    })
}

/// `m` copies `z + uᵢ` with `uᵢ ~ N(0, R)`.
pub fn perturb_observation(z: &Vector, r: &Matrix, m: usize, rng: &mut RngStream) -> Result<Vec<Vector>> {
    let sampler = GaussianSampler::new(z.clone(), r)?;
    Ok((0..m).map(|_| sampler.sample(rng)).collect())
}

/// Kalman gain with the ensemble's sample covariance in place of `P'`.
pub fn ensemble_gain(e: &Ensemble, obs: &ObservationModel) -> Result<Matrix> {
    kalman_gain(&ensemble_covariance(e), obs.h(), obs.r())
}

/// `xᵢ + K (zᵢ − H xᵢ)` for each member against its own observation.
pub fn apply_gain(forecast: &Ensemble, observations: &[Vector], gain: &Matrix, h: &Matrix) -> Result<Ensemble> {
    if observations.len() != forecast.size() {
        return Err(Error::DimensionMismatch {
            op: "apply_gain",
            expected: (forecast.size(), 1),
            found: (observations.len(), 1),
        });
    }
    let members = forecast
        .members()
        .iter()
        .zip(observations)
        .map(|(x, z)| {
            let innovation = z.sub(&h.mul_vec(x)?)?;
            x.add(&gain.mul_vec(&innovation)?)
        })
        .collect::<Result<_>>()?;
    Ok(Ensemble { members })
}

/// Analysis step: gain from the forecast spread, then each member is
/// updated against its own perturbed copy of `z`.
pub fn enkf_update(forecast: &Ensemble, z: &Vector, obs: &ObservationModel, rng: &mut RngStream) -> Result<Ensemble> {
    if z.len() != obs.obs_dim() || obs.state_dim() != forecast.state_dim() {
        return Err(Error::DimensionMismatch {
            op: "enkf_update",
            expected: (obs.obs_dim(), forecast.state_dim()),
            found: (z.len(), obs.state_dim()),
        });
    }
    let gain = ensemble_gain(forecast, obs)?;
    let perturbed = perturb_observation(z, obs.r(), forecast.size(), rng)?;
    apply_gain(forecast, &perturbed, &gain, obs.h())
}

/// Which ensemble supplies the covariance behind the gain at step `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceSource {
    /// The forecast ensemble being updated.
    #[default]
    Forecast,
    /// The previous step's analysis ensemble, before it is propagated.
    PreviousAnalysis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnkfConfig {
    pub ensemble_size: usize,
    /// Add `N(0, Q)` to each member during the forecast.
    pub add_noise: bool,
    pub covariance_source: CovarianceSource,
    /// Also assimilate the observation at `k = 0` into the initial ensemble.
    pub initial_analysis: bool,
}

impl Default for EnkfConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 100,
            add_noise: true,
            covariance_source: CovarianceSource::Forecast,
            initial_analysis: false,
        }
    }
}

/// Ensemble mean and covariance after each analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct EnkfRun {
    pub means: Vec<Vector>,
    pub covs: Vec<Matrix>,
}

pub fn run_enkf(
    model: &DiscreteModel,
    obs: &ObservationModel,
    observations: &[Vector],
    x0: &Vector,
    p0: &Matrix,
    m: usize,
    rng: &mut RngStream,
) -> Result<EnkfRun> {
    let series: Vec<Option<Vector>> = observations.iter().cloned().map(Some).collect();
    let cfg = EnkfConfig { ensemble_size: m, ..EnkfConfig::default() };
    run_enkf_with(model, obs, &series, x0, p0, &cfg, rng)
}

/// Full filter loop. Index 0 describes the initial ensemble; every later
/// index is forecast from the previous one and then updated if an
/// observation is present.
pub fn run_enkf_with(
    model: &DiscreteModel,
    obs: &ObservationModel,
    observations: &[Option<Vector>],
    x0: &Vector,
    p0: &Matrix,
    cfg: &EnkfConfig,
    rng: &mut RngStream,
) -> Result<EnkfRun> {
    if observations.is_empty() {
        return Err(Error::InvalidArgument { name: "observations", reason: "must not be empty" });
    }
    let m = cfg.ensemble_size;
    let mut ensemble = init_ensemble(x0, p0, m, rng)?;
    if cfg.initial_analysis {
        if let Some(z) = &observations[0] {
            ensemble = enkf_update(&ensemble, z, obs, rng)?;
        }
    }

    let mut run = EnkfRun {
        means: Vec::with_capacity(observations.len()),
        covs: Vec::with_capacity(observations.len()),
    };
    run.means.push(ensemble_mean(&ensemble));
    run.covs.push(ensemble_covariance(&ensemble));

    for (k, z) in observations.iter().enumerate().skip(1) {
        let t_prev = (k - 1) as f64 * model.dt();
        let forecast = forecast_ensemble(&ensemble, model, t_prev, rng, cfg.add_noise)?;
        ensemble = match z {
            Some(z) => {
                let gain = match cfg.covariance_source {
                    CovarianceSource::Forecast => ensemble_gain(&forecast, obs)?,
                    CovarianceSource::PreviousAnalysis => ensemble_gain(&ensemble, obs)?,
                };
                let perturbed = perturb_observation(z, obs.r(), m, rng)?;
                apply_gain(&forecast, &perturbed, &gain, obs.h())?
            }
            None => forecast,
        };
        run.means.push(ensemble_mean(&ensemble));
        run.covs.push(ensemble_covariance(&ensemble));
    }
    Ok(run)
}
