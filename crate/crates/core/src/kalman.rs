//! Classical Kalman filter for linear-Gaussian models.
//!
//! ```text
//! predict:  x' = Ad x + Bd u(t_prev)         P' = Ad P Adᵀ + Q
//! gain:     K  = P' Hᵀ (H P' Hᵀ + R)⁻¹
//! update:   x  = x' + K (z − H x')
//!           P  = (I − K H) P'                             (simplified)
//!           P  = (I − K H) P' (I − K H)ᵀ + K R Kᵀ          (Joseph)
//! ```
//!
//! Every covariance handed back is symmetrized as `(P + Pᵀ)/2`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::ssmodel::{DiscreteModel, ObservationModel};

/// A mean and its error covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub mean: Vector,
    pub cov: Matrix,
}

impl GaussianState {
    pub fn new(mean: Vector, cov: Matrix) -> Result<Self> {
        if cov.shape() != (mean.len(), mean.len()) {
            return Err(Error::DimensionMismatch {
                op: "GaussianState",
                expected: (mean.len(), mean.len()),
                found: cov.shape(),
            });
        }
        Ok(Self { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Posterior covariance formula used by [`update`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CovarianceForm {
    /// `(I − K H) P'`; exact only at the optimal gain.
    Simplified,
    /// `(I − K H) P' (I − K H)ᵀ + K R Kᵀ`; valid for any gain.
    #[default]
    Joseph,
}

/// Propagates the estimate one step through the model.
pub fn predict(prev: &GaussianState, model: &DiscreteModel, t_prev: f64) -> Result<GaussianState> {
    if prev.dim() != model.state_dim() {
        return Err(Error::DimensionMismatch {
            op: "predict",
            expected: (model.state_dim(), 1),
            found: (prev.dim(), 1),
        });
    }
    let mean = model.propagate(&prev.mean, t_prev)?;
    let ad = model.ad();
    let cov = ad.mul(&prev.cov)?.mul(&ad.transpose())?.add(model.q())?.symmetrize()?;
    Ok(GaussianState { mean, cov })
}

/// `K = P' Hᵀ (H P' Hᵀ + R)⁻¹`, shape `n x q`.
pub fn kalman_gain(p_prior: &Matrix, h: &Matrix, r: &Matrix) -> Result<Matrix> {
    let pht = p_prior.mul(&h.transpose())?;
    let innovation_cov = h.mul(&pht)?.add(r)?;
    let inv = innovation_cov.invert().map_err(|e| match e {
        Error::Singular { pivot, .. } => Error::Singular { op: "kalman_gain", pivot },
        other => other,
    })?;
    pht.mul(&inv)
}

/// `(I − K H) P'`, symmetrized.
pub fn simplified_covariance(p_prior: &Matrix, k: &Matrix, h: &Matrix) -> Result<Matrix> {
    let n = p_prior.rows();
    let i_kh = Matrix::identity(n).sub(&k.mul(h)?)?;
    i_kh.mul(p_prior)?.symmetrize()
}

/// `(I − K H) P' (I − K H)ᵀ + K R Kᵀ`, symmetrized.
pub fn joseph_covariance(p_prior: &Matrix, k: &Matrix, h: &Matrix, r: &Matrix) -> Result<Matrix> {
    let n = p_prior.rows();
    let i_kh = Matrix::identity(n).sub(&k.mul(h)?)?;
    let propagated = i_kh.mul(p_prior)?.mul(&i_kh.transpose())?;
    let obs_term = k.mul(r)?.mul(&k.transpose())?;
    propagated.add(&obs_term)?.symmetrize()
}

/// Assimilates observation `z` into `prior`.
pub fn update(
    prior: &GaussianState,
    z: &Vector,
    obs: &ObservationModel,
    form: CovarianceForm,
) -> Result<GaussianState> {
    let h = obs.h();
    if h.cols() != prior.dim() || z.len() != obs.obs_dim() {
        return Err(Error::DimensionMismatch {
            op: "kalman update",
            expected: (obs.obs_dim(), prior.dim()),
            found: (z.len(), h.cols()),
        });
    }
    let k = kalman_gain(&prior.cov, h, obs.r())?;
    let innovation = z.sub(&h.mul_vec(&prior.mean)?)?;
    let mean = prior.mean.add(&k.mul_vec(&innovation)?)?;
    let cov = match form {
        CovarianceForm::Simplified => simplified_covariance(&prior.cov, &k, h)?,
        CovarianceForm::Joseph => joseph_covariance(&prior.cov, &k, h, obs.r())?,
    };
    Ok(GaussianState { mean, cov })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KfConfig {
    pub form: CovarianceForm,
    /// Also assimilate the observation at `k = 0` into `(x0, P0)`.
    pub initial_analysis: bool,
}

/// Filters a fully observed series. Returns one analysis per observation,
/// index 0 being `(x0, P0)` itself.
pub fn run_kf(
    model: &DiscreteModel,
    obs: &ObservationModel,
    observations: &[Vector],
    x0: &Vector,
    p0: &Matrix,
) -> Result<Vec<GaussianState>> {
    let series: Vec<Option<Vector>> = observations.iter().cloned().map(Some).collect();
    run_kf_with(model, obs, &series, x0, p0, &KfConfig::default())
}

/// Like [`run_kf`], but steps whose observation is `None` are forecast only.
pub fn run_kf_with(
    model: &DiscreteModel,
    obs: &ObservationModel,
    observations: &[Option<Vector>],
    x0: &Vector,
    p0: &Matrix,
    cfg: &KfConfig,
) -> Result<Vec<GaussianState>> {
    if observations.is_empty() {
        return Err(Error::InvalidArgument { name: "observations", reason: "must not be empty" });
    }
    let mut state = GaussianState::new(x0.clone(), p0.clone())?;
    if cfg.initial_analysis {
        if let Some(z) = &observations[0] {
            state = update(&state, z, obs, cfg.form)?;
        }
    }
    let mut out = Vec::with_capacity(observations.len());
    out.push(state);
    for (k, z) in observations.iter().enumerate().skip(1) {
        let t_prev = (k - 1) as f64 * model.dt();
        let prior = predict(&out[k - 1], model, t_prev)?;
        let analysis = match z {
            Some(z) => update(&prior, z, obs, cfg.form)?,
            None => prior,
        };
        out.push(analysis);
    }
    Ok(out)
}
