//! Linear state-space models and the synthetic data they generate.
//!
//! A [`ContinuousSystem`] `x'(t) = A x(t) + B u(t)` is turned into a
//! [`DiscreteModel`] by forward Euler; the discrete model then drives the
//! truth run `x_k = Ad x_{k-1} + Bd u(t_{k-1}) + w_{k-1}` with
//! `w ~ N(0, Q)`, and an [`ObservationModel`] maps states to noisy
//! measurements `z_k = H x_k + v_k` with `v ~ N(0, R)`.
//!
//! Forcing is always evaluated at the start of the step, `t_{k-1}`, both here
//! and in every filter.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::rng::{GaussianSampler, RngStream};

/// External input `u(t)`.
#[derive(Clone)]
pub enum Forcing {
    /// `u(t) = 0` in `dim` components.
    Zero { dim: usize },
    /// Every component zero except `component`, which is `amplitude * cos(frequency * t)`.
    Cosine { dim: usize, component: usize, amplitude: f64, frequency: f64 },
    /// Arbitrary input; `f` must always return `dim` components.
    Custom { dim: usize, f: Arc<dyn Fn(f64) -> Vector + Send + Sync> },
}

impl Forcing {
    pub fn dim(&self) -> usize {
        match self {
            Forcing::Zero { dim } | Forcing::Cosine { dim, .. } | Forcing::Custom { dim, .. } => {
                *dim
            }
        }
    }

    pub fn eval(&self, t: f64) -> Vector {
        match self {
            Forcing::Zero { dim } => Vector::zeros(*dim),
            Forcing::Cosine { dim, component, amplitude, frequency } => {
                let mut u = Vector::zeros(*dim);
                u[*component] = amplitude * libm::cos(frequency * t);
                u
            }
            Forcing::Custom { f, .. } => f(t),
        }
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Zero { dim } => f.debug_struct("Zero").field("dim", dim).finish(),
            Forcing::Cosine { dim, component, amplitude, frequency } => f
                .debug_struct("Cosine")
                .field("dim", dim)
                .field("component", component)
                .field("amplitude", amplitude)
                .field("frequency", frequency)
                .finish(),
            Forcing::Custom { dim, .. } => f.debug_struct("Custom").field("dim", dim).finish(),
        }
    }
}

/// `x'(t) = A x(t) + B u(t)`.
#[derive(Debug, Clone)]
pub struct ContinuousSystem {
    a: Matrix,
    b: Matrix,
    forcing: Forcing,
}

impl ContinuousSystem {
    pub fn new(a: Matrix, b: Matrix, forcing: Forcing) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare { op: "ContinuousSystem", rows: a.rows(), cols: a.cols() });
        }
        if b.rows() != a.rows() || b.cols() != forcing.dim() {
            return Err(Error::DimensionMismatch {
                op: "ContinuousSystem",
                expected: (a.rows(), forcing.dim()),
                found: b.shape(),
            });
        }
        Ok(Self { a, b, forcing })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }
}

/// Per-step linear transition with additive Gaussian process noise.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    ad: Matrix,
    bd: Matrix,
    q: Matrix,
    dt: f64,
    forcing: Forcing,
}

impl DiscreteModel {
    /// Builds a model directly from its discrete matrices.
    pub fn new(ad: Matrix, bd: Matrix, q: Matrix, dt: f64, forcing: Forcing) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument { name: "dt", reason: "must be positive and finite" });
        }
        if !ad.is_square() {
            return Err(Error::NotSquare { op: "DiscreteModel", rows: ad.rows(), cols: ad.cols() });
        }
        let n = ad.rows();
        if bd.rows() != n || bd.cols() != forcing.dim() {
            return Err(Error::DimensionMismatch {
                op: "DiscreteModel Bd",
                expected: (n, forcing.dim()),
                found: bd.shape(),
            });
        }
        if q.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                op: "DiscreteModel Q",
                expected: (n, n),
                found: q.shape(),
            });
        }
        check_psd(&q, "Q")?;
        Ok(Self { ad, bd, q, dt, forcing })
    }

    pub fn ad(&self) -> &Matrix {
        &self.ad
    }

    pub fn bd(&self) -> &Matrix {
        &self.bd
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }

    pub fn state_dim(&self) -> usize {
        self.ad.rows()
    }

    /// Same dynamics with a different process-noise covariance.
    pub fn with_process_noise(&self, q: Matrix) -> Result<Self> {
        Self::new(self.ad.clone(), self.bd.clone(), q, self.dt, self.forcing.clone())
    }

    /// Noise-free step `Ad x + Bd u(t_prev)`.
    pub fn propagate(&self, x: &Vector, t_prev: f64) -> Result<Vector> {
        let drift = self.ad.mul_vec(x)?;
        let input = self.bd.mul_vec(&self.forcing.eval(t_prev))?;
        drift.add(&input)
    }
}

fn check_psd(m: &Matrix, name: &'static str) -> Result<()> {
    let n = m.rows();
    for i in 0..n {
        for j in 0..i {
            let scale = 1.0f64.max(m[(i, j)].abs()).max(m[(j, i)].abs());
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::InvalidArgument { name, reason: "must be symmetric" });
            }
        }
    }
    let jitter = 1e-12 * m.max_abs().max(1.0);
    let shifted = m.add(&Matrix::identity(n).scale(jitter))?;
    shifted
        .cholesky()
        .map(|_| ())
        .map_err(|_| Error::InvalidArgument { name, reason: "must be positive semidefinite" })
}

/// `z = H x + v`, `v ~ N(0, R)`.
#[derive(Debug, Clone)]
pub struct ObservationModel {
    h: Matrix,
    r: Matrix,
}

impl ObservationModel {
    pub fn new(h: Matrix, r: Matrix) -> Result<Self> {
        let q = h.rows();
        if r.shape() != (q, q) {
            return Err(Error::DimensionMismatch {
                op: "ObservationModel R",
                expected: (q, q),
                found: r.shape(),
            });
        }
        Ok(Self { h, r })
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn obs_dim(&self) -> usize {
        self.h.rows()
    }

    pub fn state_dim(&self) -> usize {
        self.h.cols()
    }

    /// Noise-free `H x`.
    pub fn observe(&self, x: &Vector) -> Result<Vector> {
        self.h.mul_vec(x)
    }
}

/// States on the uniform grid `t_k = k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dt: f64,
    states: Vec<Vector>,
}

impl Trajectory {
    pub fn new(dt: f64, states: Vec<Vector>) -> Result<Self> {
        let first = states.first().ok_or(Error::InvalidArgument {
            name: "trajectory",
            reason: "must contain at least one state",
        })?;
        if let Some(bad) = states.iter().find(|s| s.len() != first.len()) {
            return Err(Error::DimensionMismatch {
                op: "Trajectory",
                expected: (first.len(), 1),
                found: (bad.len(), 1),
            });
        }
        Ok(Self { dt, states })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn states(&self) -> &[Vector] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }
}

/// The forced spring-mass study: system, observation operator and initial data.
#[derive(Debug, Clone)]
pub struct SpringMassSetup {
    pub system: ContinuousSystem,
    /// Position-only observation operator `[1 0]`; R is chosen by the caller.
    pub h: Matrix,
    pub truth_x0: Vector,
    pub guess_x0: Vector,
    pub p0: Matrix,
    pub q: Matrix,
}

/// `y'' + 0.45 y' + y = 3 cos(2t)` with `y(0) = 2`, `y'(0) = 0`, estimated
/// from a zero guess with `P0 = 0.05 I` under process noise `Q = 0.0005 I`.
pub fn spring_mass_default() -> SpringMassSetup {
    SpringMassSetup {
        system: second_order_to_state_space(0.45, 1.0, 3.0, 2.0),
        h: Matrix::from_rows(&[[1.0, 0.0]]).expect("literal"),
        truth_x0: Vector::from_slice(&[2.0, 0.0]).expect("literal"),
        guess_x0: Vector::zeros(2),
        p0: Matrix::diagonal(&[0.05, 0.05]),
        q: Matrix::diagonal(&[0.0005, 0.0005]),
    }
}

/// `y'' + damping y' + stiffness y = amplitude cos(freq t)` as a first-order
/// system in `(y, y')` with `B = I`.
pub fn second_order_to_state_space(
    damping: f64,
    stiffness: f64,
    forcing_amplitude: f64,
    forcing_freq: f64,
) -> ContinuousSystem {
    let a = Matrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => 1.0,
        (1, 0) => -stiffness,
        (1, 1) => -damping,
        _ => 0.0,
    });
    let forcing = Forcing::Cosine {
        dim: 2,
        component: 1,
        amplitude: forcing_amplitude,
        frequency: forcing_freq,
    };
    ContinuousSystem::new(a, Matrix::identity(2), forcing).expect("2x2 system is consistent")
}

/// Forward Euler: `Ad = I + dt A`, `Bd = dt B`; `q` is the per-step noise
/// covariance and is stored unchanged.
pub fn discretize(sys: &ContinuousSystem, dt: f64, q: Matrix) -> Result<DiscreteModel> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument { name: "dt", reason: "must be positive and finite" });
    }
    let n = sys.state_dim();
    let ad = Matrix::identity(n).add(&sys.a.scale(dt))?;
    let bd = sys.b.scale(dt);
    DiscreteModel::new(ad, bd, q, dt, sys.forcing.clone())
}

/// Runs the stochastic model for `steps` steps from `x0`. The trajectory holds
/// `steps + 1` states, `x0` first. A zero `Q` draws nothing from `rng`.
pub fn simulate_truth(
    model: &DiscreteModel,
    x0: &Vector,
    steps: usize,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidArgument { name: "steps", reason: "must be at least 1" });
    }
    if x0.len() != model.state_dim() {
        return Err(Error::DimensionMismatch {
            op: "simulate_truth",
            expected: (model.state_dim(), 1),
            found: (x0.len(), 1),
        });
    }
    let noise = GaussianSampler::new(Vector::zeros(model.state_dim()), model.q())?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.clone());
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * model.dt();
        let mean = model.propagate(&states[k - 1], t_prev)?;
        states.push(mean.add(&noise.sample(rng))?);
    }
    Trajectory::new(model.dt(), states)
}

/// One noisy observation per trajectory entry, including `k = 0`.
pub fn generate_observations(
    truth: &Trajectory,
    obs: &ObservationModel,
    rng: &mut RngStream,
) -> Result<Vec<Vector>> {
    let n = truth.states()[0].len();
    if obs.state_dim() != n {
        return Err(Error::DimensionMismatch {
            op: "generate_observations",
            expected: (obs.obs_dim(), n),
            found: obs.h().shape(),
        });
    }
    let noise = GaussianSampler::new(Vector::zeros(obs.obs_dim()), obs.r())?;
    truth
        .states()
        .iter()
        .map(|x| obs.observe(x)?.add(&noise.sample(rng)))
        .collect()
}
