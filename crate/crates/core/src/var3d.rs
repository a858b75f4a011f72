//! Three-dimensional variational (3D-Var) analysis.
//!
//! The analysis minimizes
//!
//! ```text
//! J(x) = ½ (x − x_b)ᵀ D⁻¹ (x − x_b) + ½ (y − H x)ᵀ R⁻¹ (y − H x)
//! ∇J(x) = D⁻¹ (x − x_b) − Hᵀ R⁻¹ (y − H x)
//! ```
//!
//! Three routes reach the same minimizer: the closed form
//! `x = x_b + K (y − H x_b)` with `K = (D⁻¹ + Hᵀ R⁻¹ H)⁻¹ Hᵀ R⁻¹`, gradient
//! descent with step halving, and the Tikhonov problem
//! `min ‖b − A z‖² + μ² ‖z‖²` obtained by whitening with Cholesky factors.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::ssmodel::{DiscreteModel, ObservationModel};

/// Background, observation and their error covariances for one analysis.
#[derive(Debug, Clone)]
pub struct VarProblem {
    x_b: Vector,
    d: Matrix,
    y: Vector,
    h: Matrix,
    r: Matrix,
    d_inv: Matrix,
    r_inv: Matrix,
}

impl VarProblem {
    /// Validates shapes and that `D` and `R` are positive definite.
    pub fn new(x_b: Vector, d: Matrix, y: Vector, h: Matrix, r: Matrix) -> Result<Self> {
        let n = x_b.len();
        let q = y.len();
        if d.shape() != (n, n) {
            return Err(Error::DimensionMismatch { op: "VarProblem D", expected: (n, n), found: d.shape() });
        }
        if h.shape() != (q, n) {
            return Err(Error::DimensionMismatch { op: "VarProblem H", expected: (q, n), found: h.shape() });
        }
        if r.shape() != (q, q) {
            return Err(Error::DimensionMismatch { op: "VarProblem R", expected: (q, q), found: r.shape() });
        }
        d.cholesky()?;
        r.cholesky()?;
        let d_inv = d.invert()?;
        let r_inv = r.invert()?;
        Ok(Self { x_b, d, y, h, r, d_inv, r_inv })
    }

    pub fn background(&self) -> &Vector {
        &self.x_b
    }

    pub fn background_cov(&self) -> &Matrix {
        &self.d
    }

    pub fn observation(&self) -> &Vector {
        &self.y
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn state_dim(&self) -> usize {
        self.x_b.len()
    }

    fn check_state(&self, x: &Vector, op: &'static str) -> Result<()> {
        if x.len() != self.state_dim() {
            return Err(Error::DimensionMismatch {
                op,
                expected: (self.state_dim(), 1),
                found: (x.len(), 1),
            });
        }
        Ok(())
    }

    /// `D⁻¹ v + Hᵀ R⁻¹ H v`, the Hessian of `J` applied to `v`.
    fn hessian_apply(&self, v: &Vector) -> Result<Vector> {
        let background = self.d_inv.mul_vec(v)?;
        let obs = self.h.transpose().mul_vec(&self.r_inv.mul_vec(&self.h.mul_vec(v)?)?)?;
        background.add(&obs)
    }

    /// `D⁻¹ + Hᵀ R⁻¹ H`.
    pub fn hessian(&self) -> Result<Matrix> {
        let ht = self.h.transpose();
        self.d_inv.add(&ht.mul(&self.r_inv)?.mul(&self.h)?)
    }
}

/// `J(x)`; never negative.
pub fn cost(p: &VarProblem, x: &Vector) -> Result<f64> {
    p.check_state(x, "cost")?;
    let dx = x.sub(&p.x_b)?;
    let innovation = p.y.sub(&p.h.mul_vec(x)?)?;
    let background = dx.dot(&p.d_inv.mul_vec(&dx)?)?;
    let observation = innovation.dot(&p.r_inv.mul_vec(&innovation)?)?;
    Ok(0.5 * background + 0.5 * observation)
}

/// `∇J(x)`.
pub fn grad(p: &VarProblem, x: &Vector) -> Result<Vector> {
    p.check_state(x, "grad")?;
    let dx = x.sub(&p.x_b)?;
    let innovation = p.y.sub(&p.h.mul_vec(x)?)?;
    let pull = p.h.transpose().mul_vec(&p.r_inv.mul_vec(&innovation)?)?;
    p.d_inv.mul_vec(&dx)?.sub(&pull)
}

/// Exact `J(x + d) − J(x)` given `g = ∇J(x)`; free of the cancellation
/// that differencing two nearly equal costs suffers near the minimum.
pub fn cost_change(p: &VarProblem, g: &Vector, d: &Vector) -> Result<f64> {
    Ok(g.dot(d)? + 0.5 * d.dot(&p.hessian_apply(d)?)?)
}

/// Closed-form analysis and the gain that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub x: Vector,
    pub gain: Matrix,
}

/// `x = x_b + K (y − H x_b)` with `K = (D⁻¹ + Hᵀ R⁻¹ H)⁻¹ Hᵀ R⁻¹`.
pub fn analytic_analysis(p: &VarProblem) -> Result<Analysis> {
    let ht_rinv = p.h.transpose().mul(&p.r_inv)?;
    let gain = p.hessian()?.solve(&ht_rinv)?;
    let innovation = p.y.sub(&p.h.mul_vec(&p.x_b)?)?;
    let x = p.x_b.add(&gain.mul_vec(&innovation)?)?;
    Ok(Analysis { x, gain })
}

/// Gradient-descent settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdConfig {
    /// Initial trial step each iteration; halved until the cost does not increase.
    pub step_size: f64,
    /// Stop once `‖∇J‖ ≤ epsilon`.
    pub epsilon: f64,
    /// Iteration cap.
    pub n_max: usize,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self { step_size: 0.1, epsilon: 1e-6, n_max: 1000 }
    }
}

impl GdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidArgument { name: "step_size", reason: "must be positive" });
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument { name: "epsilon", reason: "must be positive" });
        }
        if self.n_max == 0 {
            return Err(Error::InvalidArgument { name: "n_max", reason: "must be positive" });
        }
        Ok(())
    }
}

const MAX_HALVINGS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct GdResult {
    pub x: Vector,
    pub iterations: usize,
    pub final_grad_norm: f64,
    /// `final_grad_norm ≤ epsilon`.
    pub converged: bool,
    /// `J` at the starting point and after every accepted step.
    pub cost_history: Vec<f64>,
}

/// Steepest descent from `x_init`. Each iteration starts from the configured
/// step and halves it until `J` does not increase. Stops on `‖∇J‖ ≤ ε`, on
/// `n_max` iterations, or when no step length yields a decrease.
pub fn gradient_descent(p: &VarProblem, x_init: &Vector, cfg: &GdConfig) -> Result<GdResult> {
    cfg.validate()?;
    p.check_state(x_init, "gradient_descent")?;
    let mut x = x_init.clone();
    let mut g = grad(p, &x)?;
    let mut cost_history = alloc::vec![cost(p, &x)?];
    let mut iterations = 0;

    while g.norm() > cfg.epsilon && iterations < cfg.n_max {
        let mut step = cfg.step_size;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let d = g.scale(-step);
            if cost_change(p, &g, &d)? <= 0.0 {
                accepted = Some(d);
                break;
            }
            step *= 0.5;
        }
        let Some(d) = accepted else { break };
        x = x.add(&d)?;
        g = grad(p, &x)?;
        cost_history.push(cost(p, &x)?);
        iterations += 1;
    }

    let final_grad_norm = g.norm();
    Ok(GdResult {
        x,
        iterations,
        final_grad_norm,
        converged: final_grad_norm <= cfg.epsilon,
        cost_history,
    })
}

/// `min_z ‖b − A z‖² + μ² ‖z‖²` together with the map back to state space.
///
/// With `D = σ_d² C_D`, `R = σ_r² C_R`, `C_D = L_D L_Dᵀ`, `C_R = L_R L_Rᵀ`:
/// `A = L_R⁻¹ H L_D`, `b = L_R⁻¹ (y − H x_b)`, `μ = σ_r / σ_d` and
/// `x = x_b + L_D z`. The objective equals `2 σ_r² J(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TikhonovProblem {
    pub design: Matrix,
    pub rhs: Vector,
    pub mu: f64,
    factor_d: Matrix,
    x_b: Vector,
}

impl TikhonovProblem {
    /// Same problem with a different regularization weight.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidArgument { name: "mu", reason: "must be finite and non-negative" });
        }
        Ok(Self { mu, ..self.clone() })
    }

    pub fn objective(&self, z: &Vector) -> Result<f64> {
        let residual = self.rhs.sub(&self.design.mul_vec(z)?)?;
        Ok(residual.dot(&residual)? + self.mu * self.mu * z.dot(z)?)
    }

    pub fn to_state(&self, z: &Vector) -> Result<Vector> {
        self.x_b.add(&self.factor_d.mul_vec(z)?)
    }

    pub fn from_state(&self, x: &Vector) -> Result<Vector> {
        let dx = x.sub(&self.x_b)?;
        self.factor_d.invert_lower_triangular()?.mul_vec(&dx)
    }

    /// `z* = (AᵀA + μ² I)⁻¹ Aᵀ b`.
    pub fn solve_z(&self) -> Result<Vector> {
        let at = self.design.transpose();
        let n = self.design.cols();
        let normal = at.mul(&self.design)?.add(&Matrix::identity(n).scale(self.mu * self.mu))?;
        normal.solve_vec(&at.mul_vec(&self.rhs)?).map_err(|e| match e {
            Error::Singular { pivot, .. } => Error::Singular { op: "tikhonov_solve", pivot },
            other => other,
        })
    }
}

/// Whitens `p` into Tikhonov form for the split `D = σ_d² C_D`, `R = σ_r² C_R`.
pub fn to_tikhonov(p: &VarProblem, sigma_d: f64, sigma_r: f64) -> Result<TikhonovProblem> {
    if !(sigma_d > 0.0 && sigma_d.is_finite()) {
        return Err(Error::InvalidArgument { name: "sigma_d", reason: "must be positive" });
    }
    if !(sigma_r > 0.0 && sigma_r.is_finite()) {
        return Err(Error::InvalidArgument { name: "sigma_r", reason: "must be positive" });
    }
    let factor_d = p.d.scale(1.0 / (sigma_d * sigma_d)).cholesky()?;
    let factor_r = p.r.scale(1.0 / (sigma_r * sigma_r)).cholesky()?;
    let whiten = factor_r.invert_lower_triangular()?;
    let design = whiten.mul(&p.h)?.mul(&factor_d)?;
    let rhs = whiten.mul_vec(&p.y.sub(&p.h.mul_vec(&p.x_b)?)?)?;
    Ok(TikhonovProblem { design, rhs, mu: sigma_r / sigma_d, factor_d, x_b: p.x_b.clone() })
}

/// Regularized least-squares solution mapped back to state space.
pub fn tikhonov_solve(t: &TikhonovProblem) -> Result<Vector> {
    t.to_state(&t.solve_z()?)
}

/// Minimizer used at each cycle of [`run_cycled_3dvar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    Analytic,
    GradientDescent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleConfig {
    pub solver: Solver,
    pub gd: GdConfig,
    /// Also analyze the observation at `k = 0` against `x0`.
    pub initial_analysis: bool,
}

impl Default for CycleConfig {
    fn default() -> Self {
        Self { solver: Solver::Analytic, gd: GdConfig::default(), initial_analysis: false }
    }
}

fn analyze(background: Vector, d: &Matrix, z: &Vector, obs: &ObservationModel, cfg: &CycleConfig) -> Result<Vector> {
    let p = VarProblem::new(background, d.clone(), z.clone(), obs.h().clone(), obs.r().clone())?;
    match cfg.solver {
        Solver::Analytic => Ok(analytic_analysis(&p)?.x),
        Solver::GradientDescent => Ok(gradient_descent(&p, p.background(), &cfg.gd)?.x),
    }
}

pub fn run_cycled_3dvar(
    model: &DiscreteModel,
    obs: &ObservationModel,
    observations: &[Vector],
    x0: &Vector,
    d: &Matrix,
    solver: Solver,
    gd: &GdConfig,
) -> Result<Vec<Vector>> {
    let series: Vec<Option<Vector>> = observations.iter().cloned().map(Some).collect();
    let cfg = CycleConfig { solver, gd: *gd, initial_analysis: false };
    run_cycled_3dvar_with(model, obs, &series, x0, d, &cfg)
}

/// Cycled 3D-Var: each background is the noise-free model forecast of the
/// previous analysis, `D` stays fixed, and steps without an observation keep
/// the background.
pub fn run_cycled_3dvar_with(
    model: &DiscreteModel,
    obs: &ObservationModel,
    observations: &[Option<Vector>],
    x0: &Vector,
    d: &Matrix,
    cfg: &CycleConfig,
) -> Result<Vec<Vector>> {
    if observations.is_empty() {
        return Err(Error::InvalidArgument { name: "observations", reason: "must not be empty" });
    }
    if cfg.solver == Solver::GradientDescent {
        cfg.gd.validate()?;
    }
    let mut first = x0.clone();
    if cfg.initial_analysis {
        if let Some(z) = &observations[0] {
            first = analyze(first, d, z, obs, cfg)?;
        }
    }
    let mut out = Vec::with_capacity(observations.len());
    out.push(first);
    for (k, z) in observations.iter().enumerate().skip(1) {
        let t_prev = (k - 1) as f64 * model.dt();
        let background = model.propagate(&out[k - 1], t_prev)?;
        let analysis = match z {
            Some(z) => analyze(background, d, z, obs, cfg)?,
            None => background,
        };
        out.push(analysis);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kalman::kalman_gain;
    use crate::ssmodel::{spring_mass_default, Forcing};

    fn v(d: &[f64]) -> Vector {
        Vector::from_slice(d).unwrap()
    }

    fn scalar_problem(x_b: f64, d: f64, y: f64, h: f64, r: f64) -> VarProblem {
        VarProblem::new(v(&[x_b]), Matrix::diagonal(&[d]), v(&[y]), Matrix::diagonal(&[h]), Matrix::diagonal(&[r]))
            .unwrap()
    }

    fn paper_problem(y: f64) -> VarProblem {
        VarProblem::new(
            v(&[0.3, -0.4]),
            Matrix::diagonal(&[0.05, 0.05]),
            v(&[y]),
            spring_mass_default().h,
            Matrix::diagonal(&[0.01]),
        )
        .unwrap()
    }

    #[test]
    fn cost_zero_at_consistent_background() {
        let p = paper_problem(0.3);
        assert_eq!(cost(&p, p.background()).unwrap(), 0.0);
        assert_eq!(grad(&p, p.background()).unwrap(), Vector::zeros(2));
    }

    #[test]
    fn scalar_cost_by_substitution() {
        let p = scalar_problem(0.0, 1.0, 0.0, 1.0, 1.0);
        assert_eq!(cost(&p, &v(&[1.0])).unwrap(), 1.0);
    }

    #[test]
    fn problem_validation() {
        let bad_d = VarProblem::new(v(&[0.0]), Matrix::diagonal(&[-1.0]), v(&[0.0]), Matrix::identity(1), Matrix::identity(1));
        assert!(matches!(bad_d, Err(Error::NotPositiveDefinite { .. })));
        let bad_h = VarProblem::new(v(&[0.0, 0.0]), Matrix::identity(2), v(&[0.0]), Matrix::identity(2), Matrix::identity(1));
        assert!(matches!(bad_h, Err(Error::DimensionMismatch { .. })));
        let p = paper_problem(1.0);
        assert!(cost(&p, &v(&[1.0])).is_err());
    }

    #[test]
    fn analytic_zero_innovation() {
        let p = paper_problem(0.3);
        assert_eq!(analytic_analysis(&p).unwrap().x, *p.background());
    }

    #[test]
    fn analytic_ignores_huge_r() {
        let p = VarProblem::new(v(&[0.3, -0.4]), Matrix::identity(2), v(&[5.0, 5.0]), Matrix::identity(2), Matrix::diagonal(&[1e12, 1e12]))
            .unwrap();
        assert!(analytic_analysis(&p).unwrap().x.max_abs_diff(p.background()) < 1e-6);
    }

    #[test]
    fn analytic_is_stationary_and_matches_kf_gain() {
        let p = paper_problem(1.1);
        let a = analytic_analysis(&p).unwrap();
        assert!(grad(&p, &a.x).unwrap().norm() < 1e-9);
        let kf = kalman_gain(p.background_cov(), p.h(), p.r()).unwrap();
        assert!(a.gain.max_abs_diff(&kf) < 1e-10);
    }

    #[test]
    fn gd_from_optimum_returns_immediately() {
        let p = paper_problem(1.1);
        let opt = analytic_analysis(&p).unwrap().x;
        let out = gradient_descent(&p, &opt, &GdConfig::default()).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out.converged);
        assert_eq!(out.x, opt);
    }

    #[test]
    fn gd_converges_on_paper_instance() {
        let p = paper_problem(1.1);
        let cfg = GdConfig::default();
        let out = gradient_descent(&p, p.background(), &cfg).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= cfg.n_max);
        let opt = analytic_analysis(&p).unwrap().x;
        assert!(out.x.max_abs_diff(&opt) < 1e-6, "{:?} vs {:?}", out.x, opt);
    }

    #[test]
    fn gd_backtracks_oversized_steps() {
        // Hessian 120 along x1: a fixed step of 10 would diverge.
        let p = paper_problem(1.1);
        let cfg = GdConfig { step_size: 10.0, epsilon: 1e-9, n_max: 5000 };
        let out = gradient_descent(&p, &v(&[5.0, 5.0]), &cfg).unwrap();
        assert!(out.converged);
        for w in out.cost_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()), "{} -> {}", w[0], w[1]);
        }
        assert_eq!(out.cost_history.len(), out.iterations + 1);
    }

    #[test]
    fn gd_reports_iteration_cap() {
        let p = paper_problem(1.1);
        let cfg = GdConfig { step_size: 1e-6, epsilon: 1e-12, n_max: 3 };
        let out = gradient_descent(&p, p.background(), &cfg).unwrap();
        assert_eq!(out.iterations, 3);
        assert!(!out.converged);
        assert!(gradient_descent(&p, p.background(), &GdConfig { n_max: 0, ..cfg }).is_err());
    }

    #[test]
    fn cost_change_is_exact() {
        let p = paper_problem(0.7);
        let x = v(&[0.1, 0.2]);
        let g = grad(&p, &x).unwrap();
        let d = v(&[-0.3, 0.05]);
        let direct = cost(&p, &x.add(&d).unwrap()).unwrap() - cost(&p, &x).unwrap();
        assert!((cost_change(&p, &g, &d).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn tikhonov_unit_sigmas() {
        let p = paper_problem(0.9);
        let t = to_tikhonov(&p, 1.0, 1.0).unwrap();
        assert_eq!(t.mu, 1.0);
        let expected = p.r().cholesky().unwrap().invert_lower_triangular().unwrap()
            .mul(p.h()).unwrap()
            .mul(&p.background_cov().cholesky().unwrap()).unwrap();
        assert!(t.design.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn tikhonov_identity_covariances() {
        let x_b = v(&[0.5, 1.0]);
        let y = v(&[1.5, -1.0]);
        let p = VarProblem::new(x_b.clone(), Matrix::identity(2), y.clone(), Matrix::identity(2), Matrix::identity(2)).unwrap();
        let t = to_tikhonov(&p, 1.0, 1.0).unwrap();
        assert_eq!(t.design, Matrix::identity(2));
        assert_eq!(t.rhs, y.sub(&x_b).unwrap());
        // a non-unit split scales the whitened operator by σ_r/σ_d
        let t = to_tikhonov(&p, 2.0, 0.5).unwrap();
        assert!((t.mu - 0.25).abs() < 1e-15);
        assert!(t.design.max_abs_diff(&Matrix::identity(2).scale(0.25)) < 1e-15);
        assert!(t.rhs.max_abs_diff(&y.sub(&x_b).unwrap().scale(0.5)) < 1e-15);
    }

    #[test]
    fn tikhonov_zero_rhs_returns_background() {
        let p = paper_problem(0.3);
        let t = to_tikhonov(&p, 1.0, 1.0).unwrap();
        assert_eq!(t.rhs, Vector::zeros(1));
        assert_eq!(tikhonov_solve(&t).unwrap(), *p.background());
    }

    #[test]
    fn tikhonov_heavy_regularization() {
        let p = paper_problem(3.0);
        let t = to_tikhonov(&p, 1.0, 1.0).unwrap().with_mu(1e9).unwrap();
        assert!(tikhonov_solve(&t).unwrap().max_abs_diff(p.background()) < 1e-6);
    }

    #[test]
    fn tikhonov_rank_deficient_without_regularization() {
        let p = paper_problem(3.0);
        let t = to_tikhonov(&p, 1.0, 1.0).unwrap().with_mu(0.0).unwrap();
        assert!(matches!(tikhonov_solve(&t), Err(Error::Singular { op: "tikhonov_solve", .. })));
        assert!(to_tikhonov(&p, 0.0, 1.0).is_err());
        assert!(t.with_mu(-1.0).is_err());
    }

    #[test]
    fn tikhonov_matches_analytic_any_split() {
        let p = paper_problem(1.3);
        let opt = analytic_analysis(&p).unwrap().x;
        for (sd, sr) in [(1.0, 1.0), (0.2, 0.1), (3.0, 0.05)] {
            let x = tikhonov_solve(&to_tikhonov(&p, sd, sr).unwrap()).unwrap();
            assert!(x.max_abs_diff(&opt) < 1e-10, "split ({sd}, {sr})");
        }
    }

    #[test]
    fn tikhonov_state_round_trip() {
        let p = paper_problem(1.3);
        let t = to_tikhonov(&p, 0.7, 1.9).unwrap();
        let x = v(&[0.11, -2.0]);
        assert!(t.to_state(&t.from_state(&x).unwrap()).unwrap().max_abs_diff(&x) < 1e-14);
    }

    #[test]
    fn cycled_tracks_noiseless_full_observations() {
        let model = DiscreteModel::new(
            Matrix::identity(2),
            Matrix::identity(2),
            Matrix::zeros(2, 2),
            1.0,
            Forcing::Custom { dim: 2, f: alloc::sync::Arc::new(|t| Vector::from_slice(&[0.1, -0.05 * t]).unwrap()) },
        )
        .unwrap();
        let obs = ObservationModel::new(Matrix::identity(2), Matrix::diagonal(&[1e-10, 1e-10])).unwrap();
        let zs: Vec<Vector> = (0..20).map(|k| v(&[k as f64 * 0.3, 1.0 - k as f64 * 0.1])).collect();
        let out = run_cycled_3dvar(&model, &obs, &zs, &Vector::zeros(2), &Matrix::diagonal(&[0.05, 0.05]), Solver::Analytic, &GdConfig::default())
            .unwrap();
        assert_eq!(out.len(), 20);
        for k in 1..20 {
            assert!(out[k].max_abs_diff(&zs[k]) < 1e-6);
        }
    }

    #[test]
    fn cycled_keeps_background_without_observation() {
        let setup = spring_mass_default();
        let model = crate::ssmodel::discretize(&setup.system, 0.01, setup.q.clone()).unwrap();
        let obs = ObservationModel::new(setup.h.clone(), Matrix::diagonal(&[0.01])).unwrap();
        let zs = [None, None, None];
        let out = run_cycled_3dvar_with(&model, &obs, &zs, &setup.truth_x0, &setup.p0, &CycleConfig::default()).unwrap();
        assert_eq!(out[1], model.propagate(&setup.truth_x0, 0.0).unwrap());
        assert_eq!(out[2], model.propagate(&out[1], 0.01).unwrap());
    }
}
