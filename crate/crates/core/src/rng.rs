//! Seeded Gaussian randomness.
//!
//! Uniform bits come from ChaCha20 (portable, counter based, with 2^64
//! independent streams per seed). Standard normals are produced by the
//! Box–Muller transform evaluated with `libm`, so a given `(seed, stream)`
//! yields the same draws bit-for-bit on every platform.

use core::f64::consts::PI;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Single-owner source of uniform and standard-normal draws.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha20Rng,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent substream `stream` of `seed`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner, spare_normal: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw (Box–Muller, second variate cached).
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - U lies in (0, 1], keeping ln finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * PI * u2;
        self.spare_normal = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }

    pub fn standard_normal_vector(&mut self, len: usize) -> Vector {
        Vector::from_fn(len, |_| self.standard_normal())
    }
}

/// `N(mean, cov)` with the Cholesky factor computed once.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    mean: Vector,
    // None when cov is exactly zero.
    factor: Option<Matrix>,
}

impl GaussianSampler {
    pub fn new(mean: Vector, cov: &Matrix) -> Result<Self> {
        if cov.shape() != (mean.len(), mean.len()) {
            return Err(Error::DimensionMismatch {
                op: "sample_mvn",
                expected: (mean.len(), mean.len()),
                found: cov.shape(),
            });
        }
        let factor = if cov.is_zero() { None } else { Some(cov.cholesky()?) };
        Ok(Self { mean, factor })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vector {
        match &self.factor {
            None => self.mean.clone(),
            Some(l) => {
                let xi = rng.standard_normal_vector(self.mean.len());
                let shift = l.mul_vec(&xi).expect("factor is square over the mean dimension");
                self.mean.add(&shift).expect("same dimension")
            }
        }
    }
}

/// One draw `mean + L ξ` where `L Lᵀ = cov`. A zero covariance returns `mean`
/// without consuming randomness.
pub fn sample_mvn(mean: &Vector, cov: &Matrix, rng: &mut RngStream) -> Result<Vector> {
    Ok(GaussianSampler::new(mean.clone(), cov)?.sample(rng))
}
