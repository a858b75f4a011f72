//! Error statistics of an estimate series against a known truth.

use core::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::ssmodel::Trajectory;

/// Root-mean-square error of component `component` over the steps in `window`.
pub fn rmse(estimates: &[Vector], truth: &Trajectory, component: usize, window: Range<usize>) -> Result<f64> {
    if estimates.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            op: "rmse",
            expected: (truth.len(), 1),
            found: (estimates.len(), 1),
        });
    }
    if window.is_empty() || window.end > truth.len() {
        return Err(Error::InvalidArgument { name: "window", reason: "must be a non-empty range inside the series" });
    }
    let dim = truth.states()[0].len();
    if component >= dim || estimates[window.clone()].iter().any(|e| e.len() != dim) {
        return Err(Error::InvalidArgument { name: "component", reason: "outside the state dimension" });
    }
    let count = window.len() as f64;
    let sum_sq: f64 = window
        .map(|k| {
            let e = estimates[k][component] - truth.states()[k][component];
            e * e
        })
        .sum();
    Ok(libm::sqrt(sum_sq / count))
}

/// The later half of a series of `len` entries, `len/2 .. len`.
pub fn second_half(len: usize) -> Range<usize> {
    len / 2..len
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use alloc::vec::Vec;

    fn traj(states: Vec<Vector>) -> Trajectory {
        Trajectory::new(0.1, states).unwrap()
    }

    #[test]
    fn perfect_estimate_is_zero() {
        let t = traj((0..10).map(|k| Vector::from_slice(&[k as f64, 1.0]).unwrap()).collect());
        assert_eq!(rmse(t.states(), &t, 0, 0..10).unwrap(), 0.0);
    }

    #[test]
    fn constant_offset() {
        let t = traj((0..10).map(|k| Vector::from_slice(&[k as f64, 1.0]).unwrap()).collect());
        let est: Vec<Vector> = t.states().iter().map(|s| Vector::from_slice(&[s[0] + 1.0, s[1]]).unwrap()).collect();
        assert!((rmse(&est, &t, 0, 0..10).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(rmse(&est, &t, 1, 3..7).unwrap(), 0.0);
    }

    #[test]
    fn random_series_matches_summation() {
        let mut rng = RngStream::new(5);
        let t = traj((0..40).map(|_| rng.standard_normal_vector(2)).collect());
        let est: Vec<Vector> = (0..40).map(|_| rng.standard_normal_vector(2)).collect();
        let mut acc = 0.0;
        for k in 10..30 {
            acc += (est[k][1] - t.states()[k][1]).powi(2);
        }
        let oracle = libm::sqrt(acc / 20.0);
        assert!((rmse(&est, &t, 1, 10..30).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_windows() {
        let t = traj((0..5).map(|_| Vector::zeros(2)).collect());
        assert!(rmse(t.states(), &t, 0, 2..2).is_err());
        assert!(rmse(t.states(), &t, 0, 0..6).is_err());
        assert!(rmse(t.states(), &t, 2, 0..5).is_err());
        assert!(rmse(&t.states()[..4], &t, 0, 0..4).is_err());
        assert_eq!(second_half(2001), 1000..2001);
    }
}
