#![allow(dead_code)]

use assim_core::{Matrix, RngStream, Vector};

pub fn uniform_matrix(rng: &mut RngStream, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| lo + (hi - lo) * rng.uniform())
}

pub fn uniform_vector(rng: &mut RngStream, len: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_fn(len, |_| lo + (hi - lo) * rng.uniform())
}

/// `G Gᵀ + floor·I` with `G` uniform on `[-1, 1]`.
pub fn random_spd(rng: &mut RngStream, n: usize, floor: f64) -> Matrix {
    let g = uniform_matrix(rng, n, n, -1.0, 1.0);
    g.mul(&g.transpose()).unwrap().add(&Matrix::identity(n).scale(floor)).unwrap()
}

/// Plain quadratic form `vᵀ M v` by explicit loops.
pub fn quad_form(m: &Matrix, v: &Vector) -> f64 {
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            s += v[i] * m[(i, j)] * v[j];
        }
    }
    s
}
