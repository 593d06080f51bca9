#![allow(dead_code)]

use crossgram::benchmark::{inverse_sylvester_procedure, BenchmarkSpec, SeededRng};
use crossgram::system::LtiSystem;
use crossgram::Matrix;

pub fn gaussian(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = SeededRng::new(seed);
    Matrix::from_fn(rows, cols, |_, _| rng.gaussian())
}

pub fn random_symmetric(n: usize, seed: u64) -> Matrix {
    let g = gaussian(n, n, seed);
    (&g + &g.transpose()).scale(0.5)
}

/// Stable, generally non-normal matrix: `G − (‖G‖_∞ + 1) I`.
pub fn random_stable(n: usize, seed: u64) -> Matrix {
    let g = gaussian(n, n, seed);
    let shift = g.inf_norm() + 1.0;
    &g - &Matrix::identity(n).scale(shift)
}

pub fn isp(n: usize, m: usize, a: f64, b: f64, seed: u64) -> LtiSystem {
    inverse_sylvester_procedure(&BenchmarkSpec { n, m, a, b, seed }).unwrap().sys
}

pub fn rel_diff(x: &Matrix, y: &Matrix) -> f64 {
    (x - y).frobenius_norm() / y.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// State-space-symmetric system `(QᵀDQ, B, Bᵀ)` with `D` negative diagonal,
/// log-uniform in `[−10, −0.1]`.
pub fn well_conditioned_sss(n: usize, m: usize, seed: u64) -> LtiSystem {
    let mut rng = SeededRng::new(seed);
    let d: Vec<f64> = (0..n).map(|_| -0.1 * 100f64.powf(rng.uniform01())).collect();
    let q = crossgram::matlib::qr_orthonormal(&Matrix::from_fn(n, n, |_, _| rng.gaussian())).unwrap();
    let a = q.t_matmul(&Matrix::from_diag(&d)).matmul(&q).symmetric_part();
    let b = Matrix::from_fn(n, m, |_, _| rng.gaussian());
    LtiSystem::new(a, b.clone(), b.transpose()).unwrap()
}
