//! Random state-space-symmetric test systems with a prescribed cross-Gramian
//! spectrum (inverse Sylvester procedure).

mod rng;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use rng::SeededRng;

use crate::error::{shape_err, Error, Result};
use crate::matlib::{csv, gemm, qr_orthonormal, Matrix, Op};
use crate::system::{LtiSystem, StabilityCheck};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub a: f64,
    pub b: f64,
    pub seed: u64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self { n: 1000, m: 1, a: 0.1, b: 10.0, seed: 0 }
    }
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Config(format!("N and M must be positive, got N={} M={}", self.n, self.m)));
        }
        if !(self.a > 0.0 && self.a < self.b && self.b.is_finite()) {
            return Err(Error::Config(format!("spectrum bounds need 0 < a < b, got a={} b={}", self.a, self.b)));
        }
        Ok(())
    }
}

/// Whether the balanced realisation is rotated by a random orthogonal matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Unbalance {
    #[default]
    Random,
    Skip,
}

#[derive(Debug, Clone)]
pub struct GeneratedSystem {
    pub sys: LtiSystem,
    /// Sampled cross-Gramian eigenvalues in draw order.
    pub lambda_true: Vec<f64>,
    pub u: Matrix,
    pub spec: BenchmarkSpec,
}

impl GeneratedSystem {
    /// Writes `A.csv`, `B.csv`, `C.csv`, `lambda.csv`, `U.csv` and `spec.json`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        csv::save_matrix(dir.join("A.csv"), self.sys.a())?;
        csv::save_matrix(dir.join("B.csv"), self.sys.b())?;
        csv::save_matrix(dir.join("C.csv"), self.sys.c())?;
        csv::save_matrix(dir.join("lambda.csv"), &Matrix::column_vector(&self.lambda_true))?;
        csv::save_matrix(dir.join("U.csv"), &self.u)?;
        fs::write(dir.join("spec.json"), serde_json::to_string_pretty(&self.spec)? + "\n")?;
        Ok(())
    }
}

pub fn inverse_sylvester_procedure(spec: &BenchmarkSpec) -> Result<GeneratedSystem> {
    inverse_sylvester_procedure_with(spec, Unbalance::Random)
}

/// Draws, in stream order: N uniforms for the spectrum, the N×M entries of
/// `B` row by row, then (unless skipped) the N×N Gaussian matrix whose
/// orthogonal factor unbalances the system.
pub fn inverse_sylvester_procedure_with(spec: &BenchmarkSpec, unbalance: Unbalance) -> Result<GeneratedSystem> {
    spec.validate()?;
    let (n, m) = (spec.n, spec.m);
    let mut rng = SeededRng::new(spec.seed);
    let ratio = spec.b / spec.a;
    let lambda: Vec<f64> = (0..n).map(|_| spec.a * ratio.powf(rng.uniform01())).collect();
    let b = Matrix::from_fn(n, m, |_, _| rng.gaussian());
    let u = match unbalance {
        Unbalance::Random => qr_orthonormal(&Matrix::from_fn(n, n, |_, _| rng.gaussian()))?,
        Unbalance::Skip => Matrix::identity(n),
    };
    let sys = assemble_isp(&lambda, &b, Some(&u))?;
    Ok(GeneratedSystem { sys, lambda_true: lambda, u, spec: *spec })
}

/// Solves `W A + A W = −B Bᵀ` with `W = diag(λ)` and returns the rotated
/// realisation `(UᵀAU, UᵀB, BᵀU)`, or the balanced one when `u` is `None`.
pub fn assemble_isp(lambda: &[f64], b: &Matrix, u: Option<&Matrix>) -> Result<LtiSystem> {
    let n = lambda.len();
    if b.rows() != n {
        return shape_err(format!("B has {} rows, expected {n}", b.rows()));
    }
    if lambda.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::Config("cross-Gramian eigenvalues must be positive".into()));
    }
    let bbt = b.matmul_t(b);
    let a = Matrix::from_fn(n, n, |i, j| -bbt[(i, j)] / (lambda[i] + lambda[j]));
    let (a, b) = match u {
        None => (a, b.clone()),
        Some(u) => {
            if u.shape() != (n, n) {
                return shape_err(format!("U must be {n}×{n}, got {:?}", u.shape()));
            }
            let au = a.matmul(u);
            let mut ua = Matrix::zeros(n, n);
            gemm(1.0, Op::T(u), Op::N(&au), 0.0, &mut ua);
            (ua.symmetric_part(), u.t_matmul(b))
        }
    };
    let c = b.transpose();
    // Stability of the symmetric part is structural here but can be lost to
    // rounding for wide spectra, so it is checked by callers instead.
    LtiSystem::with_stability(a, b, c, StabilityCheck::Waive)
}
