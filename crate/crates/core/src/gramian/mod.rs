//! Cross Gramians from the Sylvester equation and from simulated
//! trajectories, plus the two classical Gramians and Hankel singular values.

mod empirical;

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use empirical::{
    empirical_cross_gramian, empirical_cross_gramian_with, empirical_linear_cross_gramian,
    empirical_linear_cross_gramian_with, Centering, EmpiricalOptions, PerturbationSets,
};

use crate::error::{shape_err, Result};
use crate::matlib::{
    csv, solve_lyapunov, solve_sylvester_general, solve_sylvester_symmetric_coeff_with, sylvester_relative_residual,
    symmetric_eig, Matrix, ResonancePolicy,
};
use crate::system::LtiSystem;

/// Relative asymmetry of `A` below which the symmetric solver is used.
const SYMMETRIC_PATH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GramianMethod {
    Sylvester,
    EmpiricalLinear,
    Empirical,
}

impl GramianMethod {
    pub const ALL: [GramianMethod; 3] =
        [GramianMethod::Sylvester, GramianMethod::EmpiricalLinear, GramianMethod::Empirical];

    pub fn name(self) -> &'static str {
        match self {
            GramianMethod::Sylvester => "sylvester",
            GramianMethod::EmpiricalLinear => "empirical-linear",
            GramianMethod::Empirical => "empirical",
        }
    }
}

impl std::str::FromStr for GramianMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        GramianMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| crate::Error::Config(format!("unknown Gramian method {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct GramianResult {
    pub w: Matrix,
    pub method: GramianMethod,
    /// Relative Sylvester residual, or the quadrature step for trajectory
    /// based methods.
    pub residual: f64,
    pub wall_seconds: f64,
}

#[derive(Serialize)]
struct Sidecar {
    method: GramianMethod,
    residual: f64,
    wall_seconds: f64,
    #[serde(rename = "N")]
    n: usize,
}

impl GramianResult {
    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        csv::save_matrix(dir.join(format!("{stem}.csv")), &self.w)?;
        let side =
            Sidecar { method: self.method, residual: self.residual, wall_seconds: self.wall_seconds, n: self.w.rows() };
        fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&side)? + "\n")?;
        Ok(())
    }
}

fn require_square_io(sys: &LtiSystem) -> Result<()> {
    if !sys.is_square_io() {
        return shape_err(format!(
            "cross Gramian needs as many inputs as outputs, got M={} Q={}",
            sys.inputs(),
            sys.outputs()
        ));
    }
    Ok(())
}

/// Solves `A W + W A = −BC`.
pub fn cross_gramian_sylvester(sys: &LtiSystem) -> Result<GramianResult> {
    cross_gramian_sylvester_with(sys, ResonancePolicy::Reject)
}

pub fn cross_gramian_sylvester_with(sys: &LtiSystem, policy: ResonancePolicy) -> Result<GramianResult> {
    require_square_io(sys)?;
    let start = Instant::now();
    let a = sys.a();
    let rhs = sys.b().matmul(sys.c()).scale(-1.0);
    let w = if a.relative_asymmetry() <= SYMMETRIC_PATH_TOL {
        solve_sylvester_symmetric_coeff_with(a, &rhs, policy)?
    } else {
        solve_sylvester_general(a, &rhs)?
    };
    let residual = sylvester_relative_residual(a, a, &w, &rhs);
    Ok(GramianResult { w, method: GramianMethod::Sylvester, residual, wall_seconds: start.elapsed().as_secs_f64() })
}

/// Solves `A W_C + W_C Aᵀ = −BBᵀ`.
pub fn controllability_gramian(sys: &LtiSystem) -> Result<Matrix> {
    solve_lyapunov(sys.a(), &sys.b().matmul_t(sys.b()).scale(-1.0))
}

/// Solves `Aᵀ W_O + W_O A = −CᵀC`.
pub fn observability_gramian(sys: &LtiSystem) -> Result<Matrix> {
    solve_lyapunov(&sys.a().transpose(), &sys.c().t_matmul(sys.c()).scale(-1.0))
}

/// `σ_i = sqrt(λ_i(W_C W_O))`, descending.
///
/// With `W_C = LLᵀ` the products `W_C W_O` and `Lᵀ W_O L` share their
/// spectrum, and the latter is symmetric.
pub fn hankel_singular_values(sys: &LtiSystem) -> Result<Vec<f64>> {
    let wc = controllability_gramian(sys)?;
    let wo = observability_gramian(sys)?;
    let ec = symmetric_eig(&wc.symmetric_part())?;
    let n = wc.rows();
    let l = Matrix::from_fn(n, n, |i, j| ec.vectors[(i, j)] * ec.values[j].max(0.0).sqrt());
    let core = l.t_matmul(&wo.matmul(&l)).symmetric_part();
    let mut sigma: Vec<f64> = symmetric_eig(&core)?.values.iter().map(|&v| v.max(0.0).sqrt()).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(sigma)
}
