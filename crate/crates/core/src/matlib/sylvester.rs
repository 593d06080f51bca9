//! Solvers for `A X + X B = RHS`.
//!
//! Two routes are provided. For a symmetric coefficient `F` the equation
//! `F X + X F = RHS` is diagonalised by the eigenvectors of `F` and solved
//! entrywise. For a general stable coefficient the matrix sign function of
//! the block matrix `[[A, −RHS], [0, −B]]` is computed by Newton iteration;
//! its converged value is `[[−I, 2X], [0, I]]`.

use serde::{Deserialize, Serialize};

use super::eig::symmetric_eig;
use super::lu::Lu;
use super::matrix::{gemm, Matrix, Op};
use crate::error::{shape_err, Error, Result};

const RESONANCE_TOL: f64 = 1e-12;
const SIGN_TOL: f64 = 1e-12;
const SIGN_MAX_ITER: usize = 100;

/// What to do when an eigenvalue pair of the coefficient sums to (nearly) zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResonancePolicy {
    /// Fail with [`Error::SingularEquation`].
    #[default]
    Reject,
    /// Replace the offending denominator by `±1e-12·‖F‖_F`, keeping its sign
    /// (negative when it is exactly zero).
    Perturb,
}

/// Solves `F X + X F = RHS` for symmetric `F`, rejecting resonant pairs.
pub fn solve_sylvester_symmetric_coeff(f: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    solve_sylvester_symmetric_coeff_with(f, rhs, ResonancePolicy::Reject)
}

pub fn solve_sylvester_symmetric_coeff_with(f: &Matrix, rhs: &Matrix, policy: ResonancePolicy) -> Result<Matrix> {
    if !f.is_square() || rhs.shape() != f.shape() {
        return shape_err(format!(
            "Sylvester coefficient {:?} and right-hand side {:?} must be equal square shapes",
            f.shape(),
            rhs.shape()
        ));
    }
    rhs.check_finite("Sylvester right-hand side")?;
    let n = f.rows();
    let eig = symmetric_eig(f)?;
    let v = &eig.vectors;
    let lam = &eig.values;
    let tol = RESONANCE_TOL * f.frobenius_norm();

    let mut qt = v.t_matmul(&rhs.matmul(v));
    if rhs.relative_asymmetry() == 0.0 {
        qt = qt.symmetric_part();
    }
    for i in 0..n {
        for j in 0..n {
            let mut d = lam[i] + lam[j];
            if d.abs() <= tol {
                match policy {
                    ResonancePolicy::Reject => return Err(Error::SingularEquation { sum: d, tol }),
                    ResonancePolicy::Perturb if tol > 0.0 => d = if d > 0.0 { tol } else { -tol },
                    ResonancePolicy::Perturb => return Err(Error::SingularEquation { sum: d, tol }),
                }
            }
            qt[(i, j)] /= d;
        }
    }
    let x = v.matmul(&qt.matmul_t(v));
    // A symmetric right-hand side has a symmetric solution.
    if rhs.relative_asymmetry() == 0.0 {
        Ok(x.symmetric_part())
    } else {
        Ok(x)
    }
}

/// Solves `A W + W A = RHS` for stable `A` by sign-function iteration.
pub fn solve_sylvester_general(a: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    sign_sylvester(a, a, rhs)
}

/// Solves the Lyapunov equation `A W + W Aᵀ = RHS` for stable `A`.
pub fn solve_lyapunov(a: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    sign_sylvester(a, &a.transpose(), rhs)
}

/// `‖A X + X B − RHS‖_F / (‖A‖_F‖X‖_F + ‖X‖_F‖B‖_F + ‖RHS‖_F)`.
pub fn sylvester_relative_residual(a: &Matrix, b: &Matrix, x: &Matrix, rhs: &Matrix) -> f64 {
    let mut r = rhs.scale(-1.0);
    gemm(1.0, Op::N(a), Op::N(x), 1.0, &mut r);
    gemm(1.0, Op::N(x), Op::N(b), 1.0, &mut r);
    let xn = x.frobenius_norm();
    let denom = a.frobenius_norm() * xn + xn * b.frobenius_norm() + rhs.frobenius_norm();
    if denom == 0.0 {
        r.frobenius_norm()
    } else {
        r.frobenius_norm() / denom
    }
}

/// Solves `A X + X B = RHS` (A: n×n, B: m×m, both stable).
fn sign_sylvester(a: &Matrix, b: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let m = b.rows();
    if !a.is_square() || !b.is_square() || rhs.shape() != (n, m) {
        return shape_err(format!(
            "Sylvester shapes incompatible: A {:?}, B {:?}, RHS {:?}",
            a.shape(),
            b.shape(),
            rhs.shape()
        ));
    }
    a.check_finite("Sylvester coefficient")?;
    rhs.check_finite("Sylvester right-hand side")?;
    let dim = n + m;
    let mut z = Matrix::zeros(dim, dim);
    z.set_block(0, 0, a);
    z.set_block(0, n, &rhs.scale(-1.0));
    z.set_block(n, n, &b.scale(-1.0));

    let mut prev_diff = f64::INFINITY;
    let mut converged = false;
    for it in 0..SIGN_MAX_ITER {
        let inv = Lu::factor(&z).ok_or(Error::SingularIteration(it))?.inverse();
        let next = Matrix::from_fn(dim, dim, |i, j| 0.5 * (z[(i, j)] + inv[(i, j)]));
        if !next.is_finite() {
            return Err(Error::SingularIteration(it));
        }
        let diff = (&next - &z).frobenius_norm();
        let znorm = z.frobenius_norm();
        z = next;
        // Second exit: the quadratic phase has stalled on the rounding floor.
        if diff <= SIGN_TOL * znorm || (diff <= 1e-8 * znorm && diff >= 0.5 * prev_diff) {
            converged = true;
            break;
        }
        prev_diff = diff;
    }
    if !converged {
        return Err(Error::Instability(SIGN_MAX_ITER));
    }
    // A stable pair gives sign(A) = −I and sign(−B) = I.
    let dev_a = (&z.block(0, 0, n, n) + &Matrix::identity(n)).frobenius_norm();
    let dev_b = (&z.block(n, n, m, m) - &Matrix::identity(m)).frobenius_norm();
    if dev_a > 1e-6 * (n as f64).sqrt() || dev_b > 1e-6 * (m as f64).sqrt() {
        return Err(Error::Instability(SIGN_MAX_ITER));
    }
    Ok(z.block(0, n, n, m).scale(0.5))
}
