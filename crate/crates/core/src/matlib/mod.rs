//! Dense real linear algebra kernels.

pub mod csv;
mod eig;
mod lu;
mod matrix;
mod qr;
mod svd;
mod sylvester;

pub use eig::{magnitude_order, symmetric_eig, Spectrum};
pub use lu::Lu;
pub use matrix::{dot, gemm, norm2, Matrix, Op};
pub use qr::qr_orthonormal;
pub use svd::{svd, Svd};
pub use sylvester::{
    solve_lyapunov, solve_sylvester_general, solve_sylvester_symmetric_coeff, solve_sylvester_symmetric_coeff_with,
    sylvester_relative_residual, ResonancePolicy,
};
