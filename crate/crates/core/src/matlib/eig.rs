//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use std::cmp::Ordering;

use super::matrix::Matrix;
use crate::error::{shape_err, Error, Result};

const MAX_SWEEPS: usize = 30;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const SYMMETRY_TOL: f64 = 1e-8;

/// Eigen- or singular values with their vectors stored as columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted by descending absolute value.
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Total order used for every spectrum: descending `|v|`, then descending
/// signed value, then ascending original index.
pub fn magnitude_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| {
        let (a, b) = (values[i], values[j]);
        b.abs()
            .partial_cmp(&a.abs())
            .unwrap_or(Ordering::Equal)
            .then(b.partial_cmp(&a).unwrap_or(Ordering::Equal))
            .then(i.cmp(&j))
    });
    idx
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        let row = a.row(i);
        for (j, &x) in row.iter().enumerate() {
            if i != j {
                acc += x * x;
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a symmetric matrix.
///
/// The input is symmetrised as `(S + Sᵀ)/2` before factoring; inputs whose
/// relative asymmetry exceeds `1e-8` are rejected with
/// [`Error::NotSymmetric`].
pub fn symmetric_eig(s: &Matrix) -> Result<Spectrum> {
    if !s.is_square() {
        return shape_err(format!("symmetric_eig needs a square matrix, got {:?}", s.shape()));
    }
    s.check_finite("symmetric_eig input")?;
    let asym = s.relative_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let n = s.rows();
    let mut a = s.symmetric_part();
    // Row p of `vt` is the eigenvector belonging to a[(p, p)].
    let mut vt = Matrix::identity(n);
    let tol = OFF_DIAGONAL_TOL * a.frobenius_norm();

    for sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Entries below the diagonals' rounding level are dropped.
                if sweep > 3 && app.abs() + 100.0 * apq.abs() == app.abs() && aqq.abs() + 100.0 * apq.abs() == aqq.abs()
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sgn = if theta < 0.0 { -1.0 } else { 1.0 };
                    sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                rotate_rows(a.as_mut_slice(), n, p, q, c, sn);
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                // Mirror the updated rows into the columns.
                for k in 0..n {
                    if k != p && k != q {
                        let (xp, xq) = (a[(p, k)], a[(q, k)]);
                        a[(k, p)] = xp;
                        a[(k, q)] = xq;
                    }
                }
                rotate_rows(vt.as_mut_slice(), n, p, q, c, sn);
            }
        }
    }

    let diag = a.diagonal();
    let order = magnitude_order(&diag);
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, vt.row(i));
    }
    Ok(Spectrum { values, vectors })
}

/// Applies `row_p ← c·row_p − s·row_q`, `row_q ← s·row_p + c·row_q`.
#[inline]
pub(crate) fn rotate_rows(data: &mut [f64], width: usize, p: usize, q: usize, c: f64, s: f64) {
    debug_assert!(p < q);
    let (head, tail) = data.split_at_mut(q * width);
    let rp = &mut head[p * width..(p + 1) * width];
    let rq = &mut tail[..width];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}
