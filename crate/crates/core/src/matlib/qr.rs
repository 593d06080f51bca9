use super::matrix::{dot, Matrix};
use crate::error::{shape_err, Error, Result};

const RANK_TOL: f64 = 1e-12;

/// Orthogonal factor `Q` of the Householder QR decomposition `G = Q·R`, with
/// the sign convention that `R` has a non-negative diagonal. Under that
/// convention `Q` is a pure function of `G`.
pub fn qr_orthonormal(g: &Matrix) -> Result<Matrix> {
    if !g.is_square() {
        return shape_err(format!("qr_orthonormal needs a square matrix, got {:?}", g.shape()));
    }
    g.check_finite("qr_orthonormal input")?;
    let n = g.rows();
    let gnorm = g.frobenius_norm();
    // Row j of `at` is column j of the matrix being reduced.
    let mut at = g.transpose();
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);
    let mut rdiag = Vec::with_capacity(n);

    for k in 0..n {
        let x = &at.row(k)[k..];
        let xnorm = dot(x, x).sqrt();
        let alpha = if x[0] < 0.0 { xnorm } else { -xnorm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        rdiag.push(alpha);
        if vv > 0.0 {
            for j in k + 1..n {
                let col = &mut at.row_mut(j)[k..];
                let f = 2.0 * dot(&v, col) / vv;
                for (c, vi) in col.iter_mut().zip(&v) {
                    *c -= f * vi;
                }
            }
        }
        reflectors.push((v, vv));
    }

    if let Some((k, r)) = rdiag.iter().enumerate().find(|(_, r)| r.abs() <= RANK_TOL * gnorm) {
        return Err(Error::Degenerate(format!(
            "rank-deficient matrix: |R[{k},{k}]| = {:.3e} <= {RANK_TOL:e}·‖G‖",
            r.abs()
        )));
    }

    // Q e_j = H_0 H_1 ⋯ H_{n-1} e_j, then flip columns with negative R diagonal.
    let mut q = Matrix::zeros(n, n);
    for j in 0..n {
        let mut col = vec![0.0; n];
        col[j] = 1.0;
        for k in (0..n).rev() {
            let (v, vv) = &reflectors[k];
            if *vv == 0.0 {
                continue;
            }
            let seg = &mut col[k..];
            let f = 2.0 * dot(v, seg) / vv;
            for (c, vi) in seg.iter_mut().zip(v) {
                *c -= f * vi;
            }
        }
        if rdiag[j] < 0.0 {
            col.iter_mut().for_each(|x| *x = -*x);
        }
        q.set_column(j, &col);
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_fixed() {
        assert_eq!(qr_orthonormal(&Matrix::identity(3)).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn permutation_is_fixed() {
        let p = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(qr_orthonormal(&p).unwrap(), p);
    }

    #[test]
    fn positive_diagonal_gives_identity() {
        assert_eq!(qr_orthonormal(&Matrix::from_diag(&[2.0, 3.0])).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn negative_diagonal_flips_sign() {
        let q = qr_orthonormal(&Matrix::from_diag(&[-2.0, 3.0])).unwrap();
        assert_eq!(q, Matrix::from_diag(&[-1.0, 1.0]));
    }

    #[test]
    fn rank_deficiency_is_an_error() {
        let g = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(qr_orthonormal(&g), Err(Error::Degenerate(_))));
        assert!(matches!(qr_orthonormal(&Matrix::zeros(2, 2)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn factor_is_orthogonal_and_r_upper_triangular() {
        let n = 12;
        let g = Matrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) as f64).sin() + if i == j { 2.0 } else { 0.0 });
        let q = qr_orthonormal(&g).unwrap();
        assert!((&q.t_matmul(&q) - &Matrix::identity(n)).frobenius_norm() < 1e-12);
        let r = q.t_matmul(&g);
        for i in 0..n {
            assert!(r[(i, i)] > 0.0);
            for j in 0..i {
                assert!(r[(i, j)].abs() < 1e-12, "R[{i},{j}] = {}", r[(i, j)]);
            }
        }
    }
}
