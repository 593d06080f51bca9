//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.

use super::matrix::{dot, Matrix};

const MAX_SWEEPS: usize = 60;

/// `G = U · diag(sigma) · V` with `V` **not** transposed: the rows of `v` are
/// the right singular vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    /// m × r with orthonormal columns.
    pub u: Matrix,
    /// Non-negative, descending, length r = min(m, n).
    pub sigma: Vec<f64>,
    /// r × n with orthonormal rows.
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let us = Matrix::from_fn(self.u.rows(), self.u.cols(), |i, j| self.u[(i, j)] * self.sigma[j]);
        us.matmul(&self.v)
    }
}

pub fn svd(g: &Matrix) -> Svd {
    let (m, n) = g.shape();
    if m < n {
        let t = svd(&g.transpose());
        return Svd { u: t.v.transpose(), sigma: t.sigma, v: t.u.transpose() };
    }
    // Row j of `w` is column j of G·V; row j of `vt` is column j of V.
    let mut w = g.transpose();
    let mut vt = Matrix::identity(n);
    let tol = f64::EPSILON * (m.max(1) as f64).sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = gram3(w.row(p), w.row(q));
                if alpha == 0.0 || beta == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    let sgn = if zeta < 0.0 { -1.0 } else { 1.0 };
                    sgn / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                super::eig::rotate_rows(w.as_mut_slice(), m, p, q, c, s);
                super::eig::rotate_rows(vt.as_mut_slice(), n, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| dot(w.row(j), w.row(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));

    let mut u_cols: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut v = Matrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        v.row_mut(k).copy_from_slice(vt.row(j));
        let col: Vec<f64> = w.row(j).iter().map(|x| x / s).collect();
        if s > f64::MIN_POSITIVE * 1e8 && col.iter().all(|x| x.is_finite()) {
            sigma.push(s);
            u_cols.push(Some(col));
        } else {
            sigma.push(0.0);
            u_cols.push(None);
        }
    }
    let u = complete_orthonormal(m, u_cols);
    Svd { u, sigma, v }
}

/// (‖a‖², ‖b‖², a·b) in one pass.
fn gram3(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let mut aa = [0.0; 2];
    let mut bb = [0.0; 2];
    let mut ab = [0.0; 2];
    let ca = a.chunks_exact(2);
    let cb = b.chunks_exact(2);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        aa[0] += x[0] * x[0];
        aa[1] += x[1] * x[1];
        bb[0] += y[0] * y[0];
        bb[1] += y[1] * y[1];
        ab[0] += x[0] * y[0];
        ab[1] += x[1] * y[1];
    }
    let (mut s1, mut s2, mut s3) = (aa[0] + aa[1], bb[0] + bb[1], ab[0] + ab[1]);
    for (x, y) in ra.iter().zip(rb) {
        s1 += x * x;
        s2 += y * y;
        s3 += x * y;
    }
    (s1, s2, s3)
}

/// Fills the missing columns with unit vectors orthogonalised against the
/// known ones (two passes of modified Gram–Schmidt).
fn complete_orthonormal(m: usize, cols: Vec<Option<Vec<f64>>>) -> Matrix {
    let r = cols.len();
    let mut basis: Vec<Vec<f64>> = cols.iter().flatten().cloned().collect();
    let mut filled: Vec<Vec<f64>> = Vec::with_capacity(r);
    let mut candidate = 0usize;
    for c in cols {
        match c {
            Some(v) => filled.push(v),
            None => loop {
                assert!(candidate < m, "cannot complete orthonormal basis");
                let mut e = vec![0.0; m];
                e[candidate] = 1.0;
                candidate += 1;
                for _ in 0..2 {
                    for b in &basis {
                        let proj = dot(b, &e);
                        for (x, y) in e.iter_mut().zip(b) {
                            *x -= proj * y;
                        }
                    }
                }
                let nrm = dot(&e, &e).sqrt();
                if nrm > 0.5 {
                    e.iter_mut().for_each(|x| *x /= nrm);
                    basis.push(e.clone());
                    filled.push(e);
                    break;
                }
            },
        }
    }
    let mut u = Matrix::zeros(m, r);
    for (j, col) in filled.iter().enumerate() {
        u.set_column(j, col);
    }
    u
}
