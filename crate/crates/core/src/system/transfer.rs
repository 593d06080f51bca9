use num_complex::Complex64;

use super::LtiSystem;
use crate::error::{Error, Result};
use crate::matlib::{svd, Matrix};

/// Complex Q×M matrix holding `G(s)` at one frequency point.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &FrequencyResponse) -> FrequencyResponse {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        FrequencyResponse { rows: self.rows, cols: self.cols, data }
    }

    /// Largest singular value, via the real embedding `[[X, −Y], [Y, X]]`
    /// whose singular values are those of `X + iY`, each doubled.
    pub fn max_singular_value(&self) -> f64 {
        if self.rows == 1 || self.cols == 1 {
            return self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        }
        let (q, m) = (self.rows, self.cols);
        let emb = Matrix::from_fn(2 * q, 2 * m, |i, j| {
            let z = self.get(i % q, j % m);
            match (i < q, j < m) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        });
        svd(&emb).sigma.first().copied().unwrap_or(0.0)
    }
}

/// Evaluates `G(s) = C (sI − A)^{-1} B`.
pub fn transfer_function(sys: &LtiSystem, s: Complex64) -> Result<FrequencyResponse> {
    let n = sys.states();
    let m = sys.inputs();
    let mut lhs: Vec<Complex64> = sys.a().as_slice().iter().map(|&v| Complex64::new(-v, 0.0)).collect();
    for i in 0..n {
        lhs[i * n + i] += s;
    }
    let mut rhs: Vec<Complex64> = sys.b().as_slice().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    solve_complex(&mut lhs, n, &mut rhs, m).ok_or(Error::Resonance(s))?;

    let q = sys.outputs();
    let c = sys.c();
    let mut data = vec![Complex64::new(0.0, 0.0); q * m];
    for i in 0..q {
        let crow = c.row(i);
        for (k, &ck) in crow.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            for j in 0..m {
                data[i * m + j] += rhs[k * m + j] * ck;
            }
        }
    }
    Ok(FrequencyResponse { rows: q, cols: m, data })
}

/// Gaussian elimination with partial pivoting on row-major `a` (n×n),
/// overwriting `b` (n×m) with the solution. `None` when a pivot vanishes.
fn solve_complex(a: &mut [Complex64], n: usize, b: &mut [Complex64], m: usize) -> Option<()> {
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = scale * f64::EPSILON * n as f64;
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pv > tiny) {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            for j in 0..m {
                b.swap(k * m + j, p * m + j);
            }
        }
        let inv = a[k * n + k].inv();
        for i in k + 1..n {
            let f = a[i * n + k] * inv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let t = a[k * n + j];
                a[i * n + j] -= f * t;
            }
            for j in 0..m {
                let t = b[k * m + j];
                b[i * m + j] -= f * t;
            }
        }
    }
    for k in (0..n).rev() {
        let inv = a[k * n + k].inv();
        for j in 0..m {
            let mut acc = b[k * m + j];
            for l in k + 1..n {
                acc -= a[k * n + l] * b[l * m + j];
            }
            b[k * m + j] = acc * inv;
        }
    }
    Some(())
}
