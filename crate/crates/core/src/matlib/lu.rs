use super::matrix::Matrix;

/// LU factorisation with partial pivoting. `None` when a pivot vanishes
/// relative to the largest entry of the input.
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(m: &Matrix) -> Option<Self> {
        assert!(m.is_square());
        let n = m.rows();
        let scale = m.max_abs();
        let tiny = scale * f64::EPSILON * 1e-3;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pv) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pv > tiny) {
                return None;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let pivot = lu[(k, k)];
            let (upper, lower) = lu.as_mut_slice().split_at_mut((k + 1) * n);
            let prow = &upper[k * n..(k + 1) * n];
            for row in lower.chunks_exact_mut(n) {
                let f = row[k] / pivot;
                row[k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        row[j] -= f * prow[j];
                    }
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.lu.rows();
        let pb: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        b.copy_from_slice(&pb);
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = (0..i).map(|j| row[j] * b[j]).sum();
            b[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = (i + 1..n).map(|j| row[j] * b[j]).sum();
            b[i] = (b[i] - s) / row[i];
        }
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.lu.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            self.solve_in_place(&mut e);
            inv.set_column(j, &e);
        }
        inv
    }
}
