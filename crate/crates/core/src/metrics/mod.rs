//! Output error norms of reduced models.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{shape_err, Error, Result};
use crate::matlib::{csv::fmt_f64, Matrix};
use crate::reduce::Rom;
use crate::system::{transfer_function, LtiSystem, Trajectory};

/// Time-domain norms of a sampled signal on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Norms of `y − y_r`: `L1 = Σ_{k<S} ‖Δ_k‖₁ h`, `L2 = sqrt(Σ_{k<S} ‖Δ_k‖₂² h)`,
/// `L∞ = max_{k≤S} ‖Δ_k‖_∞`.
pub fn lebesgue_errors(y: &Trajectory, y_r: &Trajectory) -> Result<LebesgueNorms> {
    if !y.grid.same_sampling(&y_r.grid) {
        return shape_err(format!(
            "trajectory grids differ: h={} S={} vs h={} S={}",
            y.grid.step, y.grid.count, y_r.grid.step, y_r.grid.count
        ));
    }
    if y.dim() != y_r.dim() {
        return shape_err(format!("trajectory dimensions differ: {} vs {}", y.dim(), y_r.dim()));
    }
    Ok(norms_of(y, Some(y_r)))
}

pub fn lebesgue_norms(y: &Trajectory) -> LebesgueNorms {
    norms_of(y, None)
}

fn norms_of(y: &Trajectory, y_r: Option<&Trajectory>) -> LebesgueNorms {
    let h = y.grid.step;
    let (mut l1, mut l2, mut linf) = (0.0, 0.0, 0.0f64);
    for k in 0..y.grid.samples() {
        let a = y.sample(k);
        let (mut s1, mut s2, mut mx) = (0.0, 0.0, 0.0f64);
        for (i, &v) in a.iter().enumerate() {
            let d = (v - y_r.map_or(0.0, |r| r.sample(k)[i])).abs();
            s1 += d;
            s2 += d * d;
            mx = mx.max(d);
        }
        if k < y.grid.count {
            l1 += s1 * h;
            l2 += s2 * h;
        }
        linf = linf.max(mx);
    }
    LebesgueNorms { l1, l2: l2.sqrt(), linf }
}

/// `2·Σ_{i>n} σ_i`, the H∞ error of truncating a state-space-symmetric SISO
/// system in balanced form.
pub fn hinf_sss(hsv: &[f64], n: usize) -> Result<f64> {
    if n > hsv.len() {
        return Err(Error::OrderOutOfRange { n, max: hsv.len() });
    }
    Ok(2.0 * hsv[n..].iter().sum::<f64>())
}

/// `sqrt(tr(C̃₂ W₂₂ B̃₂))` with `B̃₂ = B − S Sᵀ B`, `C̃₂ = C − C S Sᵀ` and
/// `W₂₂` the trailing `N − n` entries of the balanced Gramian diagonal,
/// where `n` is the column count of `s_n`.
pub fn h2_approx(w_diag: &[f64], b_bal: &Matrix, c_bal: &Matrix, s_n: &Matrix) -> Result<f64> {
    let nn = w_diag.len();
    if b_bal.rows() != nn || c_bal.cols() != nn || s_n.rows() != nn || b_bal.cols() != c_bal.rows() {
        return shape_err(format!(
            "H2 approximation shapes: w {nn}, B {:?}, C {:?}, S {:?}",
            b_bal.shape(),
            c_bal.shape(),
            s_n.shape()
        ));
    }
    let n = s_n.cols();
    let b2 = b_bal - &s_n.matmul(&s_n.t_matmul(b_bal));
    let c2 = c_bal - &c_bal.matmul(s_n).matmul_t(s_n);
    Ok(trailing_trace(w_diag, &b2, &c2, n))
}

/// [`h2_approx`] for a realisation already in projected coordinates, where
/// `S_n` holds the first `n` unit vectors.
pub fn h2_approx_balanced(w_diag: &[f64], b_bal: &Matrix, c_bal: &Matrix, n: usize) -> Result<f64> {
    let nn = w_diag.len();
    if b_bal.rows() != nn || c_bal.cols() != nn || b_bal.cols() != c_bal.rows() {
        return shape_err(format!("H2 approximation shapes: w {nn}, B {:?}, C {:?}", b_bal.shape(), c_bal.shape()));
    }
    if n > nn {
        return Err(Error::OrderOutOfRange { n, max: nn });
    }
    Ok(trailing_trace(w_diag, b_bal, c_bal, n))
}

fn trailing_trace(w: &[f64], b2: &Matrix, c2: &Matrix, n: usize) -> f64 {
    let mut tr = 0.0;
    for i in n..w.len() {
        let cb: f64 = (0..b2.cols()).map(|m| c2[(m, i)] * b2[(i, m)]).sum();
        tr += cb * w[i];
    }
    tr.max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledHinf {
    pub value: f64,
    /// Frequencies skipped because `iωI − A` was singular.
    pub skipped: usize,
}

/// `max_ω σ_max(G(iω) − G_r(iω))` over the given frequencies.
pub fn hinf_sampled(sys: &LtiSystem, rom: &LtiSystem, omegas: &[f64]) -> Result<SampledHinf> {
    if sys.inputs() != rom.inputs() || sys.outputs() != rom.outputs() {
        return shape_err("full and reduced systems have different input/output counts".to_string());
    }
    let mut value = 0.0f64;
    let mut skipped = 0;
    for &w in omegas {
        let s = Complex64::new(0.0, w);
        let g = match (transfer_function(sys, s), transfer_function(rom, s)) {
            (Ok(g), Ok(gr)) => g.sub(&gr),
            (Err(Error::Resonance(_)), _) | (_, Err(Error::Resonance(_))) => {
                skipped += 1;
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        value = value.max(g.max_singular_value());
    }
    Ok(SampledHinf { value, skipped })
}

/// `count` frequencies spaced evenly in log scale over `[lo, hi]`.
pub fn log_frequencies(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..count).map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64)).collect()
}

/// Largest eigenvalue of the symmetric part of `A_r` exceeds
/// `1e-12·‖A_r‖_F`.
pub fn is_flagged_unstable(rom: &Rom) -> Result<bool> {
    let top = rom.sys.symmetric_part_max_eig()?;
    Ok(top > 1e-12 * rom.sys.a().frobenius_norm())
}

/// `abs / denom`, NaN when the denominator vanishes.
pub fn relative(abs: f64, denom: f64) -> f64 {
    if denom > 0.0 {
        abs / denom
    } else {
        f64::NAN
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub n: usize,
    pub l1_abs: f64,
    pub l1_rel: f64,
    pub l2_abs: f64,
    pub l2_rel: f64,
    pub linf_abs: f64,
    pub linf_rel: f64,
    pub h2_rel: f64,
    pub hinf_rel: f64,
    pub unstable: bool,
}

impl ErrorRow {
    /// Time-domain columns from the error and reference norms; the
    /// frequency-domain columns start as NaN.
    pub fn from_norms(n: usize, err: LebesgueNorms, reference: LebesgueNorms) -> Self {
        Self {
            n,
            l1_abs: err.l1,
            l1_rel: relative(err.l1, reference.l1),
            l2_abs: err.l2,
            l2_rel: relative(err.l2, reference.l2),
            linf_abs: err.linf,
            linf_rel: relative(err.linf, reference.linf),
            h2_rel: f64::NAN,
            hinf_rel: f64::NAN,
            unstable: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorReport {
    /// Name of the Gramian variant the rows belong to.
    pub label: String,
    pub rows: Vec<ErrorRow>,
}

pub const REPORT_HEADER: &str = "n,l1_rel,l2_rel,linf_rel,h2_rel,hinf_rel,unstable";

fn fmt_cell(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        fmt_f64(x)
    }
}

impl ErrorReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{REPORT_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.n,
                fmt_cell(r.l1_rel),
                fmt_cell(r.l2_rel),
                fmt_cell(r.linf_rel),
                fmt_cell(r.h2_rel),
                fmt_cell(r.hinf_rel),
                u8::from(r.unstable)
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the format written by [`ErrorReport::write_csv`]. Absolute
    /// columns are not stored and come back as NaN.
    pub fn read_csv<R: std::io::Read>(label: &str, r: R) -> Result<ErrorReport> {
        use std::io::BufRead;
        let mut lines = std::io::BufReader::new(r).lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != REPORT_HEADER {
            return Err(Error::Parse(format!("unexpected report header {header:?}")));
        }
        let num = |f: &str| -> Result<f64> {
            if f == "nan" {
                Ok(f64::NAN)
            } else {
                f.parse().map_err(|_| Error::Parse(format!("bad number {f:?} in report")))
            }
        };
        let mut rows = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != 7 {
                return Err(Error::Parse(format!("report row has {} fields: {line:?}", f.len())));
            }
            rows.push(ErrorRow {
                n: f[0].parse().map_err(|_| Error::Parse(format!("bad order {:?}", f[0])))?,
                l1_abs: f64::NAN,
                l1_rel: num(f[1])?,
                l2_abs: f64::NAN,
                l2_rel: num(f[2])?,
                linf_abs: f64::NAN,
                linf_rel: num(f[3])?,
                h2_rel: num(f[4])?,
                hinf_rel: num(f[5])?,
                unstable: match f[6] {
                    "0" => false,
                    "1" => true,
                    other => return Err(Error::Parse(format!("bad unstable flag {other:?}"))),
                },
            });
        }
        Ok(ErrorReport { label: label.into(), rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let pick: fn(&ErrorRow) -> f64 = match name {
            "l1_rel" => |r| r.l1_rel,
            "l2_rel" => |r| r.l2_rel,
            "linf_rel" => |r| r.linf_rel,
            "h2_rel" => |r| r.h2_rel,
            "hinf_rel" => |r| r.hinf_rel,
            _ => return None,
        };
        Some(self.rows.iter().map(pick).collect())
    }
}
