use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{require_square_io, GramianMethod, GramianResult};
use crate::error::{Error, Result};
use crate::matlib::{gemm, Matrix, Op};
use crate::system::{LtiSystem, Quadrature, Rk4Stepper, TimeGrid};

/// Impulse amplitudes `c_k` and initial-state amplitudes `d_l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSets {
    pub input_scales: Vec<f64>,
    pub state_scales: Vec<f64>,
}

impl Default for PerturbationSets {
    fn default() -> Self {
        Self { input_scales: vec![1.0], state_scales: vec![1.0] }
    }
}

impl PerturbationSets {
    pub fn new(input_scales: Vec<f64>, state_scales: Vec<f64>) -> Result<Self> {
        let p = Self { input_scales, state_scales };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, set) in [("input", &self.input_scales), ("state", &self.state_scales)] {
            if set.is_empty() {
                return Err(Error::Config(format!("{name} perturbation set is empty")));
            }
            if set.iter().any(|&s| s == 0.0 || !s.is_finite()) {
                return Err(Error::Config(format!("{name} perturbation scales must be finite and nonzero")));
            }
        }
        Ok(())
    }
}

/// Reference point subtracted from each trajectory before correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Centering {
    /// The steady state of an impulse or free response, which is zero.
    #[default]
    SteadyState,
    /// The discrete mean over all samples of the trajectory.
    TemporalMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EmpiricalOptions {
    #[serde(default)]
    pub quadrature: Quadrature,
    #[serde(default)]
    pub centering: Centering,
}

/// `W = Σ_t w_t X(t) Z(t)ᵀ` over the primal impulse responses `X` and the
/// adjoint impulse responses `Z`.
pub fn empirical_linear_cross_gramian(sys: &LtiSystem, grid: &TimeGrid) -> Result<GramianResult> {
    empirical_linear_cross_gramian_with(sys, grid, Quadrature::Rectangle)
}

pub fn empirical_linear_cross_gramian_with(
    sys: &LtiSystem,
    grid: &TimeGrid,
    quadrature: Quadrature,
) -> Result<GramianResult> {
    require_square_io(sys)?;
    grid.validate()?;
    let start = Instant::now();
    let weights = quadrature.weights(grid);
    let primal = Rk4Stepper::for_system(sys, grid);
    let adjoint = Rk4Stepper::for_system(&sys.adjoint(), grid);

    let mut xs = state_responses(&primal, sys.b(), grid)?;
    let zs = state_responses(&adjoint, &sys.c().transpose(), grid)?;
    scale_blocks(&mut xs, sys.inputs(), &weights, None);
    let n = sys.states();
    let mut w = Matrix::zeros(n, n);
    gemm(1.0, Op::N(&xs), Op::T(&zs), 0.0, &mut w);
    Ok(GramianResult {
        w,
        method: GramianMethod::EmpiricalLinear,
        residual: grid.step,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Cross Gramian assembled from impulse-driven state trajectories and
/// initial-state-driven output trajectories.
///
/// `Ŵ_ij = 1/(K·L) Σ_k Σ_l 1/(c_k d_l) Σ_m Σ_t w_t x̃_i^{km}(t) ỹ_m^{lj}(t)`.
pub fn empirical_cross_gramian(sys: &LtiSystem, grid: &TimeGrid, perturb: &PerturbationSets) -> Result<GramianResult> {
    empirical_cross_gramian_with(sys, grid, perturb, EmpiricalOptions::default())
}

pub fn empirical_cross_gramian_with(
    sys: &LtiSystem,
    grid: &TimeGrid,
    perturb: &PerturbationSets,
    opts: EmpiricalOptions,
) -> Result<GramianResult> {
    require_square_io(sys)?;
    grid.validate()?;
    perturb.validate()?;
    let start = Instant::now();
    let n = sys.states();
    let m = sys.inputs();
    let weights = opts.quadrature.weights(grid);
    let stepper = Rk4Stepper::for_system(sys, grid);

    // Row block t of `ys` holds the outputs at t_t of the N free responses
    // from unit initial states, i.e. C Φ^t; column j belongs to e_j.
    let mut w = Matrix::zeros(n, n);
    for &d in &perturb.state_scales {
        let mut ys = output_responses(&stepper, sys.c(), d, grid)?;
        if opts.centering == Centering::TemporalMean {
            subtract_row_block_mean(&mut ys, m);
        }
        for &c in &perturb.input_scales {
            let mut xs = state_responses(&stepper, &sys.b().scale(c), grid)?;
            let centre = (opts.centering == Centering::TemporalMean).then(|| column_block_mean(&xs, m));
            scale_blocks(&mut xs, m, &weights, centre.as_ref());
            gemm(1.0 / (c * d), Op::N(&xs), Op::N(&ys), 1.0, &mut w);
        }
    }
    let kl = (perturb.input_scales.len() * perturb.state_scales.len()) as f64;
    if kl != 1.0 {
        w = w.scale(1.0 / kl);
    }
    Ok(GramianResult {
        w,
        method: GramianMethod::Empirical,
        residual: grid.step,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Responses `Φ^t X0` for t = 0..=S, stacked as column blocks of an
/// `N × (S+1)·r` matrix.
fn state_responses(stepper: &Rk4Stepper, x0: &Matrix, grid: &TimeGrid) -> Result<Matrix> {
    let (n, r) = x0.shape();
    let mut out = Matrix::zeros(n, grid.samples() * r);
    let mut x = x0.clone();
    for t in 0..grid.samples() {
        if t > 0 {
            x = stepper.step_block(&x);
            if !x.is_finite() {
                return Err(Error::Divergence(t));
            }
        }
        for i in 0..n {
            out.row_mut(i)[t * r..(t + 1) * r].copy_from_slice(x.row(i));
        }
    }
    Ok(out)
}

/// `d·C Φ^t` for t = 0..=S, stacked as row blocks of an `(S+1)·Q × N`
/// matrix. Row `m` of block `t` is output `m` of all N free responses.
fn output_responses(stepper: &Rk4Stepper, c: &Matrix, d: f64, grid: &TimeGrid) -> Result<Matrix> {
    let (q, n) = c.shape();
    let mut out = Matrix::zeros(grid.samples() * q, n);
    let mut y = c.scale(d);
    for t in 0..grid.samples() {
        if t > 0 {
            let mut next = Matrix::zeros(q, n);
            gemm(1.0, Op::N(&y), Op::N(stepper.transition()), 0.0, &mut next);
            if !next.is_finite() {
                return Err(Error::Divergence(t));
            }
            y = next;
        }
        out.as_mut_slice()[t * q * n..(t + 1) * q * n].copy_from_slice(y.as_slice());
    }
    Ok(out)
}

fn column_block_mean(xs: &Matrix, r: usize) -> Matrix {
    let blocks = xs.cols() / r;
    Matrix::from_fn(xs.rows(), r, |i, m| {
        let row = xs.row(i);
        (0..blocks).map(|t| row[t * r + m]).sum::<f64>() / blocks as f64
    })
}

fn subtract_row_block_mean(ys: &mut Matrix, q: usize) {
    let n = ys.cols();
    let blocks = ys.rows() / q;
    let mut mean = vec![0.0; q * n];
    for t in 0..blocks {
        for (acc, v) in mean.iter_mut().zip(&ys.as_slice()[t * q * n..(t + 1) * q * n]) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= blocks as f64);
    for t in 0..blocks {
        for (v, mu) in ys.as_mut_slice()[t * q * n..(t + 1) * q * n].iter_mut().zip(&mean) {
            *v -= mu;
        }
    }
}

/// Column block `t` becomes `w_t·(X_t − centre)`.
fn scale_blocks(xs: &mut Matrix, r: usize, weights: &[f64], centre: Option<&Matrix>) {
    for i in 0..xs.rows() {
        let row = xs.row_mut(i);
        for (t, &wt) in weights.iter().enumerate() {
            for m in 0..r {
                let v = &mut row[t * r + m];
                let shift = centre.map_or(0.0, |c| c[(i, m)]);
                *v = wt * (*v - shift);
            }
        }
    }
}
