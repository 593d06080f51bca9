use serde::{Deserialize, Serialize};

use super::{LtiSystem, Substeps, TimeGrid, Trajectory};
use crate::error::{shape_err, Error, Result};
use crate::matlib::{gemm, Matrix, Op};

/// Largest `h·‖A‖_∞` allowed per substep under [`Substeps::Auto`].
const AUTO_STEP_BOUND: f64 = 2.5;

/// Time-quadrature rule applied to sampled integrands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    /// Left endpoint: weight `h` on samples `0..S`, zero on the last.
    #[default]
    Rectangle,
    Trapezoid,
}

impl Quadrature {
    pub fn weights(self, grid: &TimeGrid) -> Vec<f64> {
        let h = grid.step;
        let mut w = vec![h; grid.samples()];
        match self {
            Quadrature::Rectangle => w[grid.count] = 0.0,
            Quadrature::Trapezoid => {
                w[0] = 0.5 * h;
                w[grid.count] = 0.5 * h;
            }
        }
        w
    }
}

/// Input signal, held constant over each sample interval.
#[derive(Debug, Clone, Copy)]
pub enum Input<'a> {
    Zero,
    /// Row `k` is the value on `[t_k, t_{k+1})`; needs at least `count` rows.
    Held(&'a Matrix),
}

/// Classical RK4 for `ẋ = Ax + Bu` with `u` held per step, stored as its
/// one-step map `x ↦ Φx + Γu`.
///
/// For a linear right-hand side the four RK4 stages collapse to
/// `Φ = I + hA·P(hA)` and `Γ = h·P(hA)·B` with
/// `P(z) = 1 + z/2 + z²/6 + z³/24`, so this is the same scheme evaluated
/// once per grid instead of once per step.
#[derive(Debug, Clone)]
pub struct Rk4Stepper {
    phi: Matrix,
    gamma: Matrix,
    substeps: usize,
}

impl Rk4Stepper {
    pub fn new(a: &Matrix, b: &Matrix, grid: &TimeGrid) -> Self {
        let n = a.rows();
        let k = Self::substeps_for(a, grid);
        let hs = grid.step / k as f64;
        let hmat = a.scale(hs);
        let eye = Matrix::identity(n);

        // T = I + (H/2)(I + (H/3)(I + H/4))
        let mut t = &eye + &hmat.scale(0.25);
        for d in [3.0, 2.0] {
            let mut next = eye.clone();
            gemm(1.0 / d, Op::N(&hmat), Op::N(&t), 1.0, &mut next);
            t = next;
        }
        let mut phi_s = eye;
        gemm(1.0, Op::N(&hmat), Op::N(&t), 1.0, &mut phi_s);
        let mut gamma_s = Matrix::zeros(n, b.cols());
        gemm(hs, Op::N(&t), Op::N(b), 0.0, &mut gamma_s);

        let mut phi = phi_s.clone();
        let mut gamma = gamma_s.clone();
        for _ in 1..k {
            let mut g = gamma_s.clone();
            gemm(1.0, Op::N(&phi_s), Op::N(&gamma), 1.0, &mut g);
            gamma = g;
            phi = phi_s.matmul(&phi);
        }
        Self { phi, gamma, substeps: k }
    }

    pub fn for_system(sys: &LtiSystem, grid: &TimeGrid) -> Self {
        Self::new(sys.a(), sys.b(), grid)
    }

    pub fn substeps_for(a: &Matrix, grid: &TimeGrid) -> usize {
        match grid.substeps {
            Substeps::Fixed(k) => k.max(1),
            Substeps::Auto => {
                let r = grid.step * a.inf_norm() / AUTO_STEP_BOUND;
                if r.is_finite() && r > 1.0 {
                    r.ceil() as usize
                } else {
                    1
                }
            }
        }
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// One-step state transition `Φ`.
    pub fn transition(&self) -> &Matrix {
        &self.phi
    }

    /// One-step input map `Γ`.
    pub fn input_map(&self) -> &Matrix {
        &self.gamma
    }

    /// `out = Φx + Γu`.
    pub fn step(&self, x: &[f64], u: Option<&[f64]>, out: &mut [f64]) {
        self.phi.matvec_into(x, out);
        if let Some(u) = u {
            for (o, row) in out.iter_mut().zip(0..self.gamma.rows()) {
                *o += crate::matlib::dot(self.gamma.row(row), u);
            }
        }
    }

    /// Advances every column of `x` by one step with zero input.
    pub fn step_block(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), x.cols());
        gemm(1.0, Op::N(&self.phi), Op::N(x), 0.0, &mut out);
        out
    }
}

/// Integrates the system from `x0` and returns `(state, output)`.
pub fn simulate(sys: &LtiSystem, x0: &[f64], u: Input<'_>, grid: &TimeGrid) -> Result<(Trajectory, Trajectory)> {
    grid.validate()?;
    let stepper = Rk4Stepper::for_system(sys, grid);
    simulate_with(sys, &stepper, x0, u, grid)
}

/// As [`simulate`], reusing a prebuilt stepper for the same system and grid.
pub fn simulate_with(
    sys: &LtiSystem,
    stepper: &Rk4Stepper,
    x0: &[f64],
    u: Input<'_>,
    grid: &TimeGrid,
) -> Result<(Trajectory, Trajectory)> {
    let n = sys.states();
    if x0.len() != n {
        return shape_err(format!("initial state has length {}, expected {n}", x0.len()));
    }
    if let Input::Held(m) = u {
        if m.cols() != sys.inputs() || m.rows() < grid.count {
            return shape_err(format!(
                "input signal {:?} must have at least {} rows and {} columns",
                m.shape(),
                grid.count,
                sys.inputs()
            ));
        }
        m.check_finite("input signal")?;
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence(0));
    }
    let mut states = Matrix::zeros(grid.samples(), n);
    states.row_mut(0).copy_from_slice(x0);
    let mut next = vec![0.0; n];
    for k in 0..grid.count {
        let uk = match u {
            Input::Zero => None,
            Input::Held(m) => Some(m.row(k)),
        };
        stepper.step(states.row(k), uk, &mut next);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence(k + 1));
        }
        states.row_mut(k + 1).copy_from_slice(&next);
    }
    let outputs = states.matmul_t(sys.c());
    Ok((Trajectory { grid: *grid, samples: states }, Trajectory { grid: *grid, samples: outputs }))
}

/// State response to the impulse `amplitude·direction·δ(t)`, realised as the
/// initial state `amplitude·B·direction`.
pub fn impulse_state_response(
    sys: &LtiSystem,
    direction: &[f64],
    amplitude: f64,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    if direction.len() != sys.inputs() {
        return shape_err(format!("impulse direction has length {}, expected {}", direction.len(), sys.inputs()));
    }
    let mut x0 = sys.b().matvec(direction);
    x0.iter_mut().for_each(|v| *v *= amplitude);
    Ok(simulate(sys, &x0, Input::Zero, grid)?.0)
}
