//! Linear time-invariant state-space systems `ẋ = Ax + Bu`, `y = Cx`.
//!
//! The feed-through term is always zero.

mod simulate;
mod transfer;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use simulate::{impulse_state_response, simulate, simulate_with, Input, Quadrature, Rk4Stepper};
pub use transfer::{transfer_function, FrequencyResponse};

use crate::error::{shape_err, Error, Result};
use crate::matlib::{csv::fmt_f64, symmetric_eig, Matrix};

/// Whether a constructor verifies that the symmetric part of `A` is negative
/// definite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityCheck {
    Enforce,
    Waive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    a: Matrix,
    b: Matrix,
    c: Matrix,
}

impl LtiSystem {
    /// Builds a system after checking dimensions and finiteness.
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        if !a.is_square() {
            return shape_err(format!("A must be square, got {:?}", a.shape()));
        }
        let n = a.rows();
        if b.rows() != n {
            return shape_err(format!("B must have {n} rows, got {:?}", b.shape()));
        }
        if c.cols() != n {
            return shape_err(format!("C must have {n} columns, got {:?}", c.shape()));
        }
        a.check_finite("A")?;
        b.check_finite("B")?;
        c.check_finite("C")?;
        Ok(Self { a, b, c })
    }

    pub fn with_stability(a: Matrix, b: Matrix, c: Matrix, check: StabilityCheck) -> Result<Self> {
        let sys = Self::new(a, b, c)?;
        if check == StabilityCheck::Enforce {
            let top = sys.symmetric_part_max_eig()?;
            if !(top < 0.0) {
                return Err(Error::Degenerate(format!(
                    "symmetric part of A is not negative definite (largest eigenvalue {top:.3e})"
                )));
            }
        }
        Ok(sys)
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn into_parts(self) -> (Matrix, Matrix, Matrix) {
        (self.a, self.b, self.c)
    }

    /// N.
    pub fn states(&self) -> usize {
        self.a.rows()
    }

    /// M.
    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    /// Q.
    pub fn outputs(&self) -> usize {
        self.c.rows()
    }

    pub fn is_square_io(&self) -> bool {
        self.inputs() == self.outputs()
    }

    /// Largest eigenvalue of `(A + Aᵀ)/2`.
    pub fn symmetric_part_max_eig(&self) -> Result<f64> {
        let sp = symmetric_eig(&self.a.symmetric_part())?;
        Ok(sp.values.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    /// `A = Aᵀ` and `C = Bᵀ` up to the relative tolerance.
    pub fn is_state_space_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square_io() {
            return false;
        }
        let asym = self.a.relative_asymmetry();
        let bt = self.b.transpose();
        let dc = (&self.c - &bt).frobenius_norm();
        asym <= rel_tol && dc <= rel_tol * bt.frobenius_norm().max(f64::MIN_POSITIVE)
    }

    /// The adjoint system `(Aᵀ, Cᵀ, Bᵀ)`.
    pub fn adjoint(&self) -> LtiSystem {
        LtiSystem { a: self.a.transpose(), b: self.c.transpose(), c: self.b.transpose() }
    }
}

/// How many RK4 substeps are taken per sample interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Substeps {
    /// Smallest count that keeps `h_sub·‖A‖_∞ ≤ 2.5`, inside the real-axis
    /// stability interval of classical RK4.
    #[default]
    Auto,
    Fixed(usize),
}

impl Serialize for Substeps {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Substeps::Auto => s.serialize_str("auto"),
            Substeps::Fixed(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Substeps {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(usize),
            Name(String),
        }
        match Repr::deserialize(d)? {
            Repr::Count(0) => Err(serde::de::Error::custom("substeps must be at least 1")),
            Repr::Count(k) => Ok(Substeps::Fixed(k)),
            Repr::Name(s) if s == "auto" => Ok(Substeps::Auto),
            Repr::Name(s) => Err(serde::de::Error::custom(format!("unknown substeps value {s:?}"))),
        }
    }
}

/// Uniform sampling grid `t_k = k·step`, `k = 0..=count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub step: f64,
    pub count: usize,
    #[serde(default)]
    pub substeps: Substeps,
}

impl TimeGrid {
    pub fn new(step: f64, count: usize) -> Result<Self> {
        let g = Self { step, count, substeps: Substeps::Auto };
        g.validate()?;
        Ok(g)
    }

    /// Grid covering `[0, horizon]` with the given step (count rounded).
    pub fn from_horizon(step: f64, horizon: f64) -> Result<Self> {
        if !(step > 0.0) || !(horizon > 0.0) {
            return Err(Error::Config(format!("invalid grid: step {step}, horizon {horizon}")));
        }
        Self::new(step, (horizon / step).round().max(1.0) as usize)
    }

    pub fn with_substeps(mut self, substeps: Substeps) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config(format!("time step must be positive and finite, got {}", self.step)));
        }
        if self.count == 0 {
            return Err(Error::Config("time grid needs at least one step".into()));
        }
        if self.substeps == Substeps::Fixed(0) {
            return Err(Error::Config("substeps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.step * self.count as f64
    }

    /// Number of samples, `count + 1`.
    pub fn samples(&self) -> usize {
        self.count + 1
    }

    pub fn time(&self, k: usize) -> f64 {
        self.step * k as f64
    }

    pub fn same_sampling(&self, other: &TimeGrid) -> bool {
        self.step == other.step && self.count == other.count
    }
}

/// Samples of a vector-valued signal on a [`TimeGrid`]; row `k` of
/// `samples` is the value at `t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub samples: Matrix,
}

impl Trajectory {
    pub fn new(grid: TimeGrid, samples: Matrix) -> Result<Self> {
        if samples.rows() != grid.samples() {
            return shape_err(format!("trajectory needs {} samples, got {}", grid.samples(), samples.rows()));
        }
        samples.check_finite("trajectory")?;
        Ok(Self { grid, samples })
    }

    pub fn dim(&self) -> usize {
        self.samples.cols()
    }

    pub fn sample(&self, k: usize) -> &[f64] {
        self.samples.row(k)
    }

    /// Writes `time,x_1,…,x_d` lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for k in 0..self.grid.samples() {
            let mut line = fmt_f64(self.grid.time(k));
            for x in self.sample(k) {
                line.push(',');
                line.push_str(&fmt_f64(*x));
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64, b: f64, c: f64) -> LtiSystem {
        LtiSystem::new(Matrix::from_diag(&[a]), Matrix::from_diag(&[b]), Matrix::from_diag(&[c])).unwrap()
    }

    #[test]
    fn dimension_checks() {
        let a = Matrix::identity(2);
        assert!(LtiSystem::new(Matrix::zeros(2, 3), Matrix::zeros(2, 1), Matrix::zeros(1, 2)).is_err());
        assert!(LtiSystem::new(a.clone(), Matrix::zeros(3, 1), Matrix::zeros(1, 2)).is_err());
        assert!(LtiSystem::new(a.clone(), Matrix::zeros(2, 1), Matrix::zeros(1, 3)).is_err());
        let s = LtiSystem::new(a, Matrix::zeros(2, 3), Matrix::zeros(4, 2)).unwrap();
        assert_eq!((s.states(), s.inputs(), s.outputs()), (2, 3, 4));
    }

    #[test]
    fn stability_enforcement() {
        let stable = LtiSystem::with_stability(
            Matrix::from_rows(&[[-1.0, 5.0], [-5.0, -1.0]]),
            Matrix::zeros(2, 1),
            Matrix::zeros(1, 2),
            StabilityCheck::Enforce,
        );
        assert!(stable.is_ok());
        let unstable = LtiSystem::with_stability(
            Matrix::from_diag(&[-1.0, 0.0]),
            Matrix::zeros(2, 1),
            Matrix::zeros(1, 2),
            StabilityCheck::Enforce,
        );
        assert!(matches!(unstable, Err(Error::Degenerate(_))));
        assert!(LtiSystem::with_stability(
            Matrix::from_diag(&[1.0]),
            Matrix::zeros(1, 1),
            Matrix::zeros(1, 1),
            StabilityCheck::Waive
        )
        .is_ok());
    }

    #[test]
    fn adjoint_transposes() {
        let sys = LtiSystem::new(
            Matrix::from_rows(&[[-1.0, 1.0], [0.0, -2.0]]),
            Matrix::column_vector(&[1.0, 0.0]),
            Matrix::row_vector(&[0.0, 1.0]),
        )
        .unwrap();
        let adj = sys.adjoint();
        assert_eq!(adj.a(), &Matrix::from_rows(&[[-1.0, 0.0], [1.0, -2.0]]));
        assert_eq!(adj.b(), &Matrix::column_vector(&[0.0, 1.0]));
        assert_eq!(adj.c(), &Matrix::row_vector(&[1.0, 0.0]));
        assert_eq!(adj.adjoint(), sys);
    }

    #[test]
    fn symmetric_system_is_self_adjoint() {
        let sys = LtiSystem::new(
            Matrix::from_rows(&[[-2.0, 0.5], [0.5, -1.0]]),
            Matrix::column_vector(&[1.0, 2.0]),
            Matrix::row_vector(&[1.0, 2.0]),
        )
        .unwrap();
        assert!(sys.is_state_space_symmetric(0.0));
        assert_eq!(sys.adjoint(), sys);
        assert!(!scalar(-1.0, 1.0, 2.0).is_state_space_symmetric(1e-12));
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(0.1, 0).is_err());
        let g = TimeGrid::from_horizon(0.01, 1.0).unwrap();
        assert_eq!(g.count, 100);
        assert!((g.horizon() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn substeps_serde() {
        let g: TimeGrid = serde_json::from_str(r#"{"step":0.01,"count":100}"#).unwrap();
        assert_eq!(g.substeps, Substeps::Auto);
        let g: TimeGrid = serde_json::from_str(r#"{"step":0.01,"count":100,"substeps":4}"#).unwrap();
        assert_eq!(g.substeps, Substeps::Fixed(4));
        assert!(serde_json::from_str::<TimeGrid>(r#"{"step":0.01,"count":100,"substeps":0}"#).is_err());
        assert_eq!(serde_json::to_string(&Substeps::Auto).unwrap(), "\"auto\"");
    }
}
