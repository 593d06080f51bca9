use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("matrix is not symmetric (relative asymmetry {0:.3e}); use the SVD path instead")]
    NotSymmetric(f64),

    #[error("singular Sylvester equation: eigenvalue pair sum {sum:.3e} within tolerance {tol:.3e}")]
    SingularEquation { sum: f64, tol: f64 },

    #[error("sign iteration did not converge in {0} iterations (coefficient likely not stable)")]
    Instability(usize),

    #[error("singular iterate in sign iteration at step {0}")]
    SingularIteration(usize),

    #[error("simulation diverged at step {0}: non-finite state")]
    Divergence(usize),

    #[error("resonance: sI - A is singular at s = {0}")]
    Resonance(Complex64),

    #[error("order {n} out of range 1..={max}")]
    OrderOutOfRange { n: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{stage}: {source}")]
    Stage { stage: String, source: Box<Error> },
}

/// Coarse classification used by the command line driver for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numerical,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::Shape(_) | Error::OrderOutOfRange { .. } => ErrorClass::Config,
            Error::Io(_) | Error::Parse(_) | Error::Json(_) => ErrorClass::Io,
            Error::Degenerate(_)
            | Error::NotSymmetric(_)
            | Error::SingularEquation { .. }
            | Error::Instability(_)
            | Error::SingularIteration(_)
            | Error::Divergence(_)
            | Error::Resonance(_) => ErrorClass::Numerical,
            Error::Stage { source, .. } => source.class(),
        }
    }

    /// The innermost error beneath any stage annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Attaches the name of a pipeline stage to an error.
pub trait StageContext<T> {
    fn stage(self, stage: impl Into<String>) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: impl Into<String>) -> Result<T> {
        self.map_err(|e| Error::Stage { stage: stage.into(), source: Box::new(e) })
    }
}

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}
