#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod error;
pub mod experiment;
pub mod gramian;
pub mod matlib;
pub mod metrics;
pub mod reduce;
pub mod system;

pub use error::{Error, ErrorClass, Result};
pub use matlib::Matrix;
