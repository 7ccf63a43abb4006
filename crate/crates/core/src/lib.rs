#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod cli;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod kernels;
pub mod scalar;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};

/// Kernel in floating point, as used by the simulator.
pub type Kernel = kernels::AttachmentKernel<f64>;
/// Kernel over exact rationals.
pub type ExactKernel = kernels::AttachmentKernel<num_rational::BigRational>;
pub type FringeTable64 = theory::FringeTable<f64>;
pub type ExactFringeTable = theory::FringeTable<num_rational::BigRational>;
