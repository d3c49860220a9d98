//! Minimal reverse-mode numerics: dense tensors, primitives with hand-written
//! adjoints, Adam, and a finite-difference gradient checker.

mod adam;
mod gradcheck;
pub mod ops;
mod tensor;

use thiserror::Error;

pub use adam::{adam_step, AdamConfig, OptimizerState};
pub use gradcheck::{grad_check, grad_entries, GradCheckReport, GradEntry, Objective};
pub use tensor::{ParamStore, Tensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnError {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },
    #[error("vector norm {norm} is too small for cosine similarity")]
    DegenerateVector { norm: f64 },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("missing parameter {0:?}")]
    MissingParam(String),
}
