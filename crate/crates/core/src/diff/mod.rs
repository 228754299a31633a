//! Minimal reverse-mode differentiation, parameter storage and Adam.

mod adam;
mod gradcheck;
mod store;
mod tape;

use thiserror::Error;

pub use adam::{adam_step, AdamConfig};
pub use gradcheck::{gradient_check, CoordCheck, CoordStatus, GradCheckReport};
pub use store::{BoundParams, ParamId, Parameter, ParameterStore, STORE_VERSION};
pub use tape::{Gradients, Op, Tape, Var};

#[derive(Debug, Error)]
pub enum DiffError {
    #[error("non-finite value produced by {op} (node {node})")]
    NonFinite { node: usize, op: Op },
    #[error("duplicate parameter name `{0}`")]
    DuplicateName(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter `{name}` has {got} values, shape needs {expected}")]
    ShapeMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("checkpoint version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("checkpoint is corrupt or truncated: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
