use thiserror::Error;

use crate::C64;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two contracted axes disagree in length.
    #[error("dimension mismatch: axis {axis_a} of a has length {len_a}, axis {axis_b} of b has length {len_b}")]
    AxisMismatch {
        axis_a: usize,
        len_a: usize,
        axis_b: usize,
        len_b: usize,
    },

    /// Generic shape inconsistency, with a human-readable description.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid permutation {perm:?} for a tensor of rank {rank}")]
    InvalidPermutation { perm: Vec<usize>, rank: usize },

    #[error("empty matrix")]
    EmptyMatrix,

    /// An iterative method ran out of iterations; the last iterate is kept.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last: Vec<C64>,
    },

    #[error("tensor is identically zero")]
    ZeroTensor,

    /// The dominant transfer-matrix eigenvalue is (nearly) degenerate.
    #[error("degenerate dominant eigenvalue: |lambda_1| - |lambda_2| = {gap:e}; the MPS is not injective")]
    DegenerateSpectrum { gap: f64 },

    #[error("not injective at block length {length}: rank {rank} < {required}")]
    NotInjective {
        length: usize,
        rank: usize,
        required: usize,
    },

    /// A dense object would exceed the configured entry cap.
    #[error("dense size {requested} exceeds the cap of {cap} entries")]
    SizeCap { requested: usize, cap: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
