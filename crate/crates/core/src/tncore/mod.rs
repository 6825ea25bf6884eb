//! Dense complex tensors and the numerical linear algebra behind every solver.

mod linalg;
mod network;
mod tensor;

pub use linalg::{
    dense_dominant_eigenpair, dominant_eigenpair, dominant_eigenpair_with, eigenvalues,
    eigenvector_for, hermitian_eigenvalues, hermitian_part, kron, least_squares, nullspace_basis,
    pseudo_inverse, rank, singular_values, EigenOptions, EigenPair, LinearSolveReport,
};
pub use network::{contract_all, Labeled};
pub use tensor::{DenseTensor, Scalar};
pub(crate) use tensor::row_major_strides;
