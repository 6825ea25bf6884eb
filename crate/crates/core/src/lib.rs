//! Local characterization of matrix product state eigenstates.
//!
//! A translation-invariant MPS built from an injective tensor `A` is an exact
//! eigenstate of `sum_i O_i` (with `O` acting on `w` neighbouring sites) if
//! and only if there is a tensor `B` on `w - 1` sites and a number `epsilon`
//! such that
//!
//! ```text
//! (O - epsilon) . A^{(w)} = A . B - B . A
//! ```
//!
//! where `A^{(w)}` is the block of `w` consecutive tensors and the right-hand
//! side places `B` after (resp. before) a single `A`. Summed around a ring the
//! right-hand side telescopes to zero.
//!
//! The crate is organised as
//!
//! * [`tncore`]: dense tensors and the linear algebra everything else uses,
//! * [`mps`]: uniform MPS, transfer matrices, fixed points, injectivity,
//! * [`localsolve`]: the telescopic solver, gauge freedom, boundary operators,
//! * [`oracle`]: brute-force ring contraction used as ground truth,
//! * [`apps`]: symmetries, Lindblad steady states, zero-sum operators, XXZ,
//! * [`peps2d`]: the square-lattice plaquette identity and the hexagonal
//!   sufficient condition,
//! * [`fixtures`]: well-known tensors and seeded random generators.
//!
//! Axis conventions: MPS tensors are `(left bond, physical, right bond)`; MPO
//! tensors are `(left bond, out, in, right bond)`; operators on several sites
//! group the site indices row-major, left to right.

pub mod apps;
pub mod error;
pub mod fixtures;
pub mod localsolve;
pub mod mps;
pub mod oracle;
pub mod peps2d;
pub mod tncore;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use localsolve::{LocalOperator, SolveOptions, TelescopicSolution};
pub use mps::{FixedPoints, InjectivityReport, SiteChain, UniformMps};
pub use oracle::RingReport;
pub use tncore::{DenseTensor, LinearSolveReport, Scalar};

/// Complex double-precision tensor, the type every physics layer works with.
pub type Tensor = DenseTensor<C64>;

/// Dense complex matrix.
pub type Matrix = nalgebra::DMatrix<C64>;

/// Dense complex column vector.
pub type Vector = nalgebra::DVector<C64>;

/// Relative cutoff on singular values for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Normalized residual below which a telescopic identity counts as solved.
pub const DEFAULT_SOLVE_TOL: f64 = 1e-8;
