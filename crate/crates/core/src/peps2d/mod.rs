//! Two-dimensional versions of the local condition: the 2x2 plaquette
//! identity on the square lattice and the bond-wise sufficient condition on
//! the hexagonal lattice, each with a dense torus oracle.
//!
//! Injectivity of the PEPS tensors is not checked; it is the caller's
//! responsibility.

mod hex;
mod square;

pub use hex::{hex_pair, hex_sufficient_check, hex_torus_eigencheck, hex_torus_state, HexReport};
pub use square::{
    construct_plaquette_operator, patch, patch_x_bottom, patch_x_top, patch_y_left, patch_y_right,
    plaquette_identity_residual, solve_plaquette, torus_eigencheck, torus_state, x_shape, y_shape, PlaquetteSolution,
};

use crate::error::{Error, Result};
use crate::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lattice {
    /// Legs `(left, right, up, down, physical)`.
    Square,
    /// Legs `(leg 1, leg 2, leg 3, physical)`.
    Hex,
}

/// A PEPS site tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct PepsTensor {
    tensor: Tensor,
    lattice: Lattice,
}

impl PepsTensor {
    pub fn square(tensor: Tensor) -> Result<Self> {
        Self::new(tensor, Lattice::Square, 5)
    }

    pub fn hex(tensor: Tensor) -> Result<Self> {
        Self::new(tensor, Lattice::Hex, 4)
    }

    fn new(tensor: Tensor, lattice: Lattice, rank: usize) -> Result<Self> {
        if tensor.rank() != rank {
            return Err(Error::Shape(format!(
                "{lattice:?} PEPS tensor must have rank {rank}, got shape {:?}",
                tensor.shape()
            )));
        }
        if tensor.norm() == 0.0 {
            return Err(Error::ZeroTensor);
        }
        Ok(Self { tensor, lattice })
    }

    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn phys_dim(&self) -> usize {
        *self.tensor.shape().last().unwrap()
    }

    /// D = 1 tensor holding the single-site vector `v`.
    pub fn product(lattice: Lattice, v: &[crate::C64]) -> Result<Self> {
        let shape = match lattice {
            Lattice::Square => vec![1, 1, 1, 1, v.len()],
            Lattice::Hex => vec![1, 1, 1, v.len()],
        };
        Self::new(Tensor::new(shape.clone(), v.to_vec())?, lattice, shape.len())
    }
}
