//! Well-known tensors and operators, and seeded random generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::localsolve::LocalOperator;
use crate::mps::UniformMps;
use crate::{Matrix, Tensor, C64};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with independent standard-normal parts.
pub fn gaussian(rng: &mut Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn random_tensor(rng: &mut Rng, shape: &[usize]) -> Tensor {
    Tensor::from_fn(shape, |_| gaussian(rng))
}

pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian(rng: &mut Rng, n: usize) -> Matrix {
    let m = random_matrix(rng, n, n);
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Random `(D, d, D)` MPS, normalized to unit transfer-matrix spectral radius.
pub fn random_mps(rng: &mut Rng, bond: usize, phys: usize) -> UniformMps {
    UniformMps::new(random_tensor(rng, &[bond, phys, bond]))
        .and_then(|m| m.normalize())
        .expect("a Gaussian tensor is nonzero with probability one")
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn pauli_x() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_y() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), c(0.0)])
}

pub fn pauli_z() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// `|0><1|`
pub fn sigma_plus() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)])
}

/// `|1><0|`
pub fn sigma_minus() -> Matrix {
    Matrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(1.0), c(0.0)])
}

/// Builds a `(D, d, D)` tensor from its `d` virtual matrices.
pub fn tensor_from_matrices(mats: &[Matrix]) -> Tensor {
    let bond = mats[0].nrows();
    Tensor::from_fn(&[bond, mats.len(), bond], |i| mats[i[1]][(i[0], i[2])])
}

/// `A = (1, 0)` with `D = 1`: the product state `|00...0>`.
pub fn ferro() -> UniformMps {
    UniformMps::new(Tensor::new(vec![1, 2, 1], vec![c(1.0), c(0.0)]).unwrap()).unwrap()
}

/// `A^0 = |0><0|`, `A^1 = |1><1|`: the (non-injective) GHZ tensor.
pub fn ghz() -> UniformMps {
    let p0 = Matrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let p1 = Matrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
    UniformMps::new(tensor_from_matrices(&[p0, p1])).unwrap()
}

/// AKLT tensor in the spin-1 basis `(+1, 0, -1)`, left-canonical.
pub fn aklt() -> UniformMps {
    let s = (2.0f64 / 3.0).sqrt();
    UniformMps::new(tensor_from_matrices(&[
        sigma_plus() * c(s),
        pauli_z() * c(-(1.0f64 / 3.0).sqrt()),
        sigma_minus() * c(-s),
    ]))
    .unwrap()
}

/// Spin-1 matrices `(S^x, S^y, S^z)` in the basis `(+1, 0, -1)`.
pub fn spin_one() -> [Matrix; 3] {
    let r = 1.0 / 2f64.sqrt();
    let sx = Matrix::from_row_slice(
        3,
        3,
        &[c(0.0), c(r), c(0.0), c(r), c(0.0), c(r), c(0.0), c(r), c(0.0)],
    );
    let i = C64::new(0.0, r);
    let z = c(0.0);
    let sy = Matrix::from_row_slice(3, 3, &[z, -i, z, i, z, -i, z, i, z]);
    let sz = Matrix::from_diagonal(&crate::Vector::from_vec(vec![c(1.0), c(0.0), c(-1.0)]));
    [sx, sy, sz]
}

/// `S.S + (S.S)^2 / 3` on two spin-1 sites; the AKLT state has energy
/// `-2/3` per bond.
pub fn aklt_hamiltonian() -> LocalOperator {
    let s = spin_one();
    let ss: Matrix = s.iter().map(|m| m.kronecker(m)).sum();
    let h = &ss + &ss * &ss * c(1.0 / 3.0);
    LocalOperator::new(2, 3, h).unwrap()
}
