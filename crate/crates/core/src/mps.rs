//! Uniform MPS and MPO tensors and the structural analysis the local
//! eigenstate condition relies on: transfer matrix, fixed points,
//! injectivity length and left inverses.
//!
//! Every MPS tensor is stored with axes `(left bond, physical, right bond)`,
//! so `A^i` is the `D x D` matrix `A[:, i, :]`. Blocking `L` sites groups the
//! physical indices row-major in site order.

use crate::error::{Error, Result};
use crate::tncore::{eigenvalues, eigenvector_for, hermitian_eigenvalues, hermitian_part, pseudo_inverse, rank};
use crate::{Matrix, Tensor, Vector, C64, DEFAULT_RANK_TOL};

/// Relative gap `(|l1| - |l2|) / |l1|` below which the dominant transfer
/// eigenvalue is treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Translation-invariant MPS given by a single `(D, d, D)` tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformMps {
    tensor: Tensor,
}

impl UniformMps {
    pub fn new(tensor: Tensor) -> Result<Self> {
        let s = tensor.shape();
        if s.len() != 3 || s[0] != s[2] {
            return Err(Error::Shape(format!(
                "an MPS tensor must have shape (D, d, D), got {s:?}"
            )));
        }
        if tensor.norm() == 0.0 {
            return Err(Error::ZeroTensor);
        }
        Ok(Self { tensor })
    }

    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn bond_dim(&self) -> usize {
        self.tensor.shape()[0]
    }

    pub fn phys_dim(&self) -> usize {
        self.tensor.shape()[1]
    }

    /// The virtual matrix `A^i`.
    pub fn matrix(&self, i: usize) -> Matrix {
        let dd = self.bond_dim();
        Matrix::from_fn(dd, dd, |a, b| self.tensor.get(&[a, i, b]))
    }

    pub fn matrices(&self) -> Vec<Matrix> {
        (0..self.phys_dim()).map(|i| self.matrix(i)).collect()
    }

    /// `sum_i A^i (x) conj(A^i)`: the matrix of `X -> sum_i A^i X A^i^dagger`
    /// acting on row-major `vec(X)`. Its adjoint represents
    /// `X -> sum_i A^i^dagger X A^i`.
    pub fn transfer_matrix(&self) -> Matrix {
        let dd = self.bond_dim();
        let mut e = Matrix::zeros(dd * dd, dd * dd);
        for a in self.matrices() {
            e += a.kronecker(&a.conjugate());
        }
        e
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        Ok(eigenvalues(&self.transfer_matrix())?[0].norm())
    }

    /// Rescales `A` so that the transfer matrix has spectral radius one.
    pub fn normalize(&self) -> Result<Self> {
        let r = self.spectral_radius()?;
        if r <= 0.0 {
            return Err(Error::InvalidArgument(
                "transfer matrix is nilpotent (spectral radius 0)".into(),
            ));
        }
        Ok(Self {
            tensor: self.tensor.scale(C64::new(1.0 / r.sqrt(), 0.0)),
        })
    }

    /// Left and right fixed points of the transfer map, Hermitian, with
    /// positive trace and `Tr(rho_L rho_R) = 1`.
    pub fn fixed_points(&self) -> Result<FixedPoints> {
        let dd = self.bond_dim();
        let e = self.transfer_matrix();
        let ev = eigenvalues(&e)?;
        let top = ev[0];
        if let Some(second) = ev.get(1) {
            let gap = top.norm() - second.norm();
            if gap < DEGENERACY_TOL * top.norm() {
                return Err(Error::DegenerateSpectrum { gap });
            }
        }
        let to_rho = |v: Vector| {
            let m = Matrix::from_row_slice(dd, dd, v.as_slice());
            let tr = m.trace();
            let phase = if tr.norm() > 0.0 { tr.conj() / tr.norm() } else { C64::new(1.0, 0.0) };
            hermitian_part(&(m * phase))
        };
        let mut rho_right = to_rho(eigenvector_for(&e, top));
        let mut rho_left = to_rho(eigenvector_for(&e.adjoint(), top.conj()));
        let overlap = (&rho_left * &rho_right).trace().re;
        if !(overlap > 0.0) {
            return Err(Error::DegenerateSpectrum { gap: 0.0 });
        }
        let s = C64::new(1.0 / overlap.sqrt(), 0.0);
        rho_right *= s;
        rho_left *= s;
        Ok(FixedPoints {
            rho_left,
            rho_right,
            spectral_radius: top.norm(),
        })
    }

    /// The blocked tensor `(A^{i_1} ... A^{i_len})_{ab}`, shape `(D, d^len, D)`.
    pub fn block(&self, len: usize) -> Tensor {
        assert!(len >= 1, "block length must be at least one");
        let (dd, d) = (self.bond_dim(), self.phys_dim());
        let mut acc = self.tensor.clone();
        for n in 1..len {
            acc = acc
                .contract(&self.tensor, &[(2, 0)])
                .and_then(|t| t.reshape(&[dd, d.pow(n as u32 + 1), dd]))
                .expect("blocking shapes are consistent");
        }
        acc
    }

    /// `Gamma_len` as a `D^2 x d^len` matrix (rows `(a, b)`, columns the
    /// blocked physical index).
    fn gamma(&self, len: usize) -> Matrix {
        let b = self.block(len);
        b.permute(&[0, 2, 1])
            .and_then(|t| t.to_matrix(2))
            .expect("block has rank three")
    }

    pub fn default_l_max(&self) -> usize {
        default_l_max(self.bond_dim(), self.phys_dim())
    }

    /// Smallest `L <= l_max` with `rank(Gamma_L) = D^2`.
    pub fn injectivity_length(&self, l_max: Option<usize>) -> InjectivityReport {
        let l_max = l_max.unwrap_or_else(|| self.default_l_max()).max(1);
        let full = self.bond_dim().pow(2);
        let mut ranks = Vec::new();
        for len in 1..=l_max {
            let r = rank(&self.gamma(len), DEFAULT_RANK_TOL);
            ranks.push(r);
            if r == full {
                return InjectivityReport {
                    injective: true,
                    length: Some(len),
                    ranks,
                };
            }
        }
        InjectivityReport {
            injective: false,
            length: None,
            ranks,
        }
    }

    /// Tensor `A^{-1}` of shape `(D, d^len, D)` with
    /// `sum_p A^{-1}[c, p, e] * block[a, p, b] = delta_ac delta_be`.
    pub fn left_inverse(&self, len: usize) -> Result<Tensor> {
        let dd = self.bond_dim();
        let gamma = self.gamma(len);
        let r = rank(&gamma, DEFAULT_RANK_TOL);
        if r < dd * dd {
            return Err(Error::NotInjective {
                length: len,
                rank: r,
                required: dd * dd,
            });
        }
        // Columns of gamma^T are indexed by (a, b); its pseudoinverse maps back.
        let pinv = pseudo_inverse(&gamma.transpose(), DEFAULT_RANK_TOL)?;
        let p = self.phys_dim().pow(len as u32);
        Ok(Tensor::from_fn(&[dd, p, dd], |i| pinv[(i[0] * dd + i[2], i[1])]))
    }

    /// Tensor `X` with `sum_p X[c, p, e] * block[a, p, b] = rho_R[a, c] rho_L[e, b]`,
    /// i.e. the left inverse capped by the two fixed points.
    pub fn proof_inverse_x(&self, len: usize) -> Result<Tensor> {
        let inv = self.left_inverse(len)?;
        let fp = self.fixed_points()?;
        let rho_r = Tensor::from_matrix(&fp.rho_right);
        let rho_l = Tensor::from_matrix(&fp.rho_left);
        // sum_a rho_R[a, c] inv[a, p, b] -> (c, p, b)
        let t = rho_r.contract(&inv, &[(0, 0)])?;
        // sum_b (c, p, b) rho_L[e, b] -> (c, p, e)
        t.contract(&rho_l, &[(2, 1)])
    }
}

/// `2 * ceil(log_d(D^2)) + 2`.
pub fn default_l_max(bond: usize, phys: usize) -> usize {
    if phys < 2 {
        return 2;
    }
    let target = bond * bond;
    let mut len = 0;
    let mut reach = 1usize;
    while reach < target {
        reach = reach.saturating_mul(phys);
        len += 1;
    }
    2 * len + 2
}

/// Left and right transfer-matrix fixed points.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    pub rho_left: Matrix,
    pub rho_right: Matrix,
    pub spectral_radius: f64,
}

impl FixedPoints {
    /// `(||sum A rho_R A^dag - r rho_R||, ||sum A^dag rho_L A - r rho_L||)`.
    pub fn residuals(&self, m: &UniformMps) -> (f64, f64) {
        let r = C64::new(self.spectral_radius, 0.0);
        let mats = m.matrices();
        let right: Matrix = mats.iter().map(|a| a * &self.rho_right * a.adjoint()).sum();
        let left: Matrix = mats.iter().map(|a| a.adjoint() * &self.rho_left * a).sum();
        ((right - &self.rho_right * r).norm(), (left - &self.rho_left * r).norm())
    }

    pub fn overlap(&self) -> C64 {
        (&self.rho_left * &self.rho_right).trace()
    }

    /// Smallest eigenvalues of `(rho_L, rho_R)`; both positive for injective MPS.
    pub fn min_eigenvalues(&self) -> (f64, f64) {
        (
            hermitian_eigenvalues(&self.rho_left)[0],
            hermitian_eigenvalues(&self.rho_right)[0],
        )
    }
}

/// Result of [`UniformMps::injectivity_length`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityReport {
    pub injective: bool,
    pub length: Option<usize>,
    /// `rank(Gamma_l)` for `l = 1, 2, ...` up to the length found (or `l_max`).
    pub ranks: Vec<usize>,
}

/// A periodic unit cell of site-dependent tensors `A^{[n]}`, tensor `n` of
/// shape `(D_n, d_n, D_{n+1})`, the last right bond closing onto the first.
#[derive(Clone, Debug)]
pub struct SiteChain {
    tensors: Vec<Tensor>,
}

impl SiteChain {
    pub fn new(tensors: Vec<Tensor>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::InvalidArgument("empty site chain".into()));
        }
        for (n, t) in tensors.iter().enumerate() {
            if t.rank() != 3 {
                return Err(Error::Shape(format!("site {n} tensor has rank {}", t.rank())));
            }
            let next = &tensors[(n + 1) % tensors.len()];
            if t.shape()[2] != next.shape()[0] {
                return Err(Error::Shape(format!(
                    "bond between sites {n} and {}: {} != {}",
                    (n + 1) % tensors.len(),
                    t.shape()[2],
                    next.shape()[0]
                )));
            }
        }
        Ok(Self { tensors })
    }

    pub fn uniform(m: &UniformMps, len: usize) -> Self {
        Self {
            tensors: vec![m.tensor().clone(); len.max(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    /// Tensor at site `n`, periodically.
    pub fn site(&self, n: usize) -> &Tensor {
        &self.tensors[n % self.tensors.len()]
    }

    pub fn phys_dims(&self) -> Vec<usize> {
        self.tensors.iter().map(|t| t.shape()[1]).collect()
    }
}

/// Fuses the `(out, in)` legs of an MPO tensor `(D, d_out, d_in, D)` into one
/// physical leg of dimension `d_out * d_in`, out-major.
pub fn vectorize_mpo(t: &Tensor) -> Result<UniformMps> {
    let s = t.shape();
    if s.len() != 4 {
        return Err(Error::Shape(format!("an MPO tensor must have rank 4, got {s:?}")));
    }
    UniformMps::new(t.reshape(&[s[0], s[1] * s[2], s[3]])?)
}

/// Inverse of [`vectorize_mpo`].
pub fn devectorize_mpo(m: &UniformMps, d_out: usize, d_in: usize) -> Result<Tensor> {
    if d_out * d_in != m.phys_dim() {
        return Err(Error::Shape(format!(
            "physical dimension {} is not {d_out} x {d_in}",
            m.phys_dim()
        )));
    }
    m.tensor().reshape(&[m.bond_dim(), d_out, d_in, m.bond_dim()])
}
