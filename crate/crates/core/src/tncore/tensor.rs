use std::fmt;
use std::ops::Neg;

use num_traits::Num;

use crate::error::{Error, Result};
use crate::C64;

/// Anything the contraction engine can multiply and add.
///
/// Blanket-implemented, so `f32`, `f64`, `Complex<f64>` and exact rationals
/// all work.
pub trait Scalar: Num + Copy + Neg<Output = Self> + Send + Sync + fmt::Debug + 'static {}

impl<T> Scalar for T where T: Num + Copy + Neg<Output = T> + Send + Sync + fmt::Debug + 'static {}

/// Dense tensor with row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<S> {
    shape: Vec<usize>,
    data: Vec<S>,
}

pub(crate) fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    strides
}

impl<S: Scalar> DenseTensor<S> {
    pub fn new(shape: Vec<usize>, data: Vec<S>) -> Result<Self> {
        if shape.iter().any(|&n| n == 0) {
            return Err(Error::Shape(format!("axis lengths must be positive, got {shape:?}")));
        }
        let size: usize = shape.iter().product();
        if size != data.len() {
            return Err(Error::Shape(format!(
                "shape {shape:?} holds {size} entries but {} were given",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let size = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![S::zero(); size],
        }
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> S) -> Self {
        let size: usize = shape.iter().product();
        let mut data = Vec::with_capacity(size);
        let mut idx = vec![0; shape.len()];
        for _ in 0..size {
            data.push(f(&idx));
            for k in (0..shape.len()).rev() {
                idx[k] += 1;
                if idx[k] < shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self {
            shape: shape.to_vec(),
            data,
        }
    }

    /// The `n x n` identity matrix as a rank-2 tensor.
    pub fn eye(n: usize) -> Self {
        Self::from_fn(&[n, n], |i| if i[0] == i[1] { S::one() } else { S::zero() })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn strides(&self) -> Vec<usize> {
        row_major_strides(&self.shape)
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| {
                debug_assert!(i < n);
                acc * n + i
            })
    }

    pub fn get(&self, idx: &[usize]) -> S {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: S) {
        let off = self.offset(idx);
        self.data[off] = value;
    }

    /// Row-major regrouping of the same data.
    pub fn reshape(&self, shape: &[usize]) -> Result<Self> {
        let size: usize = shape.iter().product();
        if size != self.data.len() || shape.iter().any(|&n| n == 0) {
            return Err(Error::Shape(format!(
                "cannot reshape {:?} into {shape:?}",
                self.shape
            )));
        }
        Ok(Self {
            shape: shape.to_vec(),
            data: self.data.clone(),
        })
    }

    /// Output axis `k` is input axis `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let rank = self.rank();
        let mut seen = vec![false; rank];
        if perm.len() != rank
            || perm
                .iter()
                .any(|&p| p >= rank || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidPermutation {
                perm: perm.to_vec(),
                rank,
            });
        }
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let in_strides = self.strides();
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let strides: Vec<usize> = perm.iter().map(|&p| in_strides[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; rank];
        let mut src = 0usize;
        // Innermost output axis is walked in a tight loop.
        let (inner_len, inner_stride) = match rank {
            0 => (1, 0),
            _ => (shape[rank - 1], strides[rank - 1]),
        };
        let outer: usize = self.data.len() / inner_len;
        for _ in 0..outer {
            for j in 0..inner_len {
                data.push(self.data[src + j * inner_stride]);
            }
            for k in (0..rank.saturating_sub(1)).rev() {
                idx[k] += 1;
                src += strides[k];
                if idx[k] < shape[k] {
                    break;
                }
                src -= strides[k] * shape[k];
                idx[k] = 0;
            }
        }
        Ok(Self { shape, data })
    }

    /// Sums over the paired axes `(axis of self, axis of other)`.
    ///
    /// The result carries the unpaired axes of `self` followed by the unpaired
    /// axes of `other`, each in their original order.
    pub fn contract(&self, other: &Self, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut used_a = vec![false; self.rank()];
        let mut used_b = vec![false; other.rank()];
        for &(a, b) in pairs {
            if a >= self.rank() || b >= other.rank() {
                return Err(Error::Shape(format!(
                    "contraction pair ({a}, {b}) out of range for ranks {} and {}",
                    self.rank(),
                    other.rank()
                )));
            }
            if std::mem::replace(&mut used_a[a], true) || std::mem::replace(&mut used_b[b], true) {
                return Err(Error::Shape(format!("contraction pairs {pairs:?} are not disjoint")));
            }
            if self.shape[a] != other.shape[b] {
                return Err(Error::AxisMismatch {
                    axis_a: a,
                    len_a: self.shape[a],
                    axis_b: b,
                    len_b: other.shape[b],
                });
            }
        }
        let free_a: Vec<usize> = (0..self.rank()).filter(|&k| !used_a[k]).collect();
        let free_b: Vec<usize> = (0..other.rank()).filter(|&k| !used_b[k]).collect();

        let perm_a: Vec<usize> = free_a.iter().copied().chain(pairs.iter().map(|p| p.0)).collect();
        let perm_b: Vec<usize> = pairs.iter().map(|p| p.1).chain(free_b.iter().copied()).collect();
        let a = self.permute(&perm_a)?;
        let b = other.permute(&perm_b)?;

        let m: usize = free_a.iter().map(|&k| self.shape[k]).product();
        let n: usize = free_b.iter().map(|&k| other.shape[k]).product();
        let inner: usize = pairs.iter().map(|p| self.shape[p.0]).product();
        let data = matmul(&a.data, &b.data, m, inner, n);

        let shape = free_a
            .iter()
            .map(|&k| self.shape[k])
            .chain(free_b.iter().map(|&k| other.shape[k]))
            .collect();
        Ok(Self { shape, data })
    }

    /// Tensor product, axes of `self` first.
    pub fn outer(&self, other: &Self) -> Self {
        self.contract(other, &[])
            .expect("outer product has no pairs to mismatch")
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, s: S) -> Self {
        self.map(|x| x * s)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(S, S) -> S) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "elementwise operation on {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(Self {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }
}

/// `(m x k) * (k x n)`, all row-major.
fn matmul<S: Scalar>(a: &[S], b: &[S], m: usize, k: usize, n: usize) -> Vec<S> {
    let mut out = vec![S::zero(); m * n];
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == S::zero() {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            for (o, &bv) in row.iter_mut().zip(brow) {
                *o = *o + aip * bv;
            }
        }
    }
    out
}

impl DenseTensor<C64> {
    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sum conj(self) * other` over all entries.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "inner product of {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// Frobenius distance, `||self - other||`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Views the tensor as a matrix whose rows are the first `row_axes` axes.
    pub fn to_matrix(&self, row_axes: usize) -> Result<crate::Matrix> {
        if row_axes > self.rank() {
            return Err(Error::Shape(format!(
                "cannot split rank-{} tensor after {row_axes} axes",
                self.rank()
            )));
        }
        let rows: usize = self.shape[..row_axes].iter().product();
        let cols: usize = self.shape[row_axes..].iter().product();
        Ok(crate::Matrix::from_row_slice(rows, cols, &self.data))
    }

    pub fn from_matrix(m: &crate::Matrix) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        Self {
            shape: vec![rows, cols],
            data,
        }
    }

    pub fn from_vector(shape: &[usize], v: &crate::Vector) -> Result<Self> {
        Self::new(shape.to_vec(), v.as_slice().to_vec())
    }

    pub fn to_vector(&self) -> crate::Vector {
        crate::Vector::from_column_slice(&self.data)
    }
}
