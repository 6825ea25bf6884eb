//! Dense complex linear algebra on top of nalgebra.

//!
//! Factorizations go through `faer`: nalgebra's complex SVD loses accuracy on
//! matrices with repeated singular values, which the telescopic maps have.

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::{Matrix, Vector, C64};

fn to_faer(m: &Matrix) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// `m = U diag(s) V^dagger` with singular values in descending order. With
/// `full` set, `V` is square and `s` is padded with zeros to its width.
struct Svd {
    u: Matrix,
    s: Vec<f64>,
    v: Matrix,
}

fn svd(m: &Matrix, full: bool) -> Result<Svd> {
    let fm = to_faer(m);
    let no_conv = |_| Error::NoConvergence {
        iterations: 0,
        residual: f64::NAN,
        last: Vec::new(),
    };
    let (u, s, v) = if full {
        let d = fm.svd().map_err(no_conv)?;
        (from_faer(d.U()), d.S().column_vector().iter().map(|x| x.re).collect::<Vec<_>>(), from_faer(d.V()))
    } else {
        let d = fm.thin_svd().map_err(no_conv)?;
        (from_faer(d.U()), d.S().column_vector().iter().map(|x| x.re).collect::<Vec<_>>(), from_faer(d.V()))
    };
    let mut s = s;
    if full {
        s.resize(v.ncols(), 0.0);
    }
    Ok(Svd { u, s, v })
}

/// Outcome of [`least_squares`].
#[derive(Clone, Debug)]
pub struct LinearSolveReport {
    /// Minimum-norm least-squares solution.
    pub solution: Vector,
    /// `||M x - y||` (Frobenius).
    pub residual_norm: f64,
    pub rank: usize,
    pub nullspace_dim: usize,
}

/// Singular values of `m` in descending order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s = to_faer(m)
        .singular_values()
        .expect("singular values of a finite matrix");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: singular values above `tol * sigma_max`.
pub fn rank(m: &Matrix, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > tol * smax).count(),
        _ => 0,
    }
}

fn cutoff(sigma: &[f64], tol: f64) -> f64 {
    tol * sigma.iter().copied().fold(0.0, f64::max)
}

/// Moore-Penrose pseudoinverse; singular values below `tol * sigma_max` are
/// treated as zero.
pub fn pseudo_inverse(m: &Matrix, tol: f64) -> Result<Matrix> {
    if m.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let svd = svd(m, false)?;
    let cut = cutoff(&svd.s, tol);
    let mut out = Matrix::zeros(m.ncols(), m.nrows());
    for (j, &s) in svd.s.iter().enumerate() {
        if s <= cut || s == 0.0 {
            continue;
        }
        let v = svd.v.column(j);
        let ut = svd.u.column(j).adjoint();
        out += (v * ut) * C64::new(1.0 / s, 0.0);
    }
    Ok(out)
}

/// Minimum-norm least-squares solution of `m x = y`.
pub fn least_squares(m: &Matrix, y: &Vector, tol: f64) -> Result<LinearSolveReport> {
    if m.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "least squares with {} rows but right-hand side of length {}",
            m.nrows(),
            y.len()
        )));
    }
    if m.ncols() == 0 {
        return Ok(LinearSolveReport {
            solution: Vector::zeros(0),
            residual_norm: y.norm(),
            rank: 0,
            nullspace_dim: 0,
        });
    }
    if m.nrows() == 0 {
        return Ok(LinearSolveReport {
            solution: Vector::zeros(m.ncols()),
            residual_norm: 0.0,
            rank: 0,
            nullspace_dim: m.ncols(),
        });
    }
    let svd = svd(m, false)?;
    let cut = cutoff(&svd.s, tol);
    let mut x = Vector::zeros(m.ncols());
    let mut rank = 0;
    for (j, &s) in svd.s.iter().enumerate() {
        if s <= cut || s == 0.0 {
            continue;
        }
        rank += 1;
        let coeff = svd.u.column(j).dotc(y) / s;
        x += svd.v.column(j) * coeff;
    }
    let residual_norm = (m * &x - y).norm();
    Ok(LinearSolveReport {
        solution: x,
        residual_norm,
        rank,
        nullspace_dim: m.ncols() - rank,
    })
}

/// Orthonormal basis of `{x : ||m x|| <= tol * ||m|| * ||x||}`, with `||m||`
/// the largest singular value.
pub fn nullspace_basis(m: &Matrix, tol: f64) -> Vec<Vector> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..cols).map(|j| Vector::from_fn(cols, |i, _| C64::new((i == j) as u8 as f64, 0.0))).collect();
    }
    let svd = svd(m, true).expect("SVD of a finite matrix");
    let smax = svd.s.iter().copied().fold(0.0, f64::max);
    (0..cols)
        .filter(|&j| svd.s[j] <= tol * smax)
        .map(|j| svd.v.column(j).into_owned())
        .collect()
}

/// All eigenvalues of a square matrix, sorted by decreasing modulus.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<C64>> {
    if m.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if !m.is_square() {
        return Err(Error::Shape(format!("eigenvalues of a {:?} matrix", m.shape())));
    }
    let mut ev: Vec<C64> = to_faer(m).eigenvalues().map_err(|_| Error::NoConvergence {
        iterations: 0,
        residual: f64::NAN,
        last: Vec::new(),
    })?;
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    Ok(ev)
}

/// Eigenvalue of maximal modulus together with a unit eigenvector.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: C64,
    pub vector: Vector,
}

/// Settings for [`dominant_eigenpair_with`].
#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Up to this dimension the map is materialised and solved densely.
    pub dense_threshold: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            dense_threshold: 4096,
        }
    }
}

/// Dominant eigenpair of a linear map given only by its action.
pub fn dominant_eigenpair(
    apply: impl Fn(&Vector) -> Vector,
    dim: usize,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    dominant_eigenpair_with(
        apply,
        dim,
        &EigenOptions {
            tol,
            max_iter,
            ..EigenOptions::default()
        },
    )
}

pub fn dominant_eigenpair_with(
    apply: impl Fn(&Vector) -> Vector,
    dim: usize,
    opts: &EigenOptions,
) -> Result<EigenPair> {
    if dim == 0 {
        return Err(Error::EmptyMatrix);
    }
    if dim <= opts.dense_threshold {
        let mut m = Matrix::zeros(dim, dim);
        for j in 0..dim {
            let mut e = Vector::zeros(dim);
            e[j] = C64::new(1.0, 0.0);
            m.set_column(j, &apply(&e));
        }
        return dense_dominant_eigenpair(&m, opts.tol);
    }
    power_iteration(&apply, dim, opts.tol, opts.max_iter)
}

/// Dense route: Schur for the eigenvalue, then the smallest right singular
/// vector of `m - lambda` for the eigenvector.
pub fn dense_dominant_eigenpair(m: &Matrix, tol: f64) -> Result<EigenPair> {
    let lambda = eigenvalues(m)?[0];
    let vector = eigenvector_for(m, lambda);
    let value = if vector.norm() > 0.0 {
        vector.dotc(&(m * &vector))
    } else {
        lambda
    };
    let residual = (m * &vector - &vector * value).norm();
    if residual > tol {
        return Err(Error::NoConvergence {
            iterations: 1,
            residual,
            last: vector.as_slice().to_vec(),
        });
    }
    Ok(EigenPair { value, vector })
}

/// Unit vector minimising `||(m - lambda) v||`.
pub fn eigenvector_for(m: &Matrix, lambda: C64) -> Vector {
    let n = m.nrows();
    let shifted = m - Matrix::identity(n, n) * lambda;
    let svd = svd(&shifted, true).expect("SVD of a finite matrix");
    // Singular values are descending, so the last column of V is the minimiser.
    svd.v.column(n - 1).normalize()
}

fn power_iteration(
    apply: &impl Fn(&Vector) -> Vector,
    dim: usize,
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    // Deterministic, generic start vector.
    let mut v = Vector::from_fn(dim, |i, _| C64::new(1.0 + (i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()));
    v.normalize_mut();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let w = apply(&v);
        let lambda = v.dotc(&w);
        residual = (&w - &v * lambda).norm();
        if residual <= tol {
            return Ok(EigenPair { value: lambda, vector: v });
        }
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(EigenPair {
                value: C64::new(0.0, 0.0),
                vector: v,
            });
        }
        v = w / C64::new(norm, 0.0);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
        last: v.as_slice().to_vec(),
    })
}

/// Hermitian part `(m + m^dagger) / 2`.
pub fn hermitian_part(m: &Matrix) -> Matrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut ev = to_faer(&hermitian_part(m))
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("eigenvalues of a finite Hermitian matrix");
    ev.sort_by(f64::total_cmp);
    ev
}

/// Kronecker product `a (x) b`, row-major site convention.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}
