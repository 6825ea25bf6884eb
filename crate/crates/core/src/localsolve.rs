//! The telescopic identity `(O - eps) . A^(w) = A . B - B . A`, solved as a
//! linear least-squares problem in `(B, eps)`.
//!
//! `O` acts on `w` sites and `B` lives on `w - 1` sites, both with their
//! physical indices grouped row-major. On the right-hand side `A . B` places
//! one `A` on the first site and `B` on the remaining `w - 1`; `B . A` places
//! `B` first and `A` on the last site.

use crate::error::{Error, Result};
use crate::mps::{SiteChain, UniformMps};
use crate::tncore::{least_squares, nullspace_basis, rank};
use crate::{Matrix, Tensor, Vector, C64, DEFAULT_RANK_TOL, DEFAULT_SOLVE_TOL};

/// An operator on `width` contiguous sites of dimension `phys`, as a
/// `phys^width x phys^width` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    width: usize,
    phys: usize,
    matrix: Matrix,
}

impl LocalOperator {
    pub fn new(width: usize, phys: usize, matrix: Matrix) -> Result<Self> {
        if width == 0 || phys == 0 {
            return Err(Error::InvalidArgument("width and physical dimension must be positive".into()));
        }
        let n = phys.pow(width as u32);
        if matrix.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "operator on {width} sites of dimension {phys} must be {n}x{n}, got {:?}",
                matrix.shape()
            )));
        }
        Ok(Self { width, phys, matrix })
    }

    /// Infers the width from the matrix size, which must be a power of `phys`.
    pub fn infer(phys: usize, matrix: Matrix) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(Error::Shape(format!("operator matrix is not square: {:?}", matrix.shape())));
        }
        if phys < 2 {
            return Err(Error::Shape("cannot infer the width for physical dimension < 2".into()));
        }
        let (mut width, mut size) = (0, 1usize);
        while size < n {
            size *= phys;
            width += 1;
        }
        if size != n || width == 0 {
            return Err(Error::Shape(format!("operator size {n} is not a power of {phys}")));
        }
        Self::new(width, phys, matrix)
    }

    pub fn identity(width: usize, phys: usize) -> Self {
        let n = phys.pow(width as u32);
        Self::new(width, phys, Matrix::identity(n, n)).expect("square by construction")
    }

    pub fn zero(width: usize, phys: usize) -> Self {
        let n = phys.pow(width as u32);
        Self::new(width, phys, Matrix::zeros(n, n)).expect("square by construction")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn phys(&self) -> usize {
        self.phys
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// `O (x) Id` on `width` sites; on a ring the translates sum to the same
    /// extensive operator.
    pub fn pad_to(&self, width: usize) -> Result<Self> {
        if width < self.width {
            return Err(Error::InvalidArgument(format!(
                "cannot pad a width-{} operator to width {width}",
                self.width
            )));
        }
        let extra = self.phys.pow((width - self.width) as u32);
        Self::new(width, self.phys, self.matrix.kronecker(&Matrix::identity(extra, extra)))
    }

    /// `out[a, p, b] = sum_q O[p, q] t[a, q, b]` for a `(D, d^w, D')` tensor.
    pub fn apply_to_block(&self, t: &Tensor) -> Result<Tensor> {
        let s = t.shape();
        if s.len() != 3 || s[1] != self.matrix.nrows() {
            return Err(Error::Shape(format!(
                "operator of size {} cannot act on a block of shape {s:?}",
                self.matrix.nrows()
            )));
        }
        // (p, q) x (a, q, b) -> (p, a, b)
        Tensor::from_matrix(&self.matrix)
            .contract(t, &[(1, 1)])?
            .permute(&[1, 0, 2])
    }

    fn shifted(&self, eps: C64) -> Matrix {
        let n = self.matrix.nrows();
        &self.matrix - Matrix::identity(n, n) * eps
    }
}

/// Options for [`solve`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Pin `eps` instead of solving for it.
    pub epsilon: Option<C64>,
    /// Solvability threshold on the normalized residual.
    pub tol: f64,
    /// Relative singular-value cutoff for ranks and nullspaces.
    pub rank_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            epsilon: None,
            tol: DEFAULT_SOLVE_TOL,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

impl SolveOptions {
    pub fn fixed(epsilon: C64) -> Self {
        Self {
            epsilon: Some(epsilon),
            ..Self::default()
        }
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }
}

/// Output of [`solve`].
#[derive(Clone, Debug)]
pub struct TelescopicSolution {
    /// Shape `(D, d^(w-1), D)`, orthogonal to the gauge direction.
    pub b: Tensor,
    pub epsilon: C64,
    /// `||(O - eps) A^(w) - (A B - B A)|| / (||O A^(w)|| + 1)`.
    pub residual: f64,
    /// Dimension of the nullspace of `B -> A B - B A`.
    pub gauge_dim: usize,
    pub solvable: bool,
    pub width: usize,
    pub warnings: Vec<String>,
}

/// `(O - eps)` applied to the physical legs of `block(m, w)`.
pub fn telescopic_lhs(m: &UniformMps, o: &LocalOperator, eps: C64) -> Result<Tensor> {
    check_phys(m, o)?;
    let shifted = LocalOperator::new(o.width, o.phys, o.shifted(eps))?;
    shifted.apply_to_block(&m.block(o.width))
}

/// `A . B - B . A` for `B` of shape `(D, d^k, D)`; the result has shape
/// `(D, d^(k+1), D)`.
pub fn telescopic_rhs(m: &UniformMps, b: &Tensor) -> Result<Tensor> {
    bond_rhs(m.tensor(), b, b, m.tensor())
}

/// `left . b_right - b_left . right` for tensors on a chain: `left`, `b_left`
/// sit on the first site(s) and `b_right`, `right` on the following ones.
pub fn bond_rhs(left: &Tensor, b_right: &Tensor, b_left: &Tensor, right: &Tensor) -> Result<Tensor> {
    let fuse = |x: &Tensor, y: &Tensor| -> Result<Tensor> {
        if x.rank() != 3 || y.rank() != 3 {
            return Err(Error::Shape("bond tensors must have rank 3".into()));
        }
        let (sx, sy) = (x.shape(), y.shape());
        x.contract(y, &[(2, 0)])?.reshape(&[sx[0], sx[1] * sy[1], sy[2]])
    };
    fuse(left, b_right)?.sub(&fuse(b_left, right)?)
}

fn check_phys(m: &UniformMps, o: &LocalOperator) -> Result<()> {
    if o.phys != m.phys_dim() {
        return Err(Error::Shape(format!(
            "operator physical dimension {} differs from the MPS physical dimension {}",
            o.phys,
            m.phys_dim()
        )));
    }
    Ok(())
}

/// Matrix of `B -> A . B - B . A` for `B` on `k` sites, acting on row-major
/// `vec(B)` and producing row-major `vec` of the `(D, d^(k+1), D)` result.
pub fn telescopic_map(m: &UniformMps, k: usize) -> Matrix {
    let (dd, d) = (m.bond_dim(), m.phys_dim());
    let a = m.tensor();
    let pk = d.pow(k as u32);
    let pw = pk * d;
    let row = |al: usize, p: usize, be: usize| (al * pw + p) * dd + be;
    let col = |al: usize, j: usize, be: usize| (al * pk + j) * dd + be;
    let mut r = Matrix::zeros(dd * dd * pw, dd * dd * pk);
    for al in 0..dd {
        for i in 0..d {
            for ga in 0..dd {
                let x = a.get(&[al, i, ga]);
                let y = a.get(&[ga, i, al]);
                for j in 0..pk {
                    for be in 0..dd {
                        // A[al, i, ga] B[ga, j, be]
                        r[(row(al, i * pk + j, be), col(ga, j, be))] += x;
                        // -B[be, j, ga] A[ga, i, al], indexed as (be, j i, al)
                        r[(row(be, j * d + i, al), col(be, j, ga))] -= y;
                    }
                }
            }
        }
    }
    r
}

/// Solves the telescopic identity for `(B, eps)`.
pub fn solve(m: &UniformMps, o: &LocalOperator, opts: &SolveOptions) -> Result<TelescopicSolution> {
    check_phys(m, o)?;
    let w = o.width;
    if w < 2 {
        return Err(Error::InvalidArgument("the telescopic identity needs an operator on at least two sites".into()));
    }
    let (dd, d) = (m.bond_dim(), m.phys_dim());
    let k = w - 1;
    let b_shape = [dd, d.pow(k as u32), dd];
    let nb = dd * dd * d.pow(k as u32);

    let r = telescopic_map(m, k);
    let blk = m.block(w);
    let o_blk = o.apply_to_block(&blk)?;
    let gauge_dim = nb - rank(&r, opts.rank_tol);

    let (b_vec, epsilon) = match opts.epsilon {
        Some(eps) => {
            let y = o_blk.sub(&blk.scale(eps))?.to_vector();
            (least_squares(&r, &y, opts.rank_tol)?.solution, eps)
        }
        None => {
            let mut full = Matrix::zeros(r.nrows(), nb + 1);
            full.columns_mut(0, nb).copy_from(&r);
            full.set_column(nb, &blk.to_vector());
            let sol = least_squares(&full, &o_blk.to_vector(), opts.rank_tol)?.solution;
            (sol.rows(0, nb).into_owned(), sol[nb])
        }
    };
    let b = gauge_fix(m, Tensor::from_vector(&b_shape, &b_vec)?);
    let residual = residual(m, o, &b, epsilon)?;

    let mut warnings = Vec::new();
    let inj = m.injectivity_length(None);
    if !inj.injective {
        warnings.push(format!(
            "MPS is not injective up to block length {} (ranks {:?}); an unsolvable identity does not rule out an eigenstate",
            inj.ranks.len(),
            inj.ranks
        ));
    }
    if gauge_dim != 1 {
        warnings.push(format!("gauge freedom has dimension {gauge_dim}, expected 1"));
    }
    Ok(TelescopicSolution {
        b,
        epsilon,
        residual,
        gauge_dim,
        solvable: residual < opts.tol,
        width: w,
        warnings,
    })
}

/// Normalized mismatch of the identity for a given `(B, eps)`.
pub fn residual(m: &UniformMps, o: &LocalOperator, b: &Tensor, eps: C64) -> Result<f64> {
    let lhs = telescopic_lhs(m, o, eps)?;
    let rhs = telescopic_rhs(m, b)?;
    let scale = o.apply_to_block(&m.block(o.width))?.norm() + 1.0;
    Ok(lhs.distance(&rhs)? / scale)
}

/// Removes the component of `b` along `block(m, k)`.
pub fn gauge_fix(m: &UniformMps, b: Tensor) -> Tensor {
    let k = (b.shape()[1] as f64).log(m.phys_dim() as f64).round() as usize;
    let dir = m.block(k.max(1));
    if dir.shape() != b.shape() {
        return b;
    }
    let nn = dir.inner(&dir).expect("same shape").re;
    if nn == 0.0 {
        return b;
    }
    let c = dir.inner(&b).expect("same shape") / nn;
    b.sub(&dir.scale(c)).expect("same shape")
}

/// `||b - proj_gauge(b) ... ||`: distance between `b1` and `b2` after both are
/// gauge-fixed.
pub fn gauge_distance(m: &UniformMps, b1: &Tensor, b2: &Tensor) -> Result<f64> {
    gauge_fix(m, b1.clone()).distance(&gauge_fix(m, b2.clone()))
}

/// Nullspace of `B -> A . B - B . A` for `B` on `w - 1` sites.
pub fn gauge_nullspace(m: &UniformMps, w: usize) -> Result<(usize, Vec<Tensor>)> {
    if w < 2 {
        return Err(Error::InvalidArgument("gauge nullspace needs w >= 2".into()));
    }
    let k = w - 1;
    let shape = [m.bond_dim(), m.phys_dim().pow(k as u32), m.bond_dim()];
    let basis = nullspace_basis(&telescopic_map(m, k), DEFAULT_RANK_TOL)
        .iter()
        .map(|v| Tensor::from_vector(&shape, v))
        .collect::<Result<Vec<_>>>()?;
    Ok((basis.len(), basis))
}

/// Output of [`solve_site_dependent`].
#[derive(Clone, Debug)]
pub struct ChainSolution {
    /// `B^[n]`, shaped like `A^[n]`.
    pub b: Vec<Tensor>,
    pub epsilon: C64,
    /// Normalized residual of each bond equation.
    pub residuals: Vec<f64>,
    pub gauge_dim: usize,
    pub solvable: bool,
}

impl ChainSolution {
    pub fn residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Bond `n` of a chain joins sites `n` and `n + 1` (periodically); the
/// equation is `(h^[n] - eps) A^[n] A^[n+1] = A^[n] B^[n+1] - B^[n] A^[n+1]`
/// with one `eps` shared by all bonds.
pub fn solve_site_dependent(chain: &SiteChain, terms: &[LocalOperator], opts: &SolveOptions) -> Result<ChainSolution> {
    let len = chain.len();
    if terms.len() != len {
        return Err(Error::InvalidArgument(format!(
            "{} bond terms for a unit cell of {len} sites",
            terms.len()
        )));
    }
    let dims = chain.phys_dims();
    for (n, t) in terms.iter().enumerate() {
        let want = dims[n] * dims[(n + 1) % len];
        if t.matrix.nrows() != want {
            return Err(Error::Shape(format!(
                "bond {n} term has size {}, expected {want}",
                t.matrix.nrows()
            )));
        }
    }
    let mut offsets = vec![0usize];
    for t in chain.tensors() {
        offsets.push(offsets.last().unwrap() + t.len());
    }
    let nb = offsets[len];

    let mut row_offsets = vec![0usize];
    let mut blocks = Vec::with_capacity(len);
    for n in 0..len {
        let blk = bond_block(chain.site(n), chain.site(n + 1))?;
        row_offsets.push(row_offsets.last().unwrap() + blk.len());
        blocks.push(blk);
    }
    let rows = row_offsets[len];
    let free_eps = opts.epsilon.is_none();
    let mut mat = Matrix::zeros(rows, nb + usize::from(free_eps));
    let mut y = Vector::zeros(rows);
    for n in 0..len {
        let (a_n, a_n1) = (chain.site(n), chain.site(n + 1));
        let (s_n, s_n1) = (a_n.shape(), a_n1.shape());
        let (dl, dm, dr) = (s_n[0], s_n[2], s_n1[2]);
        let (d0, d1) = (s_n[1], s_n1[1]);
        let r0 = row_offsets[n];
        let row = |al: usize, i: usize, j: usize, be: usize| r0 + ((al * d0 + i) * d1 + j) * dr + be;
        let c_next = offsets[(n + 1) % len];
        let c_this = offsets[n];
        for al in 0..dl {
            for i in 0..d0 {
                for ga in 0..dm {
                    for j in 0..d1 {
                        for be in 0..dr {
                            // A^[n][al, i, ga] B^[n+1][ga, j, be]
                            mat[(row(al, i, j, be), c_next + (ga * d1 + j) * dr + be)] += a_n.get(&[al, i, ga]);
                            // -B^[n][al, i, ga] A^[n+1][ga, j, be]
                            mat[(row(al, i, j, be), c_this + (al * d0 + i) * dm + ga)] -= a_n1.get(&[ga, j, be]);
                        }
                    }
                }
            }
        }
        let o_blk = terms[n].apply_to_block(&blocks[n])?;
        let target = match opts.epsilon {
            Some(eps) => o_blk.sub(&blocks[n].scale(eps))?,
            None => {
                for (p, v) in blocks[n].data().iter().enumerate() {
                    mat[(r0 + p, nb)] = *v;
                }
                o_blk
            }
        };
        y.rows_mut(r0, target.len()).copy_from(&target.to_vector());
    }
    let gauge_dim = nb - rank(&mat.columns(0, nb).into_owned(), opts.rank_tol);
    let sol = least_squares(&mat, &y, opts.rank_tol)?.solution;
    let epsilon = opts.epsilon.unwrap_or_else(|| sol[nb]);

    let mut b = Vec::with_capacity(len);
    for n in 0..len {
        let shape = chain.site(n).shape().to_vec();
        let v = sol.rows(offsets[n], offsets[n + 1] - offsets[n]).into_owned();
        b.push(Tensor::from_vector(&shape, &v)?);
    }
    let b = chain_gauge_fix(chain, b);

    let mut residuals = Vec::with_capacity(len);
    for n in 0..len {
        let o_blk = terms[n].apply_to_block(&blocks[n])?;
        let lhs = o_blk.sub(&blocks[n].scale(epsilon))?;
        let rhs = bond_rhs(chain.site(n), &b[(n + 1) % len], &b[n], chain.site(n + 1))?;
        residuals.push(lhs.distance(&rhs)? / (o_blk.norm() + 1.0));
    }
    let solvable = residuals.iter().all(|&r| r < opts.tol);
    Ok(ChainSolution {
        b,
        epsilon,
        residuals,
        gauge_dim,
        solvable,
    })
}

fn bond_block(left: &Tensor, right: &Tensor) -> Result<Tensor> {
    let (sl, sr) = (left.shape(), right.shape());
    left.contract(right, &[(2, 0)])?.reshape(&[sl[0], sl[1] * sr[1], sr[2]])
}

/// Projects out the joint gauge direction `(A^[0], A^[1], ...)`.
pub fn chain_gauge_fix(chain: &SiteChain, b: Vec<Tensor>) -> Vec<Tensor> {
    let dir = chain.tensors();
    let nn: f64 = dir.iter().map(|a| a.inner(a).unwrap().re).sum();
    let c: C64 = dir.iter().zip(&b).map(|(a, x)| a.inner(x).unwrap()).sum::<C64>() / nn;
    dir.iter().zip(b).map(|(a, x)| x.sub(&a.scale(c)).unwrap()).collect()
}

/// The boundary operator `T` with `<l|T|j> = sum_ab target[a, l, b] Ainv[a, j, b]`
/// where `target` is `B` extended by `A`'s up to the injectivity length `L`.
/// `T` acts on `max(L, w - 1)` sites and maps that many `A`'s onto `B`
/// followed by `A`'s.
pub fn boundary_operator(m: &UniformMps, b: &Tensor) -> Result<LocalOperator> {
    let (dd, d) = (m.bond_dim(), m.phys_dim());
    if b.rank() != 3 || b.shape()[0] != dd || b.shape()[2] != dd {
        return Err(Error::Shape(format!("B of shape {:?} does not match bond dimension {dd}", b.shape())));
    }
    let mut k = 0;
    let mut p = 1;
    while p < b.shape()[1] {
        p *= d;
        k += 1;
    }
    if p != b.shape()[1] || k == 0 {
        return Err(Error::Shape(format!(
            "B physical size {} is not a positive power of {d}",
            b.shape()[1]
        )));
    }
    let inj = m.injectivity_length(None);
    let len = inj.length.ok_or(Error::NotInjective {
        length: inj.ranks.len(),
        rank: inj.ranks.last().copied().unwrap_or(0),
        required: dd * dd,
    })?;
    let s = len.max(k);
    let target = if s > k {
        bond_block(b, &m.block(s - k))?
    } else {
        b.clone()
    };
    let inv = m.left_inverse(s)?;
    // (a, l, b) x (a, j, b) -> (l, j)
    let t = target.contract(&inv, &[(0, 0), (2, 2)])?;
    LocalOperator::new(s, d, t.to_matrix(1)?)
}
