//! Brute-force ground truth on small periodic rings: full state vectors,
//! extensive operators applied term by term, and operator constructions for
//! roundtrip tests.
//!
//! Sites are numbered `0..N`; basis states are row-major with site 0 the most
//! significant digit. Every dense object is bounded by [`state_cap`].

use crate::error::{Error, Result};
use crate::localsolve::{bond_rhs, boundary_operator, telescopic_rhs, LocalOperator};
use crate::mps::{vectorize_mpo, SiteChain, UniformMps};
use crate::tncore::{pseudo_inverse, rank};
use crate::{Matrix, Tensor, Vector, C64, DEFAULT_RANK_TOL};

/// Default bound on the number of entries of any dense state or operator.
pub const DEFAULT_MAX_STATE: usize = 1 << 24;

/// Entry cap, overridable through `EIGENLOCAL_MAX_STATE`.
pub fn state_cap() -> usize {
    std::env::var("EIGENLOCAL_MAX_STATE")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_STATE)
}

fn checked_size(dims: impl IntoIterator<Item = usize>) -> Result<usize> {
    let cap = state_cap();
    let mut size = 1usize;
    for d in dims {
        size = size.checked_mul(d).ok_or(Error::SizeCap { requested: usize::MAX, cap })?;
    }
    if size > cap {
        return Err(Error::SizeCap { requested: size, cap });
    }
    Ok(size)
}

/// Global eigenvalue check on a ring.
#[derive(Clone, Debug, PartialEq)]
pub struct RingReport {
    pub n: usize,
    pub state_norm: f64,
    /// `||(O_N - N eps) psi|| / ||psi||`.
    pub eigen_residual: f64,
    pub passed: bool,
}

/// `psi[i_1 .. i_N] = Tr(A^{i_1} ... A^{i_N})`.
pub fn mps_state(m: &UniformMps, n: usize) -> Result<Vector> {
    chain_state(&SiteChain::uniform(m, 1), n)
}

/// State of `n` sites built by repeating the unit cell; `n` must be a multiple
/// of the cell length so the ring closes.
pub fn chain_state(chain: &SiteChain, n: usize) -> Result<Vector> {
    if n == 0 || n % chain.len() != 0 {
        return Err(Error::InvalidArgument(format!(
            "ring of {n} sites does not tile a unit cell of {}",
            chain.len()
        )));
    }
    let dims: Vec<usize> = (0..n).map(|s| chain.site(s).shape()[1]).collect();
    let size = checked_size(dims.iter().copied())?;
    let d0 = chain.site(0).shape()[0];
    checked_size([size, d0, d0])?;

    // acc[a, p, g] for the prefix processed so far.
    let first = chain.site(0);
    let mut acc = first.data().to_vec();
    let mut prefix = dims[0];
    let mut right = first.shape()[2];
    for s in 1..n {
        let t = chain.site(s);
        let (d, r) = (dims[s], t.shape()[2]);
        let mut next = vec![C64::new(0.0, 0.0); d0 * prefix * d * r];
        for a in 0..d0 {
            for p in 0..prefix {
                let base = (a * prefix + p) * right;
                for g in 0..right {
                    let x = acc[base + g];
                    if x == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let trow = &t.data()[g * d * r..(g + 1) * d * r];
                    let out = &mut next[(a * prefix + p) * d * r..(a * prefix + p + 1) * d * r];
                    for (o, v) in out.iter_mut().zip(trow) {
                        *o += x * v;
                    }
                }
            }
        }
        acc = next;
        prefix *= d;
        right = r;
    }
    Ok(Vector::from_fn(prefix, |p, _| (0..d0).map(|a| acc[(a * prefix + p) * right + a]).sum()))
}

/// Applies `op` to the listed sites (in the order of its tensor factors) of a
/// state with per-site dimensions `dims`.
pub fn apply_on_sites(psi: &Vector, dims: &[usize], op: &Matrix, sites: &[usize]) -> Result<Vector> {
    let mut out = Vector::zeros(psi.len());
    apply_on_sites_into(psi, dims, op, sites, &mut out)?;
    Ok(out)
}

fn apply_on_sites_into(psi: &Vector, dims: &[usize], op: &Matrix, sites: &[usize], out: &mut Vector) -> Result<()> {
    let total: usize = dims.iter().product();
    if psi.len() != total {
        return Err(Error::Shape(format!("state of length {} for site dimensions {dims:?}", psi.len())));
    }
    let mut seen = vec![false; dims.len()];
    for &s in sites {
        if s >= dims.len() || seen[s] {
            return Err(Error::InvalidArgument(format!("bad site list {sites:?} for {} sites", dims.len())));
        }
        seen[s] = true;
    }
    let local: usize = sites.iter().map(|&s| dims[s]).product();
    if op.shape() != (local, local) {
        return Err(Error::Shape(format!(
            "operator of shape {:?} on sites of total dimension {local}",
            op.shape()
        )));
    }
    let strides = crate::tncore::row_major_strides(dims);
    // Offsets of every local configuration relative to a base index.
    let mut offsets = vec![0usize; local];
    for (l, off) in offsets.iter_mut().enumerate() {
        let mut rem = l;
        for &s in sites.iter().rev() {
            *off += (rem % dims[s]) * strides[s];
            rem /= dims[s];
        }
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|s| !seen[*s]).collect();
    let mut digits = vec![0usize; rest.len()];
    let mut x = vec![C64::new(0.0, 0.0); local];
    let mut base = 0usize;
    loop {
        for (xi, off) in x.iter_mut().zip(&offsets) {
            *xi = psi[base + off];
        }
        if x.iter().any(|v| *v != C64::new(0.0, 0.0)) {
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, xc) in x.iter().enumerate() {
                    acc += op[(r, c)] * xc;
                }
                out[base + off] += acc;
            }
        }
        // Odometer over the remaining sites.
        let mut k = rest.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            let s = rest[k];
            digits[k] += 1;
            base += strides[s];
            if digits[k] < dims[s] {
                break;
            }
            base -= digits[k] * strides[s];
            digits[k] = 0;
        }
    }
}

/// `sum_i O_i psi` on a uniform ring of `n` sites.
pub fn apply_extensive(psi: &Vector, o: &LocalOperator, n: usize) -> Result<Vector> {
    if n < o.width() {
        return Err(Error::InvalidArgument(format!(
            "ring of {n} sites is shorter than the operator width {}",
            o.width()
        )));
    }
    let dims = vec![o.phys(); n];
    let mut out = Vector::zeros(psi.len());
    for i in 0..n {
        let sites: Vec<usize> = (0..o.width()).map(|k| (i + k) % n).collect();
        apply_on_sites_into(psi, &dims, o.matrix(), &sites, &mut out)?;
    }
    Ok(out)
}

/// `sum_i h^[i mod len] psi` where `terms[b]` acts on sites `(i, i + 1)` and
/// `dims` repeats with the term period.
pub fn apply_bond_terms(psi: &Vector, dims: &[usize], terms: &[Matrix]) -> Result<Vector> {
    let n = dims.len();
    let mut out = Vector::zeros(psi.len());
    for i in 0..n {
        apply_on_sites_into(psi, dims, &terms[i % terms.len()], &[i, (i + 1) % n], &mut out)?;
    }
    Ok(out)
}

/// Dense `O_N = sum_i O_i` with wraparound terms.
pub fn extensive_operator(o: &LocalOperator, n: usize) -> Result<Matrix> {
    let dim = checked_size(vec![o.phys(); n])?;
    checked_size([dim, dim])?;
    let mut out = Matrix::zeros(dim, dim);
    for j in 0..dim {
        let mut e = Vector::zeros(dim);
        e[j] = C64::new(1.0, 0.0);
        out.set_column(j, &apply_extensive(&e, o, n)?);
    }
    Ok(out)
}

fn report(n: usize, psi: &Vector, image: Vector, energy: C64, tol: f64) -> Result<RingReport> {
    let state_norm = psi.norm();
    if state_norm == 0.0 {
        return Err(Error::InvalidArgument(format!("the state on {n} sites vanishes")));
    }
    let eigen_residual = (image - psi * energy).norm() / state_norm;
    Ok(RingReport {
        n,
        state_norm,
        eigen_residual,
        passed: eigen_residual < tol,
    })
}

/// Checks `O_N psi = N eps psi` on a ring of `n` sites.
pub fn eigencheck(m: &UniformMps, o: &LocalOperator, eps: C64, n: usize, tol: f64) -> Result<RingReport> {
    if o.phys() != m.phys_dim() {
        return Err(Error::Shape("operator and MPS physical dimensions differ".into()));
    }
    let psi = mps_state(m, n)?;
    let image = apply_extensive(&psi, o, n)?;
    report(n, &psi, image, eps * n as f64, tol)
}

/// As [`eigencheck`] for a site-dependent chain with one two-site term per
/// bond of the unit cell.
pub fn chain_eigencheck(chain: &SiteChain, terms: &[LocalOperator], eps: C64, n: usize, tol: f64) -> Result<RingReport> {
    if terms.len() != chain.len() {
        return Err(Error::InvalidArgument("one term per bond of the unit cell".into()));
    }
    let psi = chain_state(chain, n)?;
    let dims: Vec<usize> = (0..n).map(|s| chain.site(s).shape()[1]).collect();
    let mats: Vec<Matrix> = terms.iter().map(|t| t.matrix().clone()).collect();
    let image = apply_bond_terms(&psi, &dims, &mats)?;
    report(n, &psi, image, eps * n as f64, tol)
}

/// Upper bound on `||(O_N - N eps) psi||` (not normalized by `||psi||`) given
/// the normalized local residual `delta` of a telescopic solution:
/// `N * delta * (||O A^(w)|| + 1) * ||block(N - w)||`.
pub fn sufficiency_bound(m: &UniformMps, o: &LocalOperator, delta: f64, n: usize) -> Result<f64> {
    let scale = o.apply_to_block(&m.block(o.width()))?.norm() + 1.0;
    let rest = if n > o.width() {
        checked_size(vec![m.phys_dim(); n - o.width()])?;
        m.block(n - o.width()).norm()
    } else {
        (m.bond_dim() as f64).sqrt()
    };
    Ok(n as f64 * delta * scale * rest)
}

/// Two-site operator with `(O - eps) A A = rhs` for a given `(D, d d', D')`
/// right-hand side: `O = eps Id + R V^+` with `V` the matrix of the block
/// `left . right`. Requires the block to be injective.
pub fn construct_bond_operator(left: &Tensor, right: &Tensor, rhs: &Tensor, eps: C64) -> Result<Matrix> {
    let (sl, sr) = (left.shape(), right.shape());
    let (dl, p, dr) = (sl[0], sl[1] * sr[1], sr[2]);
    if rhs.shape() != [dl, p, dr] {
        return Err(Error::Shape(format!("right-hand side shape {:?}, expected {:?}", rhs.shape(), [dl, p, dr])));
    }
    let blk = left.contract(right, &[(2, 0)])?.reshape(&[dl, p, dr])?;
    let as_matrix = |t: &Tensor| t.permute(&[1, 0, 2]).and_then(|t| t.to_matrix(1));
    let v = as_matrix(&blk)?;
    let r = rank(&v, DEFAULT_RANK_TOL);
    if r < dl * dr {
        return Err(Error::NotInjective {
            length: 2,
            rank: r,
            required: dl * dr,
        });
    }
    let vinv = pseudo_inverse(&v, DEFAULT_RANK_TOL)?;
    Ok(Matrix::identity(p, p) * eps + as_matrix(rhs)? * vinv)
}

/// Operator on two sites realizing a prescribed `(A, B, eps)`; needs
/// injectivity length one.
pub fn construct_operator(m: &UniformMps, b: &Tensor, eps: C64) -> Result<LocalOperator> {
    let inj = m.injectivity_length(Some(1));
    if !inj.injective {
        return Err(Error::Unsupported(format!(
            "operator construction needs injectivity length 1 (rank {} < {})",
            inj.ranks[0],
            m.bond_dim().pow(2)
        )));
    }
    if b.shape() != m.tensor().shape() {
        return Err(Error::Shape(format!("B of shape {:?} must match A", b.shape())));
    }
    let rhs = telescopic_rhs(m, b)?;
    LocalOperator::new(2, m.phys_dim(), construct_bond_operator(m.tensor(), m.tensor(), &rhs, eps)?)
}

/// Bond terms realizing prescribed `B^[n]` and a shared `eps` on a chain.
pub fn construct_chain_operators(chain: &SiteChain, b: &[Tensor], eps: C64) -> Result<Vec<LocalOperator>> {
    let len = chain.len();
    if b.len() != len {
        return Err(Error::InvalidArgument("one B per site of the unit cell".into()));
    }
    (0..len)
        .map(|n| {
            let (a0, a1) = (chain.site(n), chain.site(n + 1));
            let rhs = bond_rhs(a0, &b[(n + 1) % len], &b[n], a1)?;
            let mat = construct_bond_operator(a0, a1, &rhs, eps)?;
            // Width-2 operator with a common site dimension only if both agree.
            if a0.shape()[1] == a1.shape()[1] {
                LocalOperator::new(2, a0.shape()[1], mat)
            } else {
                Err(Error::Unsupported("bond terms between sites of different dimension".into()))
            }
        })
        .collect()
}

/// `||(sum_{i<|L|} O_i - eps |L|) psi - (T_{|L|} - T_0) psi|| / ||psi||`, the
/// boundary-operator form of the identity on a region of `region` sites
/// starting at site 0.
pub fn boundary_identity_check(
    m: &UniformMps,
    b: &Tensor,
    o: &LocalOperator,
    eps: C64,
    n: usize,
    region: usize,
) -> Result<f64> {
    let t = boundary_operator(m, b)?;
    if region == 0 || region > n || n < o.width() || n < t.width() {
        return Err(Error::InvalidArgument(format!(
            "region of {region} sites does not fit a ring of {n} (operator width {}, boundary width {})",
            o.width(),
            t.width()
        )));
    }
    let psi = mps_state(m, n)?;
    let dims = vec![m.phys_dim(); n];
    let mut lhs = &psi * (-eps * region as f64);
    for i in 0..region {
        let sites: Vec<usize> = (0..o.width()).map(|k| (i + k) % n).collect();
        apply_on_sites_into(&psi, &dims, o.matrix(), &sites, &mut lhs)?;
    }
    let at = |start: usize| -> Vec<usize> { (0..t.width()).map(|k| (start + k) % n).collect() };
    let rhs = apply_on_sites(&psi, &dims, t.matrix(), &at(region % n))? - apply_on_sites(&psi, &dims, t.matrix(), &at(0))?;
    Ok((lhs - rhs).norm() / psi.norm())
}

/// Dense operator of the uniform MPO with tensor `(D, d_out, d_in, D)` on a
/// ring of `n` sites.
pub fn dense_mpo(t: &Tensor, n: usize) -> Result<Matrix> {
    let s = t.shape();
    if s.len() != 4 {
        return Err(Error::Shape(format!("MPO tensor must have rank 4, got {s:?}")));
    }
    let (d_out, d_in) = (s[1], s[2]);
    let rows = checked_size(vec![d_out; n])?;
    let cols = checked_size(vec![d_in; n])?;
    checked_size([rows, cols])?;
    let v = mps_state(&vectorize_mpo(t)?, n)?;
    // v is indexed by (o_1 i_1)(o_2 i_2)...; regroup to (o_1 .. o_N)(i_1 .. i_N).
    let mut shape = Vec::with_capacity(2 * n);
    for _ in 0..n {
        shape.push(d_out);
        shape.push(d_in);
    }
    let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
    let regrouped = Tensor::from_vector(&shape, &v)?.permute(&perm)?;
    regrouped.to_matrix(n)
}

/// `||[H, O]|| / ||O||`.
pub fn commutator_norm(h: &Matrix, o: &Matrix) -> f64 {
    let on = o.norm();
    if on == 0.0 {
        return 0.0;
    }
    (h * o - o * h).norm() / on
}

/// `||[H_N, O_N]||_F / ||O_N||_F` for the extensive `h` and the uniform MPO `t`.
pub fn commutator_check(h: &LocalOperator, t: &Tensor, n: usize) -> Result<f64> {
    let hn = extensive_operator(h, n)?;
    let on = dense_mpo(t, n)?;
    if hn.shape() != on.shape() {
        return Err(Error::Shape("MPO and Hamiltonian act on different spaces".into()));
    }
    Ok(commutator_norm(&hn, &on))
}
