//! The XXZ chain and its quantum-group MPO symmetries.
//!
//! A `d = 2` MPO tensor is written in blocks,
//! `|0><0| (x) a + |0><1| (x) b + |1><0| (x) c + |1><1| (x) d`.
//! Its symmetry condition against `h = XX + YY + Delta ZZ` splits into 16
//! matrix equations, one per pair of blocks on two neighbouring sites.

use crate::error::{Error, Result};
use crate::localsolve::LocalOperator;
use crate::{Matrix, Tensor, C64};

/// The four virtual blocks of a qubit MPO tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMpo {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
}

impl BlockMpo {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<Self> {
        let n = a.nrows();
        if [&a, &b, &c, &d].iter().any(|m| m.shape() != (n, n)) {
            return Err(Error::Shape("all four blocks must be n x n with a common n".into()));
        }
        Ok(Self { a, b, c, d })
    }

    /// `a = d = Id_n`, `b = c = 0`.
    pub fn identity(n: usize) -> Self {
        Self {
            a: Matrix::identity(n, n),
            b: Matrix::zeros(n, n),
            c: Matrix::zeros(n, n),
            d: Matrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        let z = Matrix::zeros(n, n);
        Self {
            a: z.clone(),
            b: z.clone(),
            c: z.clone(),
            d: z,
        }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Block for `|out><in|`.
    pub fn block(&self, out: usize, inp: usize) -> &Matrix {
        match (out, inp) {
            (0, 0) => &self.a,
            (0, 1) => &self.b,
            (1, 0) => &self.c,
            _ => &self.d,
        }
    }

    /// MPO tensor `(n, out, in, n)`.
    pub fn to_tensor(&self) -> Tensor {
        let n = self.dim();
        Tensor::from_fn(&[n, 2, 2, n], |i| self.block(i[1], i[2])[(i[0], i[3])])
    }

    pub fn from_tensor(t: &Tensor) -> Result<Self> {
        let s = t.shape();
        if s.len() != 4 || s[1] != 2 || s[2] != 2 || s[0] != s[3] {
            return Err(Error::Shape(format!("expected an (n, 2, 2, n) MPO tensor, got {s:?}")));
        }
        let n = s[0];
        let blk = |o: usize, i: usize| Matrix::from_fn(n, n, |x, y| t.get(&[x, o, i, y]));
        Self::new(blk(0, 0), blk(0, 1), blk(1, 0), blk(1, 1))
    }
}

/// `XX + YY + Delta ZZ` in the basis `|00>, |01>, |10>, |11>`.
pub fn xxz_hamiltonian(delta: C64) -> LocalOperator {
    let z = C64::new(0.0, 0.0);
    let two = C64::new(2.0, 0.0);
    #[rustfmt::skip]
    let h = Matrix::from_row_slice(4, 4, &[
        delta, z, z, z,
        z, -delta, two, z,
        z, two, -delta, z,
        z, z, z, delta,
    ]);
    LocalOperator::new(2, 2, h).expect("4x4")
}

/// `q` with `q + 1/q = 2 Delta` (the root with `|q| >= 1`, ties broken
/// towards `Im q >= 0`) and `lambda = q - 1/q`.
pub fn qdeform_params(delta: C64) -> (C64, C64) {
    let root = (delta * delta - 1.0).sqrt();
    let (q1, q2) = (delta + root, delta - root);
    let q = if (q1.norm() - q2.norm()).abs() > 1e-12 * q1.norm().max(q2.norm()) {
        if q1.norm() > q2.norm() { q1 } else { q2 }
    } else if q1.im >= q2.im {
        q1
    } else {
        q2
    };
    (q, q - q.inv())
}

#[derive(Clone, Copy)]
enum Blk {
    A,
    B,
    C,
    D,
}

#[derive(Clone, Copy)]
enum Coef {
    Two,
    TwoDelta,
}

use Blk::{A, B, C, D};
use Coef::{Two, TwoDelta};

/// One component equation: `sum_k sign_k coef_k X_k Y_k = X Yt - Xt Y`.
struct Component {
    lhs: &'static [(f64, Coef, Blk, Blk)],
    pair: (Blk, Blk),
}

/// The 16 component equations, in alphabetical order of the block pair.
const COMPONENTS: [Component; 16] = [
    Component { lhs: &[], pair: (A, A) },
    Component { lhs: &[(1.0, TwoDelta, A, B), (-1.0, Two, B, A)], pair: (A, B) },
    Component { lhs: &[(1.0, TwoDelta, B, A), (-1.0, Two, A, B)], pair: (B, A) },
    Component { lhs: &[], pair: (B, B) },
    Component { lhs: &[(1.0, Two, C, A), (-1.0, TwoDelta, A, C)], pair: (A, C) },
    Component { lhs: &[(1.0, Two, C, B), (-1.0, Two, B, C)], pair: (A, D) },
    Component { lhs: &[(1.0, Two, D, A), (-1.0, Two, A, D)], pair: (B, C) },
    Component { lhs: &[(1.0, Two, D, B), (-1.0, TwoDelta, B, D)], pair: (B, D) },
    Component { lhs: &[(1.0, Two, A, C), (-1.0, TwoDelta, C, A)], pair: (C, A) },
    Component { lhs: &[(1.0, Two, A, D), (-1.0, Two, D, A)], pair: (C, B) },
    Component { lhs: &[(1.0, Two, B, C), (-1.0, Two, C, B)], pair: (D, A) },
    Component { lhs: &[(1.0, Two, B, D), (-1.0, TwoDelta, D, B)], pair: (D, B) },
    Component { lhs: &[], pair: (C, C) },
    Component { lhs: &[(1.0, TwoDelta, C, D), (-1.0, Two, D, C)], pair: (C, D) },
    Component { lhs: &[(1.0, TwoDelta, D, C), (-1.0, Two, C, D)], pair: (D, C) },
    Component { lhs: &[], pair: (D, D) },
];

fn pick(t: &BlockMpo, b: Blk) -> &Matrix {
    match b {
        A => &t.a,
        B => &t.b,
        C => &t.c,
        D => &t.d,
    }
}

/// Frobenius norms of the 16 component equations of the symmetry condition
/// for the MPO `t` with boundary tensor `bt`.
pub fn xxz_component_residuals(t: &BlockMpo, bt: &BlockMpo, delta: C64) -> Result<[f64; 16]> {
    if t.dim() != bt.dim() {
        return Err(Error::Shape(format!(
            "MPO blocks are {0}x{0} but boundary blocks are {1}x{1}",
            t.dim(),
            bt.dim()
        )));
    }
    let mut out = [0.0; 16];
    for (k, comp) in COMPONENTS.iter().enumerate() {
        let n = t.dim();
        let mut lhs = Matrix::zeros(n, n);
        for &(sign, coef, x, y) in comp.lhs {
            let c = match coef {
                Two => C64::new(2.0 * sign, 0.0),
                TwoDelta => delta * 2.0 * sign,
            };
            lhs += pick(t, x) * pick(t, y) * c;
        }
        let (x, y) = comp.pair;
        let rhs = pick(t, x) * pick(bt, y) - pick(bt, x) * pick(t, y);
        out[k] = (lhs - rhs).norm();
    }
    Ok(out)
}

/// Residuals of `ab = q^-1 ba`, `ac = q^-1 ca`, `bd = q^-1 db`,
/// `cd = q^-1 dc`, `bc = cb` and `ad - da = (q - q^-1) bc`.
pub fn quantum_plane_check(t: &BlockMpo, q: C64) -> [f64; 6] {
    let qi = q.inv();
    let (a, b, c, d) = (&t.a, &t.b, &t.c, &t.d);
    [
        (a * b - b * a * qi).norm(),
        (a * c - c * a * qi).norm(),
        (b * d - d * b * qi).norm(),
        (c * d - d * c * qi).norm(),
        (b * c - c * b).norm(),
        (a * d - d * a - b * c * (q - qi)).norm(),
    ]
}

/// Clock-and-shift solution on `n` virtual levels: `a = diag(q^k)`,
/// `d = a^-1`, `b` the upper shift, `c = 0`, together with the boundary
/// blocks `at = dt = 0`, `bt = mu b`, `ct = -mu c` where `mu = q^-1 - q`.
pub fn build_xxz_mpo_solution(n: usize, q: C64) -> Result<(BlockMpo, BlockMpo)> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two virtual levels".into()));
    }
    if q.norm() == 0.0 {
        return Err(Error::InvalidArgument("q must be nonzero".into()));
    }
    let a = Matrix::from_fn(n, n, |i, j| if i == j { q.powu(i as u32) } else { C64::new(0.0, 0.0) });
    let d = Matrix::from_fn(n, n, |i, j| if i == j { q.inv().powu(i as u32) } else { C64::new(0.0, 0.0) });
    let b = Matrix::from_fn(n, n, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let c = Matrix::zeros(n, n);
    let mu = q.inv() - q;
    let bt = BlockMpo::new(Matrix::zeros(n, n), &b * mu, &c * (-mu), Matrix::zeros(n, n))?;
    Ok((BlockMpo::new(a, b, c, d)?, bt))
}
