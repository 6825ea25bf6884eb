//! Hexagonal lattice with a two-site unit cell `(A1, A2)`.
//!
//! Tensors are `(leg 1, leg 2, leg 3, physical)`. The legs of `A1` point at
//! 0, 120 and 240 degrees and those of `A2` at 180, 300 and 60 degrees, so a
//! bond of orientation `k` joins leg `k` of an `A1` with leg `k` of an `A2`.
//! The sufficient condition asks, for every orientation `k`,
//!
//! ```text
//! h . pair_k(A1, A2) = r_k pair_k(A1, R) + b_k pair_k(B, A2)
//! ```
//!
//! with `r_1 + r_2 + r_3 = 0 = b_1 + b_2 + b_3`: around each `A2` site the
//! three `R` insertions cancel, and likewise the `B` insertions around each
//! `A1`. The energy offset is absorbed into `h`, i.e. `h = O - eps` per bond.

use super::PepsTensor;
use crate::error::{Error, Result};
use crate::localsolve::LocalOperator;
use crate::oracle::{apply_on_sites, RingReport};
use crate::tncore::{contract_all, Labeled};
use crate::{Tensor, Vector, C64};

/// Residuals of the hexagonal sufficient condition.
#[derive(Clone, Debug, PartialEq)]
pub struct HexReport {
    /// Frobenius norm of each bond identity, orientations 1..3.
    pub identities: [f64; 3],
    /// `|r_1 + r_2 + r_3|`.
    pub r_sum: f64,
    /// `|b_1 + b_2 + b_3|`.
    pub b_sum: f64,
}

impl HexReport {
    pub fn max_residual(&self) -> f64 {
        self.identities.iter().copied().fold(self.r_sum.max(self.b_sum), f64::max)
    }

    pub fn certified(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

fn hex_tensor(t: &PepsTensor, name: &str) -> Result<()> {
    if t.tensor().rank() != 4 {
        return Err(Error::Shape(format!("{name} must be a hexagonal tensor of rank 4")));
    }
    Ok(())
}

/// `t1` and `t2` joined along their leg `k` (0-based). Legs: the two other
/// legs of `t1`, the two other legs of `t2`, then the fused physical pair.
pub fn hex_pair(t1: &Tensor, t2: &Tensor, k: usize) -> Result<Tensor> {
    if t1.rank() != 4 || t2.rank() != 4 || k > 2 {
        return Err(Error::Shape("hexagonal pairs join rank-4 tensors along leg 0, 1 or 2".into()));
    }
    let mut la = vec!["a0", "a1", "a2", "pa"];
    let mut lb = vec!["b0", "b1", "b2", "pb"];
    la[k] = "bond";
    lb[k] = "bond";
    let joined = Labeled::new(t1.clone(), la.clone())?.contract(&Labeled::new(t2.clone(), lb.clone())?)?;
    let order: Vec<&str> = la[..3]
        .iter()
        .chain(&lb[..3])
        .copied()
        .filter(|l| *l != "bond")
        .chain(["pa", "pb"])
        .collect();
    let t = joined.into_order(&order)?;
    let s = t.shape().to_vec();
    t.reshape(&[s[0], s[1], s[2], s[3], s[4] * s[5]])
}

/// Checks the three bond identities and the two sum constraints.
pub fn hex_sufficient_check(
    a1: &PepsTensor,
    a2: &PepsTensor,
    h: &LocalOperator,
    r_tensor: &PepsTensor,
    b_tensor: &PepsTensor,
    r: [C64; 3],
    b: [C64; 3],
) -> Result<HexReport> {
    for (t, name) in [(a1, "A1"), (a2, "A2"), (r_tensor, "R"), (b_tensor, "B")] {
        hex_tensor(t, name)?;
    }
    if r_tensor.tensor().shape() != a2.tensor().shape() || b_tensor.tensor().shape() != a1.tensor().shape() {
        return Err(Error::Shape("R must be shaped like A2 and B like A1".into()));
    }
    if h.width() != 2 || h.phys() != a1.phys_dim() || a1.phys_dim() != a2.phys_dim() {
        return Err(Error::Shape("h must act on two sites of the PEPS physical dimension".into()));
    }
    let mut identities = [0.0; 3];
    for k in 0..3 {
        let pair = hex_pair(a1.tensor(), a2.tensor(), k)?;
        let lhs = apply_last(h, &pair)?;
        let rhs = hex_pair(a1.tensor(), r_tensor.tensor(), k)?
            .scale(r[k])
            .add(&hex_pair(b_tensor.tensor(), a2.tensor(), k)?.scale(b[k]))?;
        identities[k] = lhs.distance(&rhs)?;
    }
    Ok(HexReport {
        identities,
        r_sum: r.iter().sum::<C64>().norm(),
        b_sum: b.iter().sum::<C64>().norm(),
    })
}

fn apply_last(h: &LocalOperator, t: &Tensor) -> Result<Tensor> {
    let s = t.shape().to_vec();
    let p = *s.last().unwrap();
    let rows = t.len() / p;
    let m = t.reshape(&[rows, p])?.to_matrix(1)? * h.matrix().transpose();
    Tensor::from_matrix(&m).reshape(&s)
}

/// Dense state on `lx x ly` unit cells; `A1(x, y)` is site `2 (y lx + x)` and
/// `A2(x, y)` the next one. `A1(x, y)` bonds to `A2(x, y)` (orientation 1),
/// `A2(x - 1, y)` (2) and `A2(x, y - 1)` (3).
pub fn hex_torus_state(a1: &PepsTensor, a2: &PepsTensor, lx: usize, ly: usize) -> Result<Vector> {
    hex_tensor(a1, "A1")?;
    hex_tensor(a2, "A2")?;
    if lx < 2 || ly < 2 {
        return Err(Error::InvalidArgument("the hexagonal torus needs at least 2x2 cells".into()));
    }
    if a1.tensor().shape()[..3] != a2.tensor().shape()[..3] {
        return Err(Error::Shape("A1 and A2 bond dimensions differ".into()));
    }
    let cap = crate::oracle::state_cap();
    let size = (a1.phys_dim() as f64 * a2.phys_dim() as f64).powi((lx * ly) as i32);
    if size > cap as f64 {
        return Err(Error::SizeCap {
            requested: size.min(usize::MAX as f64) as usize,
            cap,
        });
    }
    let mut parts = Vec::new();
    let mut order = Vec::new();
    for y in 0..ly {
        for x in 0..lx {
            parts.push(Labeled::new(
                a1.tensor().clone(),
                [format!("b0_{x}_{y}"), format!("b1_{x}_{y}"), format!("b2_{x}_{y}"), format!("p1_{x}_{y}")],
            )?);
            parts.push(Labeled::new(
                a2.tensor().clone(),
                [
                    format!("b0_{x}_{y}"),
                    format!("b1_{}_{y}", (x + 1) % lx),
                    format!("b2_{x}_{}", (y + 1) % ly),
                    format!("p2_{x}_{y}"),
                ],
            )?);
            order.push(format!("p1_{x}_{y}"));
            order.push(format!("p2_{x}_{y}"));
        }
    }
    Ok(contract_all(&parts)?.into_order(&order)?.to_vector())
}

/// Global check of `sum_bonds h psi = (#bonds) eps psi` on `lx x ly` cells.
pub fn hex_torus_eigencheck(
    a1: &PepsTensor,
    a2: &PepsTensor,
    h: &LocalOperator,
    eps: C64,
    lx: usize,
    ly: usize,
    tol: f64,
) -> Result<RingReport> {
    if h.width() != 2 || h.phys() != a1.phys_dim() || a1.phys_dim() != a2.phys_dim() {
        return Err(Error::Shape("h must act on two sites of the PEPS physical dimension".into()));
    }
    let psi = hex_torus_state(a1, a2, lx, ly)?;
    let sites = 2 * lx * ly;
    let dims = vec![a1.phys_dim(); sites];
    let first = |x: usize, y: usize| 2 * (y * lx + x);
    let second = |x: usize, y: usize| 2 * (y * lx + x) + 1;
    let mut image = Vector::zeros(psi.len());
    let mut bonds = 0;
    for y in 0..ly {
        for x in 0..lx {
            for partner in [second(x, y), second((x + lx - 1) % lx, y), second(x, (y + ly - 1) % ly)] {
                image += apply_on_sites(&psi, &dims, h.matrix(), &[first(x, y), partner])?;
                bonds += 1;
            }
        }
    }
    let state_norm = psi.norm();
    if state_norm == 0.0 {
        return Err(Error::InvalidArgument("the hexagonal torus state vanishes".into()));
    }
    let eigen_residual = (image - &psi * (eps * bonds as f64)).norm() / state_norm;
    Ok(RingReport {
        n: sites,
        state_norm,
        eigen_residual,
        passed: eigen_residual < tol,
    })
}
