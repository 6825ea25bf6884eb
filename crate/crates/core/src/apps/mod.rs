//! Applications of the telescopic identity: MPO symmetries, weak and strong
//! symmetries of density matrices, Lindblad steady states, zero-sum
//! operators and exact MPS time evolution.
//!
//! Operators are vectorized row-major, `vec(X rho Y) = (X (x) Y^T) vec(rho)`,
//! and the `(out, in)` indices of each site are fused out-major into one
//! physical index of dimension `d^2` (the convention of
//! [`vectorize_mpo`](crate::mps::vectorize_mpo)).

mod xxz;

pub use xxz::{build_xxz_mpo_solution, qdeform_params, quantum_plane_check, xxz_component_residuals, xxz_hamiltonian, BlockMpo};

use crate::error::{Error, Result};
use crate::localsolve::{solve, LocalOperator, SolveOptions, TelescopicSolution};
use crate::mps::{vectorize_mpo, UniformMps};
use crate::oracle::{apply_extensive, mps_state};
use crate::{Matrix, Tensor, C64};

/// The superoperator `rho -> x rho y` on `width` sites of dimension `phys`,
/// acting on per-site fused `(out, in)` indices.
pub fn superoperator(x: &Matrix, y: &Matrix, width: usize, phys: usize) -> Result<LocalOperator> {
    let n = phys.pow(width as u32);
    if x.shape() != (n, n) || y.shape() != (n, n) {
        return Err(Error::Shape(format!("superoperator factors must be {n}x{n}")));
    }
    // Row-major vec(rho) is indexed (o_1..o_w, i_1..i_w); per-site fusing
    // wants (o_1 i_1, ..., o_w i_w).
    let flat = x.kronecker(&y.transpose());
    let fused = |idx: usize| {
        let (outs, ins) = (idx / n, idx % n);
        let mut f = 0;
        for s in 0..width {
            let shift = phys.pow((width - 1 - s) as u32);
            let (o, i) = ((outs / shift) % phys, (ins / shift) % phys);
            f = f * phys * phys + o * phys + i;
        }
        f
    };
    let map: Vec<usize> = (0..n * n).map(fused).collect();
    let mut out = Matrix::zeros(n * n, n * n);
    for r in 0..n * n {
        for c in 0..n * n {
            out[(map[r], map[c])] = flat[(r, c)];
        }
    }
    LocalOperator::new(width, phys * phys, out)
}

/// `rho -> h rho - rho h`, i.e. `h (x) Id - Id (x) h^T`.
pub fn commutator_superoperator(h: &LocalOperator) -> LocalOperator {
    let id = Matrix::identity(h.matrix().nrows(), h.matrix().nrows());
    let l = superoperator(h.matrix(), &id, h.width(), h.phys()).expect("square");
    let r = superoperator(&id, h.matrix(), h.width(), h.phys()).expect("square");
    LocalOperator::new(h.width(), l.phys(), l.matrix() - r.matrix()).expect("same shape")
}

/// Generator of the weak symmetry `[G, rho] = 0` summed over the chain.
pub fn weak_symmetry_operator(g: &LocalOperator) -> LocalOperator {
    commutator_superoperator(g)
}

/// Generator of the strong symmetry `G rho = 0` summed over the chain.
pub fn strong_symmetry_operator(g: &LocalOperator) -> LocalOperator {
    let id = Matrix::identity(g.matrix().nrows(), g.matrix().nrows());
    superoperator(g.matrix(), &id, g.width(), g.phys()).expect("square")
}

/// `-i [h, rho] + sum_k (L_k rho L_k^dag - {L_k^dag L_k, rho} / 2)`; every
/// jump operator must have the width of `h`.
pub fn lindblad_superoperator(h: &LocalOperator, jumps: &[LocalOperator]) -> Result<LocalOperator> {
    let (w, d) = (h.width(), h.phys());
    let n = h.matrix().nrows();
    let id = Matrix::identity(n, n);
    let mut total = commutator_superoperator(h).into_matrix() * C64::new(0.0, -1.0);
    for l in jumps {
        if l.width() != w || l.phys() != d {
            return Err(Error::Shape("jump operators must act on the same sites as h".into()));
        }
        let lm = l.matrix();
        let ldl = lm.adjoint() * lm;
        total += superoperator(lm, &lm.adjoint(), w, d)?.into_matrix();
        total -= superoperator(&ldl, &id, w, d)?.into_matrix() * C64::new(0.5, 0.0);
        total -= superoperator(&id, &ldl, w, d)?.into_matrix() * C64::new(0.5, 0.0);
    }
    LocalOperator::new(w, d * d, total)
}

fn pinned_zero(opts: &SolveOptions) -> SolveOptions {
    SolveOptions {
        epsilon: Some(C64::new(0.0, 0.0)),
        ..*opts
    }
}

/// Solves `sum_i (h_i (x) Id - Id (x) h_i^T) |O>> = 0` locally for the MPO
/// tensor `t` of shape `(D, d, d, D)`.
pub fn mpo_symmetry_solve(t: &Tensor, h: &LocalOperator, opts: &SolveOptions) -> Result<TelescopicSolution> {
    let m = vectorize_mpo(t)?;
    check_doubled(&m, h.phys())?;
    solve(&m, &commutator_superoperator(h), &pinned_zero(opts))
}

/// Solves `sum_i L_i (rho) = 0` locally for the MPDO tensor `t`; `lsuper`
/// acts on fused `(out, in)` site indices.
pub fn lindblad_steady_solve(lsuper: &LocalOperator, t: &Tensor, opts: &SolveOptions) -> Result<TelescopicSolution> {
    let m = vectorize_mpo(t)?;
    if lsuper.phys() != m.phys_dim() {
        return Err(Error::Shape(format!(
            "superoperator site dimension {} differs from the MPDO's {}",
            lsuper.phys(),
            m.phys_dim()
        )));
    }
    solve(&m, lsuper, &pinned_zero(opts))
}

/// Local solve of a doubled-space generator (weak/strong symmetry) against
/// an MPDO tensor.
pub fn symmetry_solve(generator: &LocalOperator, rho: &Tensor, opts: &SolveOptions) -> Result<TelescopicSolution> {
    lindblad_steady_solve(generator, rho, opts)
}

fn check_doubled(m: &UniformMps, d: usize) -> Result<()> {
    if m.phys_dim() != d * d {
        return Err(Error::Shape(format!(
            "MPO with fused physical dimension {} does not match operator dimension {d}",
            m.phys_dim()
        )));
    }
    Ok(())
}

/// `O = Q (x) Id - Id (x) Q` decomposition of a two-site operator.
#[derive(Clone, Debug)]
pub struct ZeroSum {
    /// Trace-free representative of `Q`.
    pub q: Matrix,
    pub residual: f64,
    pub solvable: bool,
}

/// Finds `Q` with `O = Q (x) Id - Id (x) Q`, which certifies `sum_i O_i = 0`
/// on every ring. Solved as the telescopic identity of `rho -> O rho` on the
/// identity MPO.
pub fn zero_sum_decompose(o: &LocalOperator, opts: &SolveOptions) -> Result<ZeroSum> {
    if o.width() != 2 {
        return Err(Error::InvalidArgument("zero-sum decomposition needs a two-site operator".into()));
    }
    let d = o.phys();
    let id_mpo = Tensor::eye(d).reshape(&[1, d, d, 1])?;
    let m = vectorize_mpo(&id_mpo)?;
    let left = superoperator(o.matrix(), &Matrix::identity(d * d, d * d), 2, d)?;
    let sol = solve(&m, &left, &pinned_zero(opts))?;
    let q = sol.b.reshape(&[d, d])?.to_matrix(1)? * C64::new(-1.0, 0.0);
    Ok(ZeroSum {
        q,
        residual: sol.residual,
        solvable: sol.solvable,
    })
}

/// `O_deriv[i, j] = sum_ab dA[a, i, b] Ainv[a, j, b]`, so that
/// `O_deriv . A = dA` on the physical leg.
pub fn derivative_operator(m: &UniformMps, da: &Tensor) -> Result<Matrix> {
    if da.shape() != m.tensor().shape() {
        return Err(Error::Shape(format!("dA of shape {:?} must match A", da.shape())));
    }
    let inv = m.left_inverse(1)?;
    da.contract(&inv, &[(0, 0), (2, 2)])?.to_matrix(1)
}

/// Local check of `(H - i sum_j O_j) psi = 0` for the trajectory
/// `d/dt A = dA` under `H = sum_i h_i`.
pub fn schrodinger_residual(m: &UniformMps, da: &Tensor, h: &LocalOperator, opts: &SolveOptions) -> Result<TelescopicSolution> {
    if h.phys() != m.phys_dim() {
        return Err(Error::Shape("Hamiltonian and MPS physical dimensions differ".into()));
    }
    let w = h.width().max(2);
    let od = LocalOperator::new(1, m.phys_dim(), derivative_operator(m, da)?)?.pad_to(w)?;
    let hp = h.pad_to(w)?;
    let op = LocalOperator::new(w, m.phys_dim(), hp.matrix() - od.matrix() * C64::new(0.0, 1.0))?;
    solve(m, &op, &pinned_zero(opts))
}

/// `||(psi(A + dt dA) - psi(A - dt dA)) / (2 dt) + i H psi|| / ||psi||` on a
/// ring of `n` sites: zero when `dA` generates the Schrodinger evolution.
pub fn schrodinger_oracle(m: &UniformMps, da: &Tensor, h: &LocalOperator, n: usize, dt: f64) -> Result<f64> {
    let step = |s: f64| -> Result<crate::Vector> {
        let t = m.tensor().add(&da.scale(C64::new(s, 0.0)))?;
        mps_state(&UniformMps::new(t)?, n)
    };
    let psi = mps_state(m, n)?;
    let deriv = (step(dt)? - step(-dt)?) / C64::new(2.0 * dt, 0.0);
    let hpsi = apply_extensive(&psi, h, n)?;
    Ok((deriv + hpsi * C64::new(0.0, 1.0)).norm() / psi.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{pauli_x, pauli_z, random_hermitian, random_matrix, random_mps, random_tensor, seeded};
    use crate::localsolve::gauge_distance;
    use crate::oracle::{commutator_check, extensive_operator};

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn id_mpo(d: usize) -> Tensor {
        Tensor::eye(d).reshape(&[1, d, d, 1]).unwrap()
    }

    #[test]
    fn superoperator_matches_direct_product() {
        let mut rng = seeded(1);
        let (x, y) = (random_matrix(&mut rng, 4, 4), random_matrix(&mut rng, 4, 4));
        let rho = random_matrix(&mut rng, 4, 4);
        let s = superoperator(&x, &y, 2, 2).unwrap();
        // Fused per-site vectorization of rho.
        let fuse = |m: &Matrix| {
            crate::Vector::from_fn(16, |f, _| {
                let (p1, p2) = (f / 4, f % 4);
                let (o1, i1, o2, i2) = (p1 / 2, p1 % 2, p2 / 2, p2 % 2);
                m[(o1 * 2 + o2, i1 * 2 + i2)]
            })
        };
        let got = s.matrix() * fuse(&rho);
        assert!((got - fuse(&(&x * &rho * &y))).norm() < 1e-12);
    }

    #[test]
    fn weak_and_strong() {
        let id = LocalOperator::identity(2, 2);
        assert!(weak_symmetry_operator(&id).matrix().norm() == 0.0);
        let mut rng = seeded(2);
        let g = LocalOperator::new(2, 2, random_hermitian(&mut rng, 4)).unwrap();
        let sol = symmetry_solve(&weak_symmetry_operator(&g), &id_mpo(2), &SolveOptions::default()).unwrap();
        assert!(sol.solvable);
        let g = LocalOperator::new(2, 2, pauli_z().kronecker(&pauli_z())).unwrap();
        let sol = symmetry_solve(&strong_symmetry_operator(&g), &id_mpo(2), &SolveOptions::default()).unwrap();
        assert!(!sol.solvable && sol.residual > 1e-3);
        // Dense check: sum_i G_i . Id != 0 on four sites.
        assert!(extensive_operator(&g, 4).unwrap().norm() > 1e-3);
    }

    #[test]
    fn mpo_symmetry_examples() {
        let mut rng = seeded(3);
        let h = LocalOperator::new(2, 2, random_hermitian(&mut rng, 4)).unwrap();
        let sol = mpo_symmetry_solve(&id_mpo(2), &h, &SolveOptions::default()).unwrap();
        assert!(sol.solvable && sol.b.norm() < 1e-10);
        let zt = Tensor::from_matrix(&pauli_z()).reshape(&[1, 2, 2, 1]).unwrap();
        let sol = mpo_symmetry_solve(&zt, &xxz_hamiltonian(r(0.6)), &SolveOptions::default()).unwrap();
        assert!(sol.solvable);
        // Global spin flip is a symmetry, a tilted product operator is not.
        let xt = Tensor::from_matrix(&pauli_x()).reshape(&[1, 2, 2, 1]).unwrap();
        assert!(mpo_symmetry_solve(&xt, &xxz_hamiltonian(r(0.6)), &SolveOptions::default()).unwrap().solvable);
        let tilt = Matrix::identity(2, 2) + pauli_x() * r(0.5);
        let tt = Tensor::from_matrix(&tilt).reshape(&[1, 2, 2, 1]).unwrap();
        let sol = mpo_symmetry_solve(&tt, &xxz_hamiltonian(r(0.6)), &SolveOptions::default()).unwrap();
        assert!(!sol.solvable);
        assert!(commutator_check(&xxz_hamiltonian(r(0.6)), &tt, 4).unwrap() > 1e-3);
    }

    #[test]
    fn xxz_mpo_symmetry_recovers_boundary() {
        let delta = r(1.25);
        let (q, _) = qdeform_params(delta);
        let (t, bt) = build_xxz_mpo_solution(2, q).unwrap();
        let h = xxz_hamiltonian(delta);
        let sol = mpo_symmetry_solve(&t.to_tensor(), &h, &SolveOptions::default()).unwrap();
        assert!(sol.solvable, "residual {}", sol.residual);
        let m = vectorize_mpo(&t.to_tensor()).unwrap();
        let bt_vec = vectorize_mpo(&bt.to_tensor()).unwrap();
        assert!(gauge_distance(&m, &sol.b, bt_vec.tensor()).unwrap() < 1e-8);
        assert!(commutator_check(&h, &t.to_tensor(), 6).unwrap() < 1e-9);
    }

    #[test]
    fn lindblad_examples() {
        let d = 2;
        let zero = LocalOperator::zero(2, d * d);
        let sol = lindblad_steady_solve(&zero, &id_mpo(d), &SolveOptions::default()).unwrap();
        assert!(sol.solvable && sol.b.norm() == 0.0);

        let h = xxz_hamiltonian(r(0.3));
        let l = lindblad_superoperator(&h, &[]).unwrap();
        assert!(lindblad_steady_solve(&l, &id_mpo(d), &SolveOptions::default()).unwrap().solvable);

        let zz = LocalOperator::new(2, 2, pauli_z().kronecker(&pauli_z())).unwrap();
        let l = lindblad_superoperator(&h, &[zz]).unwrap();
        assert!(lindblad_steady_solve(&l, &id_mpo(d), &SolveOptions::default()).unwrap().solvable);
        let rho = mps_state(&vectorize_mpo(&id_mpo(d)).unwrap(), 4).unwrap();
        assert!(apply_extensive(&rho, &l, 4).unwrap().norm() < 1e-12);

        // Amplitude damping does not leave the identity invariant.
        let sm = crate::fixtures::sigma_minus().kronecker(&Matrix::identity(2, 2));
        let l = lindblad_superoperator(&h, &[LocalOperator::new(2, 2, sm).unwrap()]).unwrap();
        assert!(!lindblad_steady_solve(&l, &id_mpo(d), &SolveOptions::default()).unwrap().solvable);
    }

    #[test]
    fn lindblad_matches_dense_action() {
        let mut rng = seeded(4);
        let h = LocalOperator::new(2, 2, random_hermitian(&mut rng, 4)).unwrap();
        let jump = LocalOperator::new(2, 2, random_matrix(&mut rng, 4, 4)).unwrap();
        let l = lindblad_superoperator(&h, &[jump.clone()]).unwrap();
        let rho = random_matrix(&mut rng, 4, 4);
        let (hm, lm) = (h.matrix(), jump.matrix());
        let ldl = lm.adjoint() * lm;
        let want = (hm * &rho - &rho * hm) * C64::new(0.0, -1.0) + lm * &rho * lm.adjoint()
            - (&ldl * &rho + &rho * &ldl) * r(0.5);
        let got = superoperator(&Matrix::identity(4, 4), &Matrix::identity(4, 4), 2, 2).unwrap();
        // got is the identity on the fused space; use it to vectorize.
        let fuse = |m: &Matrix| {
            crate::Vector::from_fn(16, |f, _| {
                let (p1, p2) = (f / 4, f % 4);
                m[((p1 / 2) * 2 + p2 / 2, (p1 % 2) * 2 + p2 % 2)]
            })
        };
        assert!((got.matrix() - Matrix::identity(16, 16)).norm() == 0.0);
        assert!((l.matrix() * fuse(&rho) - fuse(&want)).norm() < 1e-12);
    }

    #[test]
    fn zero_sum_examples() {
        let z = pauli_z();
        let i2 = Matrix::identity(2, 2);
        let o = LocalOperator::new(2, 2, z.kronecker(&i2) - i2.kronecker(&z)).unwrap();
        let zs = zero_sum_decompose(&o, &SolveOptions::default()).unwrap();
        assert!(zs.solvable && (zs.q - &z).norm() < 1e-10);

        let mut rng = seeded(5);
        let q0 = random_matrix(&mut rng, 3, 3);
        let i3 = Matrix::identity(3, 3);
        let o = LocalOperator::new(2, 3, q0.kronecker(&i3) - i3.kronecker(&q0)).unwrap();
        let zs = zero_sum_decompose(&o, &SolveOptions::default()).unwrap();
        let diff = &zs.q - &q0;
        let shift = diff.trace() / 3.0;
        assert!((diff - &i3 * shift).norm() < 1e-10);

        let xx = LocalOperator::new(2, 2, pauli_x().kronecker(&pauli_x())).unwrap();
        let zs = zero_sum_decompose(&xx, &SolveOptions::default()).unwrap();
        assert!(!zs.solvable && zs.residual > 1e-3);
        assert!(extensive_operator(&xx, 4).unwrap().norm() > 0.1);
    }

    #[test]
    fn schrodinger_examples() {
        let mut rng = seeded(6);
        let m = random_mps(&mut rng, 2, 5);
        let g = random_hermitian(&mut rng, 5);
        let zero = Tensor::zeros(m.tensor().shape());

        // Stationary eigenstate: the shifted identity.
        let sol = schrodinger_residual(&m, &zero, &LocalOperator::zero(2, 5), &SolveOptions::default()).unwrap();
        assert!(sol.solvable);

        // Global phase flow dA = i mu A under h = -mu Id.
        let mu = 0.7;
        let da = m.tensor().scale(C64::new(0.0, mu));
        let h = LocalOperator::new(2, 5, Matrix::identity(25, 25) * r(-mu)).unwrap();
        assert!(schrodinger_residual(&m, &da, &h, &SolveOptions::default()).unwrap().solvable);

        // One-site field: dA = -i g A, h = g (x) Id.
        let ga = LocalOperator::new(1, 5, g.clone()).unwrap().apply_to_block(m.tensor()).unwrap();
        let da = ga.scale(C64::new(0.0, -1.0));
        let h = LocalOperator::new(1, 5, g).unwrap().pad_to(2).unwrap();
        assert!(schrodinger_residual(&m, &da, &h, &SolveOptions::default()).unwrap().solvable);
        assert!(schrodinger_oracle(&m, &da, &h, 4, 1e-6).unwrap() < 1e-6);

        // A wrong generator fails both checks.
        let bad = random_tensor(&mut rng, &[2, 5, 2]);
        assert!(!schrodinger_residual(&m, &bad, &h, &SolveOptions::default()).unwrap().solvable);
        assert!(schrodinger_oracle(&m, &bad, &h, 4, 1e-6).unwrap() > 1e-3);
    }
}
