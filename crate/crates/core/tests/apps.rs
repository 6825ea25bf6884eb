mod common;

use common::c;
use eigenlocal::apps::{
    build_xxz_mpo_solution, lindblad_steady_solve, lindblad_superoperator, mpo_symmetry_solve, quantum_plane_check,
    schrodinger_oracle, schrodinger_residual, xxz_component_residuals, xxz_hamiltonian, zero_sum_decompose,
};
use eigenlocal::fixtures::{pauli_x, pauli_z, random_hermitian, random_matrix, random_mps, seeded, sigma_minus};
use eigenlocal::mps::vectorize_mpo;
use eigenlocal::oracle::{apply_extensive, apply_on_sites, commutator_check, extensive_operator, mps_state};
use eigenlocal::{LocalOperator, Matrix, SolveOptions, Tensor, Vector, C64};
use proptest::prelude::*;

/// `op` acting on `sites` of an `n`-site ring of dimension `d`, as a dense matrix.
fn embed(op: &Matrix, sites: &[usize], n: usize, d: usize) -> Matrix {
    let dim = d.pow(n as u32);
    let dims = vec![d; n];
    let mut out = Matrix::zeros(dim, dim);
    for j in 0..dim {
        let mut e = Vector::zeros(dim);
        e[j] = c(1.0);
        out.set_column(j, &apply_on_sites(&e, &dims, op, sites).unwrap());
    }
    out
}

/// Per-site fused `(out, in)` vectorization of an `n`-site density matrix.
fn fuse(rho: &Matrix, n: usize, d: usize) -> Vector {
    let dd = d * d;
    Vector::from_fn(dd.pow(n as u32), |f, _| {
        let (mut row, mut col) = (0, 0);
        for s in 0..n {
            let p = (f / dd.pow((n - 1 - s) as u32)) % dd;
            row = row * d + p / d;
            col = col * d + p % d;
        }
        rho[(row, col)]
    })
}

fn dense_lindbladian(h: &LocalOperator, jumps: &[LocalOperator], rho: &Matrix, n: usize) -> Matrix {
    let d = h.phys();
    let hn = extensive_operator(h, n).unwrap();
    let mut out = (&hn * rho - rho * &hn) * C64::new(0.0, -1.0);
    for jump in jumps {
        for i in 0..n {
            let l = embed(jump.matrix(), &[i, (i + 1) % n], n, d);
            let ldl = l.adjoint() * &l;
            out += &l * rho * l.adjoint() - (&ldl * rho + rho * &ldl) * c(0.5);
        }
    }
    out
}

#[test]
fn lindbladian_matches_dense_master_equation() {
    let mut rng = seeded(1);
    let n = 3;
    let h = LocalOperator::new(2, 2, random_hermitian(&mut rng, 4)).unwrap();
    let jumps = [
        LocalOperator::new(2, 2, random_matrix(&mut rng, 4, 4)).unwrap(),
        LocalOperator::new(2, 2, sigma_minus().kronecker(&Matrix::identity(2, 2))).unwrap(),
    ];
    let l = lindblad_superoperator(&h, &jumps).unwrap();
    let rho = random_matrix(&mut rng, 8, 8);
    let got = apply_extensive(&fuse(&rho, n, 2), &l, n).unwrap();
    let want = fuse(&dense_lindbladian(&h, &jumps, &rho, n), n, 2);
    assert!((got - &want).norm() < 1e-11 * want.norm());
}

#[test]
fn steady_state_solver_agrees_with_dense_check() {
    let n = 4;
    let id = Tensor::eye(2).reshape(&[1, 2, 2, 1]).unwrap();
    let rho = Matrix::identity(16, 16);
    let h = xxz_hamiltonian(c(0.5));
    let zz = LocalOperator::new(2, 2, pauli_z().kronecker(&pauli_z())).unwrap();
    let damp = LocalOperator::new(2, 2, sigma_minus().kronecker(&Matrix::identity(2, 2))).unwrap();
    for (jumps, steady) in [(vec![], true), (vec![zz], true), (vec![damp], false)] {
        let l = lindblad_superoperator(&h, &jumps).unwrap();
        let sol = lindblad_steady_solve(&l, &id, &SolveOptions::default()).unwrap();
        let dense = dense_lindbladian(&h, &jumps, &rho, n).norm();
        assert_eq!(sol.solvable, steady);
        assert_eq!(dense < 1e-10, steady, "dense residual {dense}");
    }
}

#[test]
fn zero_sum_local_and_global_agree() {
    let mut rng = seeded(2);
    let i2 = Matrix::identity(2, 2);
    let mut ops = Vec::new();
    for _ in 0..4 {
        let q = random_matrix(&mut rng, 2, 2);
        ops.push(q.kronecker(&i2) - i2.kronecker(&q));
        ops.push(random_matrix(&mut rng, 4, 4));
    }
    ops.push(pauli_x().kronecker(&pauli_x()));
    ops.push(Matrix::identity(4, 4) * c(0.3));
    ops.push(pauli_z().kronecker(&pauli_x()) - pauli_x().kronecker(&pauli_z()));
    for o in ops {
        let o = LocalOperator::new(2, 2, o).unwrap();
        let local = zero_sum_decompose(&o, &SolveOptions::default()).unwrap().residual < 1e-10;
        for n in [4, 5] {
            let global = extensive_operator(&o, n).unwrap().norm() < 1e-8;
            assert_eq!(local, global, "N = {n}, O = {}", o.matrix());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The builder satisfies the quantum-plane relations, and those imply
    /// every component of the local identity for Delta = (q + 1/q) / 2.
    #[test]
    fn quantum_plane_implies_components(r in 0.3f64..3.0, theta in 0.0f64..std::f64::consts::TAU, n in 2..=3usize) {
        let q = C64::from_polar(r, theta);
        prop_assume!((q * q + c(1.0)).norm() > 1e-3);
        let (t, bt) = build_xxz_mpo_solution(n, q).unwrap();
        prop_assert!(quantum_plane_check(&t, q).iter().all(|&x| x < 1e-12));
        let delta = (q + q.inv()) / 2.0;
        let res = xxz_component_residuals(&t, &bt, delta).unwrap();
        prop_assert!(res.iter().all(|&x| x < 1e-10), "{res:?}");
    }
}

#[test]
fn mpo_symmetry_bounds_the_commutator() {
    let mpo = |m: Matrix| Tensor::from_matrix(&m).reshape(&[1, 2, 2, 1]).unwrap();
    let delta = c(1.25);
    let (t, _) = build_xxz_mpo_solution(2, c(2.0)).unwrap();
    let cases = [
        (mpo(Matrix::identity(2, 2)), xxz_hamiltonian(c(0.3))),
        (mpo(pauli_z()), xxz_hamiltonian(c(0.7))),
        (mpo(pauli_x()), xxz_hamiltonian(c(-0.4))),
        (t.to_tensor(), xxz_hamiltonian(delta)),
        (mpo(Matrix::identity(2, 2) + pauli_x() * c(0.5)), xxz_hamiltonian(c(0.7))),
    ];
    let mut solvable = 0;
    for (t, h) in cases {
        let sol = mpo_symmetry_solve(&t, &h, &SolveOptions::default()).unwrap();
        if !sol.solvable {
            assert!(commutator_check(&h, &t, 4).unwrap() > 1e-3);
            continue;
        }
        solvable += 1;
        for n in 4..=6 {
            let comm = commutator_check(&h, &t, n).unwrap();
            assert!(comm <= 10.0 * n as f64 * sol.residual.max(f64::EPSILON), "N = {n}: {comm} vs {}", sol.residual);
        }
    }
    assert_eq!(solvable, 4);
}

#[test]
fn schrodinger_local_and_dense_agree() {
    let mut rng = seeded(3);
    let m = random_mps(&mut rng, 2, 4);
    let g = random_hermitian(&mut rng, 4);
    let h = LocalOperator::new(1, 4, g.clone()).unwrap().pad_to(2).unwrap();
    let ga = LocalOperator::new(1, 4, g).unwrap().apply_to_block(m.tensor()).unwrap();
    let good = ga.scale(C64::new(0.0, -1.0));
    assert!(schrodinger_residual(&m, &good, &h, &SolveOptions::default()).unwrap().solvable);
    assert!(schrodinger_oracle(&m, &good, &h, 5, 1e-5).unwrap() < 1e-6);

    let bad = ga.scale(C64::new(0.0, 1.0));
    assert!(!schrodinger_residual(&m, &bad, &h, &SolveOptions::default()).unwrap().solvable);
    assert!(schrodinger_oracle(&m, &bad, &h, 5, 1e-5).unwrap() > 1e-3);
}

#[test]
fn vectorized_identity_is_product_of_bell_pairs() {
    let id = Tensor::eye(3).reshape(&[1, 3, 3, 1]).unwrap();
    let psi = mps_state(&vectorize_mpo(&id).unwrap(), 2).unwrap();
    assert!((psi - fuse(&Matrix::identity(9, 9), 2, 3)).norm() == 0.0);
}
