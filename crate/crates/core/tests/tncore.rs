mod common;

use common::{c, naive_contract};
use eigenlocal::fixtures::{random_matrix, random_tensor, seeded};
use eigenlocal::tncore::{dominant_eigenpair, eigenvalues, least_squares, nullspace_basis, pseudo_inverse, rank};
use eigenlocal::{DenseTensor, Matrix, Tensor, Vector, C64};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::Rng as _;

/// Random shapes for a contraction with `k` pairs, at most six axes per
/// operand and 10^4 entries overall.
fn contraction_case(seed: u64) -> (Tensor, Tensor, Vec<(usize, usize)>) {
    let mut rng = seeded(seed);
    loop {
        let ra = rng.random_range(1..=6usize);
        let rb = rng.random_range(1..=6usize);
        let sa: Vec<usize> = (0..ra).map(|_| rng.random_range(1..=4)).collect();
        let mut sb: Vec<usize> = (0..rb).map(|_| rng.random_range(1..=4)).collect();
        let k = rng.random_range(0..=ra.min(rb));
        let mut free_a: Vec<usize> = (0..ra).collect();
        let mut free_b: Vec<usize> = (0..rb).collect();
        let mut pairs = Vec::new();
        for _ in 0..k {
            let x = free_a.swap_remove(rng.random_range(0..free_a.len()));
            let y = free_b.swap_remove(rng.random_range(0..free_b.len()));
            sb[y] = sa[x];
            pairs.push((x, y));
        }
        let (na, nb) = (sa.iter().product::<usize>(), sb.iter().product::<usize>());
        let nout = na * nb / pairs.iter().map(|p| sa[p.0] * sa[p.0]).product::<usize>();
        if na + nb + nout <= 10_000 {
            return (random_tensor(&mut rng, &sa), random_tensor(&mut rng, &sb), pairs);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contract_matches_naive_loop(seed in any::<u64>()) {
        let (a, b, pairs) = contraction_case(seed);
        let got = a.contract(&b, &pairs).unwrap();
        let want = naive_contract(&a, &b, &pairs);
        prop_assert_eq!(got.shape(), want.shape());
        for (x, y) in got.data().iter().zip(want.data()) {
            prop_assert!((x - y).norm() <= 1e-12 * y.norm().max(1.0));
        }
    }

    #[test]
    fn contraction_is_associative(seed in any::<u64>(), (i, j, k, l) in (1..5usize, 1..5usize, 1..5usize, 1..5usize)) {
        let mut rng = seeded(seed);
        let a = random_tensor(&mut rng, &[i, j, 2]);
        let b = random_tensor(&mut rng, &[j, k, 3]);
        let cc = random_tensor(&mut rng, &[k, l]);
        // (a b) c and a (b c), both with free axes (i, 2, 3, l).
        let left = a.contract(&b, &[(1, 0)]).unwrap().contract(&cc, &[(2, 0)]).unwrap();
        let right = a.contract(&b.contract(&cc, &[(1, 0)]).unwrap(), &[(1, 0)]).unwrap();
        prop_assert!(left.distance(&right).unwrap() <= 1e-10 * left.norm().max(1.0));
    }

    #[test]
    fn permute_then_inverse_is_exact(seed in any::<u64>(), perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let mut rng = seeded(seed);
        let t = random_tensor(&mut rng, &[2, 3, 4, 5]);
        let mut inv = vec![0; 4];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        prop_assert_eq!(t.permute(&perm).unwrap().permute(&inv).unwrap(), t);
    }

    #[test]
    fn penrose_identities(seed in any::<u64>(), rows in 1..50usize, cols in 1..50usize, r in 1..50usize) {
        let mut rng = seeded(seed);
        let r = r.min(rows).min(cols);
        // Rank-r product, so rank-deficient cases are covered too.
        let m = random_matrix(&mut rng, rows, r) * random_matrix(&mut rng, r, cols);
        let p = pseudo_inverse(&m, 1e-10).unwrap();
        let scale = m.norm().max(1.0) * p.norm().max(1.0);
        prop_assert!((&m * &p * &m - &m).norm() < 1e-10 * scale * m.norm().max(1.0));
        prop_assert!((&p * &m * &p - &p).norm() < 1e-10 * scale * p.norm().max(1.0));
        let mp = &m * &p;
        let pm = &p * &m;
        prop_assert!((&mp - mp.adjoint()).norm() < 1e-10 * scale);
        prop_assert!((&pm - pm.adjoint()).norm() < 1e-10 * scale);
    }

    #[test]
    fn least_squares_never_worse_than_zero(seed in any::<u64>(), rows in 1..30usize, cols in 1..30usize) {
        let mut rng = seeded(seed);
        let m = random_matrix(&mut rng, rows, cols);
        let y = random_matrix(&mut rng, rows, 1).column(0).into_owned();
        let rep = least_squares(&m, &y, 1e-10).unwrap();
        prop_assert!(rep.residual_norm <= y.norm() * (1.0 + 1e-12));
        prop_assert_eq!(rep.rank + rep.nullspace_dim, cols);
    }
}

#[test]
fn generic_scalars_contract_exactly() {
    let a = DenseTensor::from_fn(&[2, 3, 2], |i| Ratio::new((i[0] * 6 + i[1] * 2 + i[2]) as i64 - 4, 3));
    let b = DenseTensor::from_fn(&[3, 2], |i| Ratio::new(i[0] as i64 + 1, (i[1] + 1) as i64));
    let got = a.contract(&b, &[(1, 0)]).unwrap();
    assert_eq!(got, naive_contract(&a, &b, &[(1, 0)]));
    assert_eq!(got.get(&[0, 0, 0]), Ratio::new(-4 * 1 - 2 * 2 + 0 * 3, 3));

    let x = DenseTensor::from_fn(&[4, 3], |i| (i[0] as f64) - 0.5 * i[1] as f64);
    let y = DenseTensor::from_fn(&[3, 4], |i| 1.0 / (1.0 + i[0] as f64 + i[1] as f64));
    let got = x.contract(&y, &[(1, 0), (0, 1)]).unwrap();
    assert_eq!(got.shape(), &[] as &[usize]);
    assert!((got.data()[0] - naive_contract(&x, &y, &[(1, 0), (0, 1)]).data()[0]).abs() < 1e-14);
}

#[test]
fn contract_examples() {
    let v = Tensor::new(vec![2], vec![c(1.0), C64::new(0.0, 2.0)]).unwrap();
    assert_eq!(Tensor::eye(2).contract(&v, &[(1, 0)]).unwrap(), v);
    let inner = v.conj().contract(&v, &[(0, 0)]).unwrap().data()[0];
    assert!(inner.im == 0.0 && inner.re == 5.0);
    let t = random_tensor(&mut seeded(3), &[2, 3, 4]);
    assert_eq!(t.permute(&[2, 0, 1]).unwrap().shape(), &[4, 2, 3]);
    assert!(t.contract(&t, &[(0, 1)]).is_err());
    assert!(t.contract(&t, &[(0, 0), (0, 0)]).is_err());
}

#[test]
fn linear_algebra_examples() {
    let d = Matrix::from_diagonal(&Vector::from_vec(vec![c(2.0), c(0.0)]));
    let p = pseudo_inverse(&d, 1e-10).unwrap();
    assert!((p - Matrix::from_diagonal(&Vector::from_vec(vec![c(0.5), c(0.0)]))).norm() < 1e-15);
    assert!(pseudo_inverse(&Matrix::zeros(0, 0), 1e-10).is_err());

    let m = Matrix::from_vec(2, 1, vec![c(1.0), c(1.0)]);
    let rep = least_squares(&m, &Vector::from_vec(vec![c(0.0), c(1.0)]), 1e-10).unwrap();
    assert!((rep.solution[0] - c(0.5)).norm() < 1e-15);
    assert!((rep.residual_norm - 0.5f64.sqrt()).abs() < 1e-15);

    let mut rng = seeded(8);
    let m = random_matrix(&mut rng, 20, 7);
    let x0 = random_matrix(&mut rng, 7, 1).column(0).into_owned();
    let rep = least_squares(&m, &(&m * &x0), 1e-10).unwrap();
    assert!((rep.solution - x0).norm() < 1e-10);

    assert!(nullspace_basis(&Matrix::identity(3, 3), 1e-10).is_empty());
    assert_eq!(nullspace_basis(&Matrix::zeros(2, 3), 1e-10).len(), 3);
    let u = random_matrix(&mut rng, 5, 1);
    let v = random_matrix(&mut rng, 1, 6);
    let outer = &u * &v;
    let basis = nullspace_basis(&outer, 1e-10);
    assert_eq!(basis.len(), 5);
    assert_eq!(rank(&outer, 1e-10), 1);
    for x in &basis {
        assert!((&outer * x).norm() < 1e-12 * outer.norm());
    }
}

#[test]
fn eigen_examples() {
    let diag = Matrix::from_diagonal(&Vector::from_vec(vec![c(3.0), c(1.0)]));
    let ep = dominant_eigenpair(|v| &diag * v, 2, 1e-12, 100).unwrap();
    assert!((ep.value - c(3.0)).norm() < 1e-12 && (ep.vector[0].norm() - 1.0).abs() < 1e-12);

    let m = eigenlocal::fixtures::random_mps(&mut seeded(4), 2, 3);
    let e = m.transfer_matrix();
    let ep = dominant_eigenpair(|v| &e * v, 4, 1e-10, 1000).unwrap();
    assert!((ep.value.norm() - eigenvalues(&e).unwrap()[0].norm()).abs() < 1e-10);
    assert!((&e * &ep.vector - &ep.vector * ep.value).norm() < 1e-10);
}
