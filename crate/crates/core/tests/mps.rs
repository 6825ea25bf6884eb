use eigenlocal::fixtures::{aklt, ghz, random_mps, random_tensor, seeded};
use eigenlocal::mps::{devectorize_mpo, vectorize_mpo};
use eigenlocal::oracle::mps_state;
use eigenlocal::{Error, SiteChain, Tensor, UniformMps, C64};
use proptest::prelude::*;

fn small_mps() -> impl Strategy<Value = UniformMps> {
    (any::<u64>(), 1..=3usize, 2..=4usize).prop_map(|(seed, bond, phys)| random_mps(&mut seeded(seed), bond, phys))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fixed_point_invariants(m in small_mps()) {
        let fp = m.fixed_points().unwrap();
        let (rr, rl) = fp.residuals(&m);
        prop_assert!(rr < 1e-10 && rl < 1e-10, "{rr} {rl}");
        prop_assert!((fp.overlap() - C64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!((&fp.rho_left - fp.rho_left.adjoint()).norm() < 1e-12);
        prop_assert!((&fp.rho_right - fp.rho_right.adjoint()).norm() < 1e-12);
        let (el, er) = fp.min_eigenvalues();
        prop_assert!(el > 1e-10 && er > 1e-10);
    }

    #[test]
    fn full_rank_persists(m in small_mps()) {
        let rep = m.injectivity_length(Some(4));
        prop_assert!(rep.ranks.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(rep.ranks.iter().all(|&r| r <= m.bond_dim().pow(2)));
        if let Some(len) = rep.length {
            for l in len..=4 {
                prop_assert!(m.left_inverse(l).is_ok(), "lost injectivity at {l}");
            }
        }
    }

    #[test]
    fn left_inverse_recontracts_to_identity(m in small_mps()) {
        let len = m.injectivity_length(None).length.unwrap();
        let inv = m.left_inverse(len).unwrap();
        let dd = m.bond_dim();
        // sum_p inv[c, p, e] block[a, p, b] -> (c, e, a, b)
        let got = inv.contract(&m.block(len), &[(1, 1)]).unwrap();
        let want = Tensor::from_fn(&[dd, dd, dd, dd], |i| {
            C64::new(((i[0] == i[2]) && (i[1] == i[3])) as u8 as f64, 0.0)
        });
        prop_assert!(got.distance(&want).unwrap() < 1e-10);
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let t = random_tensor(&mut seeded(seed), &[2, 3, 2]).scale(C64::new(scale, 0.0));
        let once = UniformMps::new(t).unwrap().normalize().unwrap();
        let twice = once.normalize().unwrap();
        prop_assert!(once.tensor().distance(twice.tensor()).unwrap() < 1e-12 * once.tensor().norm());
        prop_assert!((once.spectral_radius().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_norm_is_transfer_trace(m in small_mps(), n in 1..=8usize) {
        prop_assume!(m.phys_dim().pow(n as u32) <= 1 << 16);
        let psi = mps_state(&m, n).unwrap();
        let tr = m.transfer_matrix().pow(n as u32).trace();
        let nn = psi.norm_squared();
        prop_assert!((tr - C64::new(nn, 0.0)).norm() < 1e-10 * nn.max(1.0));
    }
}

#[test]
fn known_injectivity() {
    let rep = aklt().injectivity_length(None);
    assert_eq!((rep.injective, rep.length), (true, Some(2)));
    assert_eq!(rep.ranks, vec![3, 4]);
    let rep = ghz().injectivity_length(None);
    assert!(!rep.injective && rep.length.is_none());
    assert!(matches!(ghz().fixed_points(), Err(Error::DegenerateSpectrum { .. })));
    assert!(matches!(ghz().left_inverse(3), Err(Error::NotInjective { .. })));
}

#[test]
fn aklt_fixed_points_are_maximally_mixed() {
    let fp = aklt().fixed_points().unwrap();
    let id = eigenlocal::Matrix::identity(2, 2);
    assert!((fp.spectral_radius - 1.0).abs() < 1e-12);
    // Both fixed points are proportional to the identity.
    assert!((&fp.rho_right - &id * fp.rho_right[(0, 0)]).norm() < 1e-12);
    assert!((&fp.rho_left - &id * fp.rho_left[(0, 0)]).norm() < 1e-12);
}

#[test]
fn proof_inverse_caps_with_fixed_points() {
    let m = random_mps(&mut seeded(21), 2, 3);
    let len = m.injectivity_length(None).length.unwrap();
    let x = m.proof_inverse_x(len).unwrap();
    let fp = m.fixed_points().unwrap();
    let got = x.contract(&m.block(len), &[(1, 1)]).unwrap(); // (c, e, a, b)
    let want = Tensor::from_fn(&[2, 2, 2, 2], |i| fp.rho_right[(i[2], i[0])] * fp.rho_left[(i[1], i[3])]);
    assert!(got.distance(&want).unwrap() < 1e-10);
}

#[test]
fn mpo_vectorization_roundtrip() {
    let t = random_tensor(&mut seeded(5), &[2, 3, 2, 2]);
    let m = vectorize_mpo(&t).unwrap();
    assert_eq!(m.phys_dim(), 6);
    assert_eq!(devectorize_mpo(&m, 3, 2).unwrap(), t);
    assert!(devectorize_mpo(&m, 4, 2).is_err());
}

#[test]
fn chains_validate_bonds() {
    let mut rng = seeded(6);
    let a = random_tensor(&mut rng, &[2, 2, 3]);
    let b = random_tensor(&mut rng, &[3, 2, 2]);
    let chain = SiteChain::new(vec![a.clone(), b.clone()]).unwrap();
    assert_eq!(chain.len(), 2);
    assert_eq!(chain.site(3), &b);
    assert!(SiteChain::new(vec![a.clone(), a]).is_err());
    assert!(SiteChain::new(vec![b.clone(), b]).is_err());
}
