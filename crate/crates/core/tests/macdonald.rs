use elliptic_selberg::macdonald::{
    central_scalar, modular_matrices, relation_residuals, translation_matrices, MacdonaldBasis,
};
use elliptic_selberg::Error;

const PAIRS: [(usize, u32); 8] = [(0, 3), (0, 4), (1, 4), (1, 5), (1, 6), (1, 8), (1, 10), (2, 6)];

#[test]
fn macdonald_polynomials_are_orthogonal_and_even() {
    for (p, kappa) in PAIRS {
        let dim = kappa as usize - 2 * p - 1;
        let basis = MacdonaldBasis::new(p + 1, kappa, dim - 1).unwrap();
        assert!(basis.orthogonality_defect() < 1e-10, "p={p} kappa={kappa}");
        for poly in &basis.polys {
            assert!(poly.evenness_defect() < 1e-12);
        }
    }
}

#[test]
fn modular_relations_hold() {
    for (p, kappa) in PAIRS {
        let (t, s) = modular_matrices(p, kappa).unwrap();
        let (a, b) = translation_matrices(p, kappa).unwrap();
        let r = relation_residuals(&s.entries, &t.entries, &a.entries, &b.entries, p, kappa).unwrap();
        assert!(r.max() < 1e-8, "p={p} kappa={kappa}: {r:?}");
    }
}

#[test]
fn p0_kappa3_s_matrix() {
    let (_, s) = modular_matrices(0, 3).unwrap();
    let scalar = central_scalar(0, 3);
    let s2 = &s.entries * &s.entries;
    assert!((s2[(0, 0)] - scalar).norm() < 1e-12);
    assert_eq!(s.indices(), vec![1, 2]);
}

#[test]
fn degenerate_gram_is_reported() {
    let err = MacdonaldBasis::new(2, 4, 3).unwrap_err();
    assert!(matches!(err, Error::DegenerateGram { .. }), "{err:?}");
}

#[test]
fn kappa_too_small_is_rejected() {
    assert!(matches!(modular_matrices(2, 5), Err(Error::InvalidParameter(_))));
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

    #[test]
    fn relations_hold_at_random_levels(p in 0usize..3, extra in 0u32..7) {
        let kappa = 2 * p as u32 + 2 + extra;
        let (t, s) = modular_matrices(p, kappa).unwrap();
        let (a, b) = translation_matrices(p, kappa).unwrap();
        let r = relation_residuals(&s.entries, &t.entries, &a.entries, &b.entries, p, kappa).unwrap();
        proptest::prop_assert!(r.max() < 1e-8, "p={} kappa={} {:?}", p, kappa, r);
    }
}
