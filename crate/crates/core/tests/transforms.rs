use elliptic_selberg::blocks::BlockIndex;
use elliptic_selberg::macdonald::{modular_matrices, relation_residuals, translation_matrices};
use elliptic_selberg::quadrature::QuadratureSpec;
use elliptic_selberg::specfun::ModularPoint;
use elliptic_selberg::transforms::{
    apply_transform, default_grid, expand_in_block_basis, numeric_matrices, numeric_modular_matrices,
    BlockFunction, Transform,
};
use elliptic_selberg::{Complex64, Error};
use nalgebra::DMatrix;

fn pt(re: f64, im: f64) -> ModularPoint {
    ModularPoint::new(Complex64::new(re, im)).unwrap()
}

fn block(kappa: u32, n: i64) -> BlockFunction {
    BlockFunction::block(BlockIndex::new(1, kappa, n).unwrap(), QuadratureSpec::default())
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[test]
fn a_squared_is_identity_and_a_acts_by_parity() {
    let at = pt(0.0, 0.9);
    let u = block(5, 2);
    let l = Complex64::new(0.3, 0.0);
    let base = u.eval(l, &at).unwrap();
    let a = apply_transform(Transform::A, &u, l, &at).unwrap();
    let a2 = apply_transform(Transform::A, &u.transformed(Transform::A), l, &at).unwrap();
    assert!((a - base).norm() < 1e-8 * base.norm());
    assert!((a2 - base).norm() < 1e-8 * base.norm());
}

#[test]
fn b_exchanges_index_with_its_reflection() {
    let at = pt(0.0, 0.9);
    let phase = -Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 2.0 / 5.0);
    for l in [0.27, 0.55] {
        let l = Complex64::new(l, 0.0);
        let b = apply_transform(Transform::B, &block(5, 2), l, &at).unwrap();
        let want = phase * block(5, 3).eval(l, &at).unwrap();
        assert!((b - want).norm() < 1e-5 * want.norm());
    }
}

#[test]
fn transforms_preserve_block_properties() {
    let at = pt(0.0, 1.0);
    let tau = at.tau();
    let l = Complex64::new(0.3, 0.0);
    for x in [Transform::A, Transform::B, Transform::T, Transform::S] {
        let f = block(5, 2).transformed(x);
        let base = f.eval(l, &at).unwrap();
        let rel = |v: Complex64| (v - base).norm() / base.norm();
        assert!(rel(f.eval(l + 2.0, &at).unwrap()) < 1e-5, "{x:?} (i)");
        let factor = (Complex64::new(0.0, -2.0 * std::f64::consts::PI * 5.0) * (l + tau)).exp();
        assert!(rel(f.eval(l + tau * 2.0, &at).unwrap() / factor) < 1e-5, "{x:?} (ii)");
        assert!(rel(f.eval(-l, &at).unwrap()) < 1e-5, "{x:?} (iii)");
    }
}

#[test]
fn basis_member_expands_to_unit_vector() {
    let at = pt(0.0, 0.9);
    let e = expand_in_block_basis(&block(6, 3), 1, 6, &default_grid(3), &at, &QuadratureSpec::default()).unwrap();
    assert!(e.residual < 1e-6);
    for (n, c) in e.indices.iter().zip(&e.coefficients) {
        let want = if *n == 3 { 1.0 } else { 0.0 };
        assert!((c - want).norm() < 1e-6, "n={n}: {c}");
    }
}

#[test]
fn small_grid_is_rejected() {
    let at = pt(0.0, 0.9);
    let err = expand_in_block_basis(&block(6, 3), 1, 6, &[0.2, 0.4], &at, &QuadratureSpec::default()).unwrap_err();
    assert!(matches!(err, Error::InvalidParameter(_)));
}

#[test]
fn numeric_s_and_t_match_closed_forms() {
    let at = pt(0.0, 1.0);
    let quad = QuadratureSpec::default();
    for kappa in [4u32, 5] {
        let (t, s) = numeric_modular_matrices(1, kappa, &at, &quad).unwrap();
        let (ta, sa) = modular_matrices(1, kappa).unwrap();
        assert!(max_abs(&(&s.entries - &sa.entries)) < 1e-4, "S at kappa={kappa}");
        assert!(max_abs(&(&t.entries - &ta.entries)) < 1e-4, "T at kappa={kappa}");
    }
}

#[test]
fn numeric_matrices_satisfy_group_relations() {
    let at = pt(0.0, 1.0);
    let quad = QuadratureSpec::default();
    for kappa in [5u32, 6] {
        let (m, residual) =
            numeric_matrices(1, kappa, &[Transform::T, Transform::S, Transform::A, Transform::B], &at, &quad).unwrap();
        assert!(residual < 1e-6, "kappa={kappa}: residual {residual}");
        let (t, s, a, b) = (&m[0].entries, &m[1].entries, &m[2].entries, &m[3].entries);
        let r = relation_residuals(s, t, a, b, 1, kappa).unwrap();
        assert!(r.sas_inverse_b < 1e-4 && r.tb_bat < 1e-4 && r.ab_commutation < 1e-4, "kappa={kappa}: {r:?}");
        let off_diag: f64 = (0..t.nrows())
            .flat_map(|i| (0..t.ncols()).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| t[(i, j)].norm())
            .sum();
        assert!(off_diag < 1e-4);
        let (aa, ba) = translation_matrices(1, kappa).unwrap();
        assert!(max_abs(&(a - &aa.entries)) < 1e-4 && max_abs(&(b - &ba.entries)) < 1e-4);
    }
}

#[test]
fn numeric_matrices_need_p_at_most_one() {
    let at = pt(0.0, 1.0);
    assert_eq!(
        numeric_modular_matrices(2, 6, &at, &QuadratureSpec::default()).unwrap_err(),
        Error::UnsupportedP(2)
    );
}
