use elliptic_selberg::quadrature::QuadratureSpec;
use elliptic_selberg::selberg::*;
use elliptic_selberg::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn oracle_polynomial_beta() {
    let o = selberg_oracle(&SelbergParams::real(1, 2.0, 3.0, 0.7), &QuadratureSpec::default()).unwrap();
    assert!((o.value - 1.0 / 12.0).norm() < 1e-14);
}

#[test]
fn oracle_p2_unit() {
    let o = selberg_oracle(&SelbergParams::real(2, 1.0, 1.0, 1.0), &QuadratureSpec::default()).unwrap();
    assert!((o.value - 1.0 / 12.0).norm() < 1e-13);
}

#[test]
fn oracle_negative_beta_continuation() {
    // B(1/2, -1/2) continues to Γ(1/2)Γ(-1/2)/Γ(0) = 0
    let o = selberg_oracle(&SelbergParams::real(1, 0.5, -0.5, 0.0), &QuadratureSpec::default()).unwrap();
    assert!(o.value.norm() < 1e-10, "{}", o.value);
    // B(3/2, -1/2) = -B(1/2, 1/2) = -π
    let o = selberg_oracle(&SelbergParams::real(1, 1.5, -0.5, 0.0), &QuadratureSpec::default()).unwrap();
    assert!(rel(o.value, Complex64::new(-PI, 0.0)) < 1e-10, "{}", o.value);
}

#[test]
fn oracle_block_parameters_match_closed_form() {
    // α = 3/4, β = -1/2, γ = 1/4 (block parameters for p=1, κ=4, n=2)
    let params = SelbergParams::real(1, 0.75, -0.5, 0.25);
    let o = selberg_oracle(&params, &QuadratureSpec::default()).unwrap();
    let v = selberg_value(&params).unwrap();
    assert!(rel(o.value, v) < 1e-10, "{} vs {}", o.value, v);
}

#[test]
fn symmetric_in_alpha_beta() {
    let a = selberg_value(&SelbergParams::real(2, 0.7, 1.9, 0.4)).unwrap();
    let b = selberg_value(&SelbergParams::real(2, 1.9, 0.7, 0.4)).unwrap();
    assert!(rel(a, b) < 1e-14);
}

#[test]
fn random_draws_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = rng.gen_range(1..=2);
        let alpha = Complex64::new(rng.gen_range(0.2..3.0), rng.gen_range(-0.5..0.5));
        let beta = Complex64::new(rng.gen_range(0.2..3.0), rng.gen_range(-0.5..0.5));
        let gamma = Complex64::new(rng.gen_range(0.0..1.5), 0.0);
        let params = SelbergParams::new(p, alpha, beta, gamma);
        let o = selberg_oracle(&params, &QuadratureSpec::default()).unwrap();
        let v = selberg_value(&params).unwrap();
        assert!(rel(o.value, v) < 1e-8, "{params:?}: {} vs {}", o.value, v);
    }
}

#[test]
fn oracle_rejects_out_of_range() {
    assert!(selberg_oracle(&SelbergParams::real(3, 1.0, 1.0, 1.0), &QuadratureSpec::default()).is_err());
    assert!(selberg_oracle(&SelbergParams::real(1, -1.5, 1.0, 1.0), &QuadratureSpec::default()).is_err());
}

#[test]
fn block_constants_pole_free() {
    for n in [2, 3] {
        let c = block_constant(1, 5, n).unwrap();
        assert!(c.value.norm() > 1e-3 && c.value.norm().is_finite());
    }
}
