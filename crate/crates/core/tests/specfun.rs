use elliptic_selberg::specfun::{
    branched_pow, dedekind_eta, lattice_distance, phi, sigma_and_e, theta1, theta_level, EllipticArgument,
    ModularPoint, SeriesTruncation, Theta1, ThetaLevel,
};
use elliptic_selberg::{Complex64, Error};
use proptest::prelude::*;
use std::f64::consts::{PI, SQRT_2};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pt(re: f64, im: f64) -> ModularPoint {
    ModularPoint::new(c(re, im)).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn tr() -> SeriesTruncation {
    SeriesTruncation::default()
}

#[test]
fn theta1_antiperiodic_in_lambda() {
    let p = pt(0.0, 1.0);
    let v = theta1(&EllipticArgument::real(0.3, &p), &p, 0, 0, &tr()).unwrap();
    let w = theta1(&EllipticArgument::real(1.3, &p), &p, 0, 0, &tr()).unwrap();
    assert!(rel(w, -v) < 1e-13);
}

#[test]
fn theta1_vanishes_at_origin() {
    let p = pt(0.0, 1.0);
    let th = Theta1::new(&p, &tr());
    assert!(th.value(c(0.0, 0.0)).unwrap().norm() < 1e-16);
}

#[test]
fn theta1_derivative_is_eta_cubed() {
    let p = pt(0.0, 0.8);
    let d = theta1(&EllipticArgument::real(0.0, &p), &p, 1, 0, &tr()).unwrap();
    let eta = dedekind_eta(&p, &tr()).unwrap();
    assert!(rel(d, eta.powu(3) * (2.0 * PI)) < 1e-12);
}

#[test]
fn eta_matches_direct_partial_product() {
    let tau = c(0.0, 1.0);
    let q = (c(0.0, 2.0 * PI) * tau).exp();
    let mut prod = (c(0.0, 2.0 * PI / 24.0) * tau).exp();
    let mut qj = c(1.0, 0.0);
    for _ in 1..=30 {
        qj *= q;
        prod *= c(1.0, 0.0) - qj;
    }
    assert!(rel(dedekind_eta(&pt(0.0, 1.0), &tr()).unwrap(), prod) < 1e-14);
}

#[test]
fn eta_ratio_is_phi3() {
    let ratio = dedekind_eta(&pt(0.0, 2.0), &tr()).unwrap() / dedekind_eta(&pt(0.0, 1.0), &tr()).unwrap();
    let phi3 = phi(3, &pt(0.0, 1.0), &tr()).unwrap();
    assert!(rel(ratio, phi3 / SQRT_2) < 1e-13);
}

/// Integer coefficients of ∏_{j≤N}(1 − q^{2j−1})(1 + q^j) up to q^order.
fn euler_product_series(order: usize) -> Vec<i64> {
    let mut s = vec![0i64; order + 1];
    s[0] = 1;
    let mut mul = |e: usize, sign: i64| {
        for k in (e..=order).rev() {
            s[k] += sign * s[k - e];
        }
    };
    for j in 1..=order {
        if 2 * j - 1 <= order {
            mul(2 * j - 1, -1);
        }
        mul(j, 1);
    }
    s
}

#[test]
fn phi_product_is_sqrt2() {
    let series = euler_product_series(20);
    assert_eq!(series[0], 1);
    assert!(series[1..].iter().all(|&k| k == 0));
    let p = pt(0.0, 1.0);
    let prod = phi(1, &p, &tr()).unwrap() * phi(2, &p, &tr()).unwrap() * phi(3, &p, &tr()).unwrap();
    assert!(rel(prod, c(SQRT_2, 0.0)) < 1e-13);
}

#[test]
fn phi_modular_rules() {
    let p = pt(0.0, 0.7);
    assert!(rel(phi(2, &p.inverted().unwrap(), &tr()).unwrap(), phi(3, &p, &tr()).unwrap()) < 1e-10);
    let p = pt(0.0, 0.9);
    let shifted = phi(3, &p.translated(1.0).unwrap(), &tr()).unwrap();
    assert!(rel(shifted, Complex64::from_polar(1.0, PI / 12.0) * phi(3, &p, &tr()).unwrap()) < 1e-10);
}

#[test]
fn phi_rejects_bad_index() {
    assert!(matches!(phi(4, &pt(0.0, 1.0), &tr()), Err(Error::InvalidParameter(_))));
}

#[test]
fn theta_level_index_periodic() {
    let p = pt(0.0, 1.0);
    let a = EllipticArgument::real(0.2, &p);
    let x = theta_level(4, 1, &a, &p, false, 0, 0, &tr()).unwrap();
    let y = theta_level(4, 9, &a, &p, false, 0, 0, &tr()).unwrap();
    assert!(rel(y, x) < 1e-14);
}

#[test]
fn theta_level_sign_under_unit_shift() {
    let p = pt(0.0, 0.8);
    let th = ThetaLevel::new(5, 3, &p, &tr()).unwrap();
    let v = th.eval(c(0.37, 0.0), 0, 0).unwrap();
    let w = th.eval(c(1.37, 0.0), 0, 0).unwrap();
    assert!(rel(w, -v) < 1e-12);
}

#[test]
fn symmetrized_theta_is_flat_at_origin() {
    let th = ThetaLevel::new(6, 2, &pt(0.0, 1.0), &tr()).unwrap();
    let d = th.eval_symmetrized(c(0.0, 0.0), 1, 0).unwrap();
    assert_eq!(d.norm(), 0.0);
}

#[test]
fn theta_level_inversion() {
    for im in [1.0, 0.8] {
        let p = pt(0.0, im);
        let tau = p.tau();
        let lambda = c(0.21, 0.05);
        let kappa = 3u32;
        let k = kappa as f64;
        for n in 0..6 {
            let lhs = ThetaLevel::new(kappa, n, &p.inverted().unwrap(), &tr())
                .unwrap()
                .eval(lambda / tau, 0, 0)
                .unwrap();
            let mut sum = c(0.0, 0.0);
            for m in 0..6 {
                let th = ThetaLevel::new(kappa, m, &p, &tr()).unwrap();
                sum += Complex64::from_polar(1.0, -PI * (m * n) as f64 / k) * th.eval(lambda, 0, 0).unwrap();
            }
            let pre = (c(0.0, -1.0) * tau / (2.0 * k)).sqrt() * (c(0.0, PI * k) * lambda * lambda / (2.0 * tau)).exp();
            assert!(rel(lhs, pre * sum) < 1e-10, "n={n} tau={tau}");
        }
    }
}

fn richardson_limit(f: impl Fn(f64) -> Complex64) -> Complex64 {
    let (a, b) = (f(1e-4), f(1e-5));
    (b * 10.0 - a) / 9.0
}

#[test]
fn sigma_has_unit_residue() {
    let p = pt(0.0, 1.0);
    let a = EllipticArgument::real(0.3, &p);
    let lim = richardson_limit(|t| c(t, 0.0) * sigma_and_e(&a, c(t, 0.0), &p, &tr()).unwrap().sigma);
    assert!(rel(lim, c(1.0, 0.0)) < 1e-8);
}

#[test]
fn e_is_linear_at_both_ends() {
    let a = EllipticArgument::real(0.3, &pt(0.0, 0.8));
    let p = pt(0.0, 0.8);
    let r0 = sigma_and_e(&a, c(1e-6, 0.0), &p, &tr()).unwrap().e / 1e-6;
    assert!(rel(r0, c(1.0, 0.0)) < 1e-10);
    let p = pt(0.0, 1.0);
    let r1 = sigma_and_e(&a, c(1.0 - 1e-6, 0.0), &p, &tr()).unwrap().e / 1e-6;
    assert!(rel(r1, c(1.0, 0.0)) < 1e-9);
}

#[test]
fn sigma_names_pole_argument() {
    let p = pt(0.0, 1.0);
    let err = sigma_and_e(&EllipticArgument::real(1.0, &p), c(0.3, 0.0), &p, &tr()).unwrap_err();
    assert!(matches!(err, Error::PoleProximity { argument: "lambda", .. }));
    let err = sigma_and_e(&EllipticArgument::real(0.3, &p), c(0.0, 0.0), &p, &tr()).unwrap_err();
    assert!(matches!(err, Error::PoleProximity { argument: "t", .. }));
}

#[test]
fn rho_prime_matches_difference_quotient() {
    let p = pt(0.0, 1.0);
    let rho = |l: f64| sigma_and_e(&EllipticArgument::real(l, &p), c(0.5, 0.0), &p, &tr()).unwrap();
    let h = 1e-5;
    let fd = (rho(0.3 + h).rho - rho(0.3 - h).rho) / (2.0 * h);
    assert!(rel(fd, rho(0.3).rho_prime) < 1e-8);
}

#[test]
fn branched_pow_along_shifted_e() {
    let p = pt(1.0, 0.8);
    let th = Theta1::new(&p, &tr());
    let d0 = th.derivative_at_zero();
    let e = |t: f64| th.value(c(t, 0.0)).unwrap() / d0;
    let coarse: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
    let values: Vec<Complex64> = coarse.iter().map(|&t| e(t)).collect();
    let got = branched_pow(&values, c(0.4, 0.0)).unwrap();
    // Winding accumulated on a ten times finer grid.
    let mut arg = e(1e-3).arg();
    let mut prev = e(1e-3);
    let mut t = 1e-3;
    for (i, &target) in coarse.iter().enumerate() {
        while t < target - 1e-12 {
            t = (t + 5e-4).min(target);
            let v = e(t);
            arg += (v / prev).arg();
            prev = v;
        }
        let want = (c(values[i].norm().ln(), arg) * 0.4).exp();
        assert!(rel(got[i], want) < 1e-12, "t={target}");
    }
}

#[test]
fn lattice_floor_applies_to_shifted_points() {
    let tau = c(0.2, 0.9);
    assert!(lattice_distance(tau + 1.0, tau) < 1e-14);
    assert!((lattice_distance(c(0.5, 0.0), tau) - 0.5).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta1_quasi_periodic(lr in 0.0f64..1.0, li in -0.3f64..0.3, tr_ in -0.5f64..0.5, ti in 0.6f64..1.5) {
        let p = pt(tr_, ti);
        let tau = p.tau();
        let lambda = c(lr, li);
        let th = Theta1::new(&p, &tr());
        let v = th.value(lambda).unwrap();
        let w = th.value(lambda + tau).unwrap();
        let want = -(c(0.0, -PI) * (lambda * 2.0 + tau)).exp() * v;
        prop_assert!((w - want).norm() <= 1e-12 * want.norm().max(1e-300) + 1e-14);
    }

    #[test]
    fn theta_level_translation(kappa in 1u32..7, n in 0i64..14, lr in 0.0f64..1.0, ti in 0.6f64..1.5) {
        let p = pt(0.1, ti);
        let tau = p.tau();
        let lambda = c(lr, 0.0);
        let th = ThetaLevel::new(kappa, n, &p, &tr()).unwrap();
        let next = ThetaLevel::new(kappa, n + kappa as i64, &p, &tr()).unwrap();
        let want = (c(0.0, -PI * kappa as f64) * (lambda + tau / 2.0)).exp() * next.eval(lambda, 0, 0).unwrap();
        prop_assert!(rel(th.eval(lambda + tau, 0, 0).unwrap(), want) < 1e-10);
    }

    #[test]
    fn symmetrized_theta_even(kappa in 1u32..9, n in 0i64..16, lr in -1.0f64..1.0, li in -0.2f64..0.2) {
        let th = ThetaLevel::new(kappa, n, &pt(0.0, 1.0), &tr()).unwrap();
        let lambda = c(lr, li);
        prop_assert_eq!(th.eval_symmetrized(lambda, 0, 0).unwrap(), th.eval_symmetrized(-lambda, 0, 0).unwrap());
    }

    #[test]
    fn heat_equation_for_symmetrized_theta(kappa in 1u32..7, n in 0i64..12, lr in 0.05f64..0.95) {
        let th = ThetaLevel::new(kappa, n, &pt(0.0, 0.9), &tr()).unwrap();
        let lambda = c(lr, 0.0);
        let lhs = c(0.0, 2.0 * PI * kappa as f64) * th.eval_symmetrized(lambda, 0, 1).unwrap();
        let rhs = th.eval_symmetrized(lambda, 2, 0).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * lhs.norm().max(rhs.norm()).max(1e-12));
    }
}
