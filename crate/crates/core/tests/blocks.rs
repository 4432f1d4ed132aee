use elliptic_selberg::blocks::{j_integral, leading_term_constant, u_block, BlockIndex};
use elliptic_selberg::quadrature::QuadratureSpec;
use elliptic_selberg::selberg::block_constant;
use elliptic_selberg::specfun::{EllipticArgument, ModularPoint, SeriesTruncation, Theta1, ThetaLevel};
use elliptic_selberg::{Complex64, Error};

fn pt(im: f64) -> ModularPoint {
    ModularPoint::new(Complex64::new(0.0, im)).unwrap()
}

fn u(p: usize, kappa: u32, n: i64, lambda: Complex64, at: &ModularPoint) -> Complex64 {
    let idx = BlockIndex::new(p, kappa, n).unwrap();
    u_block(&idx, &EllipticArgument::new(lambda, at), at, &QuadratureSpec::default())
        .unwrap()
        .value
}

fn theta1(lambda: f64, at: &ModularPoint) -> Complex64 {
    Theta1::new(at, &SeriesTruncation::default()).value(lambda.into()).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn p0_integral_is_the_theta_function() {
    let at = pt(0.9);
    let idx = BlockIndex::new(0, 3, 1).unwrap();
    let arg = EllipticArgument::real(0.3, &at);
    let j = j_integral(&idx, &arg, &at, &QuadratureSpec::default()).unwrap();
    let th = ThetaLevel::new(3, 1, &at, &SeriesTruncation::default()).unwrap();
    assert!(rel(j.value, th.eval(0.3.into(), 0, 0).unwrap()) < 1e-15);
}

#[test]
fn p0_even_index_block_vanishes() {
    let at = pt(0.9);
    assert!(u(0, 4, 0, 0.3.into(), &at).norm() < 1e-14);
}

#[test]
fn p1_kappa4_block_is_constant_times_theta1_squared() {
    let at = pt(0.9);
    let c = block_constant(1, 4, 2).unwrap().value;
    for l in [0.13, 0.3, 0.55] {
        let rhs = c * theta1(l, &at).powu(2);
        assert!(rel(u(1, 4, 2, l.into(), &at), rhs) < 1e-7, "lambda={l}");
    }
}

#[test]
fn p1_kappa5_block_matches_eta_theta_product() {
    let at = pt(0.9);
    let trunc = SeriesTruncation::default();
    let eta = elliptic_selberg::specfun::dedekind_eta(&at, &trunc).unwrap();
    let th10 = ThetaLevel::new(1, 0, &at, &trunc).unwrap().eval(0.3.into(), 0, 0).unwrap();
    let rhs = block_constant(1, 5, 2).unwrap().value * eta.powf(-6.0 / 5.0) * theta1(0.3, &at).powu(2) * th10;
    assert!(rel(u(1, 5, 2, 0.3.into(), &at), rhs) < 1e-7);
}

#[test]
fn p2_kappa6_block_magnitude_matches_constant() {
    let at = pt(0.9);
    let t = std::time::Instant::now();
    let c = block_constant(2, 6, 3).unwrap().value;
    let ratio = u(2, 6, 3, 0.3.into(), &at) / (c * theta1(0.3, &at).powu(3));
    eprintln!("ratio {ratio} |r| {} arg/pi {} in {:?}", ratio.norm(), ratio.arg() / std::f64::consts::PI, t.elapsed());
    assert!((ratio.norm() - 1.0).abs() < 1e-4);
}

#[test]
fn block_periodicity_quasiperiodicity_and_parity() {
    let at = pt(0.9);
    let tau = at.tau();
    let l = Complex64::new(0.3, 0.0);
    let base = u(1, 5, 2, l, &at);
    assert!(rel(u(1, 5, 2, l + 2.0, &at), base) < 1e-5);
    let factor = (Complex64::new(0.0, -2.0 * std::f64::consts::PI * 5.0) * (l + tau)).exp();
    assert!(rel(u(1, 5, 2, l + tau * 2.0, &at), factor * base) < 1e-5);
    assert!(rel(u(1, 5, 2, -l, &at), base) < 1e-5);
}

#[test]
fn block_outside_the_basis_range_vanishes() {
    let at = pt(0.9);
    let zero = u(1, 4, 1, 0.3.into(), &at);
    let nonzero = u(1, 4, 2, 0.3.into(), &at);
    assert!(zero.norm() <= 1e-4 * nonzero.norm(), "{zero} vs {nonzero}");
}

#[test]
fn index_reflection_rule() {
    let at = pt(0.9);
    for (kappa, n) in [(5u32, 2i64), (6, 3)] {
        let phase = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * n as f64 / kappa as f64);
        let lhs = u(1, kappa, n, 0.41.into(), &at);
        let rhs = -phase * u(1, kappa, -n, 0.41.into(), &at);
        assert!(rel(lhs, rhs) < 1e-5, "kappa={kappa} n={n}");
    }
}

#[test]
fn block_basis_has_full_rank() {
    let at = pt(0.9);
    let grid: Vec<f64> = (0..12).map(|i| 0.05 + 0.9 * (i as f64 + 0.37) / 12.0).collect();
    for (kappa, dim) in [(5u32, 2usize), (6, 3)] {
        let sv = elliptic_selberg::blocks::basis_singular_values(1, kappa, &grid, &at, &QuadratureSpec::default())
            .unwrap();
        assert_eq!(sv.len(), dim);
        assert!(sv[dim - 1] > 1e-4 * sv[0], "kappa={kappa}: {sv:?}");
    }
}

#[test]
fn block_vanishes_to_order_p_plus_one_at_origin() {
    let at = pt(0.9);
    let lams: [f64; 3] = [1e-1, 1e-2, 1e-3];
    let logs: Vec<(f64, f64)> = lams
        .iter()
        .map(|&l| (l.ln(), u(1, 5, 2, l.into(), &at).norm().ln()))
        .collect();
    let n = logs.len() as f64;
    let (sx, sy): (f64, f64) = logs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    assert!(num / den >= 1.8, "slope {}", num / den);
}

#[test]
fn subtraction_orders_agree() {
    let at = pt(0.9);
    let idx = BlockIndex::new(1, 6, 2).unwrap();
    let arg = EllipticArgument::real(0.27, &at);
    let direct = QuadratureSpec {
        subtraction_order: 0,
        ..QuadratureSpec::default()
    };
    let a = u_block(&idx, &arg, &at, &QuadratureSpec::default()).unwrap();
    let b = u_block(&idx, &arg, &at, &direct).unwrap();
    assert!(rel(a.value, b.value) < 1e-8, "{} vs {}", a.value, b.value);
}

#[test]
fn mesh_refinement_stays_within_error_estimate() {
    let at = pt(0.6);
    let idx = BlockIndex::new(1, 8, 3).unwrap();
    let arg = EllipticArgument::real(0.55, &at);
    let base = QuadratureSpec::default();
    let fine = QuadratureSpec {
        graded_mesh_levels: 2 * base.graded_mesh_levels,
        ..base
    };
    let a = u_block(&idx, &arg, &at, &base).unwrap();
    let b = u_block(&idx, &arg, &at, &fine).unwrap();
    assert!((a.value - b.value).norm() < a.error_estimate, "{} vs {}", (a.value - b.value).norm(), a.error_estimate);
}

#[test]
fn leading_term_constant_equals_block_constant() {
    let c = block_constant(1, 4, 2).unwrap().value;
    assert!(rel(leading_term_constant(1).unwrap(), c) < 1e-10);
    assert!(leading_term_constant(2).unwrap().norm().is_finite());
}

#[test]
fn leading_term_matches_large_tau_ratio() {
    let lead = leading_term_constant(1).unwrap();
    for im in [2.0, 3.0] {
        let at = pt(im);
        let ratio = u(1, 4, 2, 0.3.into(), &at) / theta1(0.3, &at).powu(2);
        assert!(rel(ratio, lead) < 1e-3, "tau={im}i");
    }
}

#[test]
fn rejects_unsupported_inputs() {
    let at = pt(0.9);
    let quad = QuadratureSpec::default();
    let arg = EllipticArgument::real(0.3, &at);
    let idx = BlockIndex::new(3, 8, 4).unwrap();
    assert_eq!(u_block(&idx, &arg, &at, &quad).unwrap_err(), Error::UnsupportedP(3));
    let idx = BlockIndex::new(1, 5, 2).unwrap();
    let on_lattice = EllipticArgument::real(1.0, &at);
    assert!(matches!(u_block(&idx, &on_lattice, &at, &quad), Err(Error::PoleProximity { .. })));
    let tight = QuadratureSpec {
        max_evaluations: 100,
        ..quad
    };
    assert!(matches!(u_block(&idx, &arg, &at, &tight), Err(Error::QuadratureBudgetExceeded { .. })));
    assert!(BlockIndex::new(2, 5, 1).is_err());
}
