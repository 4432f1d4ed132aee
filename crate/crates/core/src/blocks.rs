//! Regularized evaluation of the integrals J_{p,κ,n} and the conformal blocks
//! u_{κ,n} = J(λ) + (−1)^{p+1} J(−λ) for p ≤ 2.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{is_degenerate_exponent, AffineFactor, IntervalPlan, QuadratureSpec, SimplexPlan};
use crate::selberg::{selberg_value, SelbergParams};
use crate::specfun::{
    EllipticArgument, LogTracker, ModularPoint, SeriesTruncation, Theta1, ThetaLevel,
    DEFAULT_LATTICE_FLOOR,
};

/// (p, κ, n) with κ ≥ 2p + 2 and n reduced to 0..2κ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockIndex {
    pub p: usize,
    pub kappa: u32,
    pub n: i64,
}

impl BlockIndex {
    pub fn new(p: usize, kappa: u32, n: i64) -> Result<Self> {
        if (kappa as usize) < 2 * p + 2 {
            return Err(Error::InvalidParameter(format!(
                "need kappa >= 2p + 2, got p={p}, kappa={kappa}"
            )));
        }
        Ok(Self {
            p,
            kappa,
            n: n.rem_euclid(2 * kappa as i64),
        })
    }

    /// a = −2p/κ − 1, the endpoint exponent of each integration variable.
    pub fn endpoint_exponent(&self) -> f64 {
        -2.0 * self.p as f64 / self.kappa as f64 - 1.0
    }

    /// 2/κ, the exponent of the pair factor.
    pub fn pair_exponent(&self) -> f64 {
        2.0 / self.kappa as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub budget_used: usize,
}

const LOG_GRID: usize = 513;

/// Precomputed pieces of the integrand at one (κ, n, τ).
struct Kernel {
    kappa: f64,
    theta1: Theta1,
    level: ThetaLevel,
    d0: Complex64,
    tracker: LogTracker,
}

impl Kernel {
    fn new(idx: &BlockIndex, pt: &ModularPoint, trunc: &SeriesTruncation) -> Result<Self> {
        let theta1 = Theta1::new(pt, trunc);
        let d0 = theta1.derivative_at_zero();
        let grid: Vec<f64> = (0..LOG_GRID).map(|k| 0.5 * k as f64 / (LOG_GRID - 1) as f64).collect();
        let values: Vec<Complex64> = grid
            .iter()
            .map(|&t| theta1.over_arg(t) / (d0 * (1.0 - t)))
            .collect();
        let tracker = LogTracker::new(grid, &values)?;
        Ok(Self {
            kappa: idx.kappa as f64,
            level: ThetaLevel::new(idx.kappa, idx.n, pt, trunc)?,
            theta1,
            d0,
            tracker,
        })
    }

    /// log G(t) with G(t) = ϑ₁(t)/(ϑ₁'(0) t(1−t)), continued from G(0) = 1.
    fn log_g(&self, t: f64) -> Complex64 {
        let s = t.min(1.0 - t).max(0.0);
        let v = self.theta1.over_arg(s) / (self.d0 * (1.0 - s));
        self.tracker.log(s, v)
    }

    /// ϑ₁(λ − t)/ϑ₁(λ).
    fn ratio(&self, lambda: Complex64, th_l: Complex64, t: f64) -> Result<Complex64> {
        Ok(self.theta1.value(lambda - t)? / th_l)
    }
}

fn check_lambda(lambda: &EllipticArgument) -> Result<()> {
    if lambda.lattice_distance < DEFAULT_LATTICE_FLOOR {
        return Err(Error::PoleProximity {
            argument: "lambda",
            distance: lambda.lattice_distance,
            floor: DEFAULT_LATTICE_FLOOR,
        });
    }
    Ok(())
}

fn check_budget(used: usize, quad: &QuadratureSpec) -> Result<()> {
    if used > quad.max_evaluations {
        return Err(Error::QuadratureBudgetExceeded {
            used,
            limit: quad.max_evaluations,
        });
    }
    Ok(())
}

/// J at each λ with one quadrature plan; returns values and evaluations.
fn j_values(
    idx: &BlockIndex,
    kernel: &Kernel,
    lambdas: &[Complex64],
    spec: &QuadratureSpec,
) -> Result<(Vec<Complex64>, usize)> {
    let a = Complex64::new(idx.endpoint_exponent(), 0.0);
    let k = kernel.kappa;
    match idx.p {
        0 => {
            let vals = lambdas.iter().map(|&l| kernel.level.eval(l, 0, 0)).collect::<Result<_>>()?;
            Ok((vals, lambdas.len()))
        }
        1 => {
            let plan = IntervalPlan::new(a, a, spec)?;
            check_budget(plan.len() * lambdas.len(), spec)?;
            let mut out = Vec::with_capacity(lambdas.len());
            for &lam in lambdas {
                let th_l = kernel.theta1.value(lam)?;
                let g = |t: f64| -> Result<Complex64> {
                    let theta = kernel.level.eval(lam + 2.0 * t / k, 0, 0)?;
                    Ok((a * kernel.log_g(t)).exp() * kernel.ratio(lam, th_l, t)? * theta)
                };
                let g0 = kernel.level.eval(lam, 0, 0)?;
                let g1 = -kernel.level.eval(lam + 2.0 / k, 0, 0)?;
                out.push(plan.integrate(g, g0, g1)?);
            }
            Ok((out, plan.len() * lambdas.len()))
        }
        2 => {
            let pair = idx.pair_exponent();
            let corner = Complex64::new(2.0 * a.re + pair + 1.0, 0.0);
            if is_degenerate_exponent(corner) {
                let h = spec.continuation_step;
                let mut acc = vec![Complex64::new(0.0, 0.0); lambdas.len()];
                let mut used = 0;
                for (shift, w) in [(h, 2.0 / 3.0), (-h, 2.0 / 3.0), (2.0 * h, -1.0 / 6.0), (-2.0 * h, -1.0 / 6.0)] {
                    let (v, n) = j2_values(kernel, a, pair + shift, lambdas, spec)?;
                    used += n;
                    for (s, x) in acc.iter_mut().zip(v) {
                        *s += x * w;
                    }
                }
                Ok((acc, used))
            } else {
                j2_values(kernel, a, pair, lambdas, spec)
            }
        }
        p => Err(Error::UnsupportedP(p)),
    }
}

fn j2_values(
    kernel: &Kernel,
    a: Complex64,
    pair: f64,
    lambdas: &[Complex64],
    spec: &QuadratureSpec,
) -> Result<(Vec<Complex64>, usize)> {
    let g = Complex64::new(pair, 0.0);
    let factors = [
        AffineFactor::new(0.0, 1.0, 0.0, a),
        AffineFactor::new(0.0, 0.0, 1.0, a),
        AffineFactor::new(1.0, -1.0, 0.0, a),
        AffineFactor::new(1.0, 0.0, -1.0, a),
        AffineFactor::new(0.0, 1.0, -1.0, g),
        AffineFactor::new(1.0, -1.0, 1.0, g),
    ];
    let plan = SimplexPlan::new(&factors, spec)?;
    check_budget(plan.len() * lambdas.len(), spec)?;
    let k = kernel.kappa;
    let mut out = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let th_l = kernel.theta1.value(lam)?;
        let phi = |t: [f64; 2]| -> Result<Complex64> {
            let [t1, t2] = t;
            let log = a * (kernel.log_g(t1) + kernel.log_g(t2)) + g * kernel.log_g(t1 - t2);
            let theta = kernel.level.eval(lam + 2.0 * (t1 + t2) / k, 0, 0)?;
            Ok(log.exp() * kernel.ratio(lam, th_l, t1)? * kernel.ratio(lam, th_l, t2)? * theta)
        };
        out.push(plan.integrate(phi)?);
    }
    Ok((out, plan.len() * lambdas.len()))
}

/// Values at `spec` and at its coarser companion, with evaluations used.
fn with_estimate(
    idx: &BlockIndex,
    lambdas: &[Complex64],
    pt: &ModularPoint,
    quad: &QuadratureSpec,
) -> Result<(Vec<Complex64>, Vec<Complex64>, usize)> {
    quad.validate()?;
    if idx.p > 2 {
        return Err(Error::UnsupportedP(idx.p));
    }
    let kernel = Kernel::new(idx, pt, &SeriesTruncation::default())?;
    let (fine, n1) = j_values(idx, &kernel, lambdas, quad)?;
    if idx.p == 0 {
        return Ok((fine.clone(), fine, n1));
    }
    let (coarse, n2) = j_values(idx, &kernel, lambdas, &quad.coarser())?;
    check_budget(n1 + n2, quad)?;
    Ok((fine, coarse, n1 + n2))
}

/// The regularized integral J_{p,κ,n}(λ, τ).
pub fn j_integral(
    idx: &BlockIndex,
    lambda: &EllipticArgument,
    pt: &ModularPoint,
    quad: &QuadratureSpec,
) -> Result<BlockValue> {
    check_lambda(lambda)?;
    let (fine, coarse, used) = with_estimate(idx, &[lambda.lambda], pt, quad)?;
    let value = fine[0];
    Ok(BlockValue {
        value,
        error_estimate: (value - coarse[0]).norm().max(1e-12 * value.norm() + 1e-15),
        budget_used: used,
    })
}

/// u_{κ,n}(λ, τ) = J(λ) + (−1)^{p+1} J(−λ).
pub fn u_block(
    idx: &BlockIndex,
    lambda: &EllipticArgument,
    pt: &ModularPoint,
    quad: &QuadratureSpec,
) -> Result<BlockValue> {
    check_lambda(lambda)?;
    let l = lambda.lambda;
    let (fine, coarse, used) = with_estimate(idx, &[l, -l], pt, quad)?;
    let sign = if idx.p.is_multiple_of(2) { -1.0 } else { 1.0 };
    let value = fine[0] + fine[1] * sign;
    let rough = coarse[0] + coarse[1] * sign;
    let floor = 1e-12 * (fine[0].norm() + fine[1].norm()) + 1e-15;
    Ok(BlockValue {
        value,
        error_estimate: (value - rough).norm().max(floor),
        budget_used: used,
    })
}

/// The predicted q → 0 limit of u_{2p+2,p+1}/ϑ₁^{p+1}.
pub fn leading_term_constant(p: usize) -> Result<Complex64> {
    if p == 0 {
        return Err(Error::InvalidParameter("leading term constant needs p >= 1".into()));
    }
    let pf = p as f64;
    let k = 2.0 * pf + 2.0;
    let b = selberg_value(&SelbergParams::real(p, (pf + 2.0) / k, -2.0 * pf / k, 1.0 / k))?;
    let mut ip = b / Complex64::new(0.0, 2.0 * PI).powf(pf);
    for j in 1..=p {
        ip *= Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + pf + 1.0) / k) - 1.0;
    }
    let x = pf * (pf + 1.0) / k + pf;
    let power = (2.0 * PI).powf(x) * Complex64::from_polar(1.0, PI * x / 2.0);
    Ok(Complex64::new(0.0, 1.0).powi(p as i32 + 1)
        * power
        * Complex64::from_polar(1.0, -PI * (2.0 * pf * pf / k + pf))
        * ip)
}

/// Singular values, largest first, of the matrix (u_{κ,n}(λᵢ))_{i,n} over
/// p+1 ≤ n ≤ κ−p−1.
pub fn basis_singular_values(
    p: usize,
    kappa: u32,
    grid: &[f64],
    pt: &ModularPoint,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let indices: Vec<i64> = (p as i64 + 1..=kappa as i64 - p as i64 - 1).collect();
    let mut m = DMatrix::<Complex64>::zeros(grid.len(), indices.len());
    for (col, &n) in indices.iter().enumerate() {
        let idx = BlockIndex::new(p, kappa, n)?;
        for (row, &l) in grid.iter().enumerate() {
            m[(row, col)] = u_block(&idx, &EllipticArgument::real(l, pt), pt, quad)?.value;
        }
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}
