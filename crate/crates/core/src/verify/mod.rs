//! The ten elliptic Selberg identities, the heat-equation residual and the
//! first-order equations for the prefactors c(τ).

mod pde;
mod recipe;

pub use pde::{kzb_residual, ode_recipe_value, ode_residual, theta1_power_function, symmetric_theta_function, KzbMode, OdeCase, OdeRecipe};
pub use recipe::{ClosedForm, ModularFactor, ThetaTerm};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::blocks::{u_block, BlockIndex};
use crate::error::{Error, Result};
use crate::macdonald::{block_indices, modular_matrices};
use crate::quadrature::QuadratureSpec;
use crate::selberg::block_constant;
use crate::specfun::{EllipticArgument, ModularPoint};
use crate::transforms::{apply_transform, BlockFunction, Transform};

/// Default λ-grid for identity checks.
pub const DEFAULT_GRID: [f64; 6] = [0.13, 0.27, 0.41, 0.55, 0.69, 0.83];

/// |rhs| below this fraction of the grid maximum switches to an absolute test.
const ZERO_RHS: f64 = 1e-12;

/// One of the ten identities, numbered 1 to 10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityId(u8);

fn phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * x)
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl IdentityId {
    pub fn new(id: u8) -> Result<Self> {
        if !(1..=10).contains(&id) {
            return Err(Error::InvalidParameter(format!("identity id must be 1..10, got {id}")));
        }
        Ok(Self(id))
    }

    pub fn all() -> impl Iterator<Item = IdentityId> {
        (1..=10).map(IdentityId)
    }

    pub fn number(&self) -> u8 {
        self.0
    }

    pub fn name(&self) -> String {
        format!("identity-{}", self.0)
    }

    pub fn kappa(&self, p: usize) -> u32 {
        let shift = [2, 3, 3, 4, 4, 4, 6, 6, 6, 8][self.0 as usize - 1];
        (2 * p + shift) as u32
    }

    /// (coefficient, n) pairs of the block combination on the left.
    pub fn lhs_terms(&self, p: usize) -> Vec<(Complex64, i64)> {
        let k = self.kappa(p) as f64;
        let pi = p as i64;
        let pf = p as f64;
        let one = Complex64::new(1.0, 0.0);
        let pair = |first: i64, second: i64, s: f64| {
            vec![(one, first), (phase(2.0 * pf * first as f64 / k) * s, second)]
        };
        match self.0 {
            1 | 2 => vec![(one, pi + 1)],
            3 | 4 => vec![(one, pi + 2)],
            5 => pair(pi + 1, pi + 3, sign(p + 1)),
            6 => pair(pi + 1, pi + 3, sign(p)),
            7 => pair(pi + 1, pi + 5, sign(p + 1)),
            8 => pair(pi + 2, pi + 4, sign(p)),
            9 => pair(pi + 2, pi + 4, sign(p + 1)),
            _ => pair(pi + 2, pi + 6, sign(p + 1)),
        }
    }

    /// The closed-form right-hand side.
    pub fn rhs(&self, p: usize) -> Result<ClosedForm> {
        let kappa = self.kappa(p);
        let k = kappa as f64;
        let q = (p + 1) as f64;
        let c = |n: usize| -> Result<Complex64> { Ok(block_constant(p, kappa, n as i64)?.value) };
        use ModularFactor::{Eta, Phi};
        let (constant, powers, thetas) = match self.0 {
            1 => (c(p + 1)?, vec![], vec![]),
            2 => (c(p + 1)?, vec![(Eta, -3.0 * q / k)], vec![ThetaTerm::plain(1.0, 1, 0)]),
            3 => (c(p + 2)?, vec![(Eta, -3.0 * q / k)], vec![ThetaTerm::plain(1.0, 1, 1)]),
            4 => {
                let x = 4.0 * q / k;
                (
                    c(p + 2)? * 2f64.powf(-2.0 * q / k),
                    vec![(Phi(3), x), (Eta, -x)],
                    vec![ThetaTerm::sym(1.0, 2, 1)],
                )
            }
            5 | 6 => {
                let x = 4.0 * q / k;
                let (f, s) = if self.0 == 5 { (2, -1.0) } else { (1, 1.0) };
                (
                    c(p + 1)?,
                    vec![(Phi(f), x), (Eta, -x)],
                    vec![ThetaTerm::plain(1.0, 2, 0), ThetaTerm::plain(s, 2, 2)],
                )
            }
            7 => {
                let y = -6.0 * q / k;
                (
                    c(p + 1)? * 2f64.powf(3.0 * q / k),
                    vec![(Phi(3), y), (Eta, y)],
                    vec![ThetaTerm::plain(1.0, 4, 0), ThetaTerm::plain(-1.0, 4, 4)],
                )
            }
            8 | 9 => {
                let y = -6.0 * q / k;
                let (f, s) = if self.0 == 8 { (2, 1.0) } else { (1, -1.0) };
                (
                    c(p + 2)?,
                    vec![(Phi(f), y), (Eta, y)],
                    vec![ThetaTerm::sym(1.0, 4, 1), ThetaTerm::sym(s, 4, 3)],
                )
            }
            _ => (
                c(p + 2)?,
                vec![(Eta, -8.0 * q / k)],
                vec![ThetaTerm::sym(1.0, 6, 1), ThetaTerm::sym(-1.0, 6, 5)],
            ),
        };
        Ok(ClosedForm {
            constant,
            powers,
            theta1_power: (p + 1) as u32,
            thetas,
        })
    }

    /// Tolerance ladder: 1e-5 for p = 1 with κ ≤ 6, otherwise 1e-4.
    pub fn default_tolerance(&self, p: usize) -> f64 {
        if p == 1 && self.kappa(p) <= 6 {
            1e-5
        } else {
            1e-4
        }
    }
}

/// The right-hand side of an identity at (λ, τ).
pub fn rhs_value(id: IdentityId, p: usize, lambda: Complex64, pt: &ModularPoint) -> Result<Complex64> {
    if p == 0 {
        return Err(Error::InvalidParameter("identities need p >= 1".into()));
    }
    id.rhs(p)?.value(lambda, pt)
}

/// The right-hand side as a function with analytic derivatives.
pub fn rhs_function(id: IdentityId, p: usize) -> Result<BlockFunction> {
    if p == 0 {
        return Err(Error::InvalidParameter("identities need p >= 1".into()));
    }
    let form = id.rhs(p)?;
    Ok(BlockFunction::with_jet(p, id.kappa(p), move |l, pt| form.jet(l, pt)))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportInputs {
    pub p: usize,
    pub kappa: u32,
    pub tau: Complex64,
    pub lambda_grid: Vec<f64>,
    pub quad: QuadratureSpec,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointResult {
    pub lambda: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
}

/// Comparison of the default run with a refined quadrature run.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementCheck {
    pub refined_quad: QuadratureSpec,
    pub max_change: f64,
    pub max_error_estimate: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub inputs: ReportInputs,
    pub points: Vec<PointResult>,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub refinement: RefinementCheck,
    pub pass: bool,
    pub budget: usize,
}

/// Σ cₙ u_{κ,n}(λ) with its error estimate and evaluations used.
fn lhs_value(
    p: usize,
    kappa: u32,
    terms: &[(Complex64, i64)],
    arg: &EllipticArgument,
    pt: &ModularPoint,
    quad: &QuadratureSpec,
) -> Result<(Complex64, f64, usize)> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut used = 0;
    for (c, n) in terms {
        let b = u_block(&BlockIndex::new(p, kappa, *n)?, arg, pt, quad)?;
        value += c * b.value;
        err += c.norm() * b.error_estimate;
        used += b.budget_used;
    }
    Ok((value, err, used))
}

/// Compares a block combination with a closed form on a λ-grid.
#[allow(clippy::too_many_arguments)]
pub fn verify_combination(
    name: String,
    p: usize,
    kappa: u32,
    lhs: &[(Complex64, i64)],
    rhs: &[ClosedForm],
    lambda_grid: &[f64],
    pt: &ModularPoint,
    quad: &QuadratureSpec,
    tol: f64,
) -> Result<VerificationReport> {
    let refined = quad.refined();
    let rows: Vec<_> = lambda_grid
        .par_iter()
        .map(|&l| -> Result<_> {
            let arg = EllipticArgument::real(l, pt);
            let (v, err, n1) = lhs_value(p, kappa, lhs, &arg, pt, quad)?;
            let (vr, _, n2) = lhs_value(p, kappa, lhs, &arg, pt, &refined)?;
            let r = rhs.iter().try_fold(Complex64::new(0.0, 0.0), |acc, f| Ok(acc + f.value(l.into(), pt)?))?;
            Ok((l, v, err, vr, r, n1 + n2))
        })
        .collect::<Result<_>>()?;
    let scale = rows.iter().map(|r| r.4.norm()).fold(0.0, f64::max);
    let mut points = Vec::with_capacity(rows.len());
    let (mut max_change, mut max_est, mut agree, mut budget) = (0.0f64, 0.0f64, true, 0);
    for (l, v, err, vr, r, used) in rows {
        let abs_err = (v - r).norm();
        let rel_err = abs_err / r.norm();
        let pass = if r.norm() <= ZERO_RHS * scale {
            abs_err <= tol * scale
        } else {
            rel_err <= tol
        };
        let change = (v - vr).norm();
        max_change = max_change.max(change);
        max_est = max_est.max(err);
        agree &= change <= err;
        budget += used;
        points.push(PointResult {
            lambda: l,
            lhs: v,
            rhs: r,
            abs_err,
            rel_err,
            pass,
        });
    }
    let max_abs_err = points.iter().map(|p| p.abs_err).fold(0.0, f64::max);
    let max_rel_err = points.iter().map(|p| p.rel_err).fold(0.0, f64::max);
    let pass = agree && points.iter().all(|p| p.pass);
    Ok(VerificationReport {
        name,
        inputs: ReportInputs {
            p,
            kappa,
            tau: pt.tau(),
            lambda_grid: lambda_grid.to_vec(),
            quad: *quad,
            tol,
        },
        points,
        max_abs_err,
        max_rel_err,
        refinement: RefinementCheck {
            refined_quad: refined,
            max_change,
            max_error_estimate: max_est,
            agree,
        },
        pass,
        budget,
    })
}

/// Checks one identity pointwise. Supported: p = 1 for every id, p = 2 for id 1.
pub fn verify_identity(
    id: IdentityId,
    p: usize,
    lambda_grid: &[f64],
    pt: &ModularPoint,
    quad: &QuadratureSpec,
    tol: Option<f64>,
) -> Result<VerificationReport> {
    match (p, id.number()) {
        (1, _) | (2, 1) => {}
        (0, _) => return Err(Error::InvalidParameter("identities need p >= 1".into())),
        _ => {
            return Err(Error::OutOfSupportedRange(format!(
                "{} is checked for p = 1 only (p = 2 only for identity 1), got p = {p}",
                id.name()
            )))
        }
    }
    let tol = tol.unwrap_or_else(|| id.default_tolerance(p));
    verify_combination(
        format!("{}/p={p}", id.name()),
        p,
        id.kappa(p),
        &id.lhs_terms(p),
        &[id.rhs(p)?],
        lambda_grid,
        pt,
        quad,
        tol,
    )
}

/// 2u_{κ,p+1} against the sum of the right-hand sides of identities 5 and 6.
pub fn verify_sum_of_five_and_six(
    p: usize,
    lambda_grid: &[f64],
    pt: &ModularPoint,
    quad: &QuadratureSpec,
    tol: f64,
) -> Result<VerificationReport> {
    let five = IdentityId(5);
    let six = IdentityId(6);
    verify_combination(
        format!("identity-5-plus-6/p={p}"),
        p,
        five.kappa(p),
        &[(Complex64::new(2.0, 0.0), p as i64 + 1)],
        &[five.rhs(p)?, six.rhs(p)?],
        lambda_grid,
        pt,
        quad,
        tol,
    )
}

/// RHS_a(λ, τ+1) against the predicted phase times RHS_b(λ, τ).
#[derive(Debug, Clone, Serialize)]
pub struct PairingCheck {
    pub name: String,
    pub translated: Complex64,
    pub predicted: Complex64,
    pub rel_err: f64,
}

/// T maps the right-hand side of identity 5 onto that of 6 and 8 onto 9,
/// up to e^{πi m²/(2κ)} with m = p+1 and p+2 respectively.
pub fn t_pairing(first: u8, p: usize, lambda: f64, pt: &ModularPoint) -> Result<PairingCheck> {
    let (a, b, m) = match first {
        5 => (IdentityId(5), IdentityId(6), p + 1),
        8 => (IdentityId(8), IdentityId(9), p + 2),
        _ => return Err(Error::InvalidParameter(format!("T-pairs start at 5 or 8, got {first}"))),
    };
    let k = a.kappa(p) as f64;
    let l = Complex64::new(lambda, 0.0);
    let translated = a.rhs(p)?.value(l, &pt.translated(1.0)?)?;
    let predicted = phase((m * m) as f64 / (2.0 * k)) * b.rhs(p)?.value(l, pt)?;
    Ok(PairingCheck {
        name: format!("{}-to-{}/p={p}", a.name(), b.name()),
        translated,
        predicted,
        rel_err: (translated - predicted).norm() / predicted.norm(),
    })
}

/// The block combination of identity 10 as an eigenvector of S, compared
/// with S applied to its closed form.
#[derive(Debug, Clone, Serialize)]
pub struct EigenCheck {
    pub eigenvalue: Complex64,
    pub eigen_residual: f64,
    pub ratios: Vec<Complex64>,
    pub max_ratio_deviation: f64,
}

pub fn s_eigen_check(p: usize, lambda_grid: &[f64], pt: &ModularPoint) -> Result<EigenCheck> {
    let id = IdentityId(10);
    let kappa = id.kappa(p);
    let (_, s) = modular_matrices(p, kappa)?;
    let idx = block_indices(p, kappa);
    let mut w = nalgebra::DVector::<Complex64>::zeros(idx.len());
    for (c, n) in id.lhs_terms(p) {
        let pos = idx.iter().position(|&m| m == n).expect("index in basis range");
        w[pos] = c;
    }
    let sw = &s.entries * &w;
    let lead = idx.iter().position(|&m| m == p as i64 + 2).expect("index in basis range");
    let eigenvalue = sw[lead] / w[lead];
    let eigen_residual = (&sw - &w * eigenvalue).norm() / w.norm();
    let f = rhs_function(id, p)?;
    let ratios = lambda_grid
        .iter()
        .map(|&l| {
            let l = Complex64::new(l, 0.0);
            Ok(apply_transform(Transform::S, &f, l, pt)? / f.eval(l, pt)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio_deviation = ratios
        .iter()
        .map(|r| (r - eigenvalue).norm() / eigenvalue.norm())
        .fold(0.0, f64::max);
    Ok(EigenCheck {
        eigenvalue,
        eigen_residual,
        ratios,
        max_ratio_deviation,
    })
}
