use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::recipe::{ClosedForm, ThetaTerm};
use crate::error::{Error, Result};
use crate::specfun::{dedekind_eta, eta_log_derivative, ModularPoint, SeriesTruncation, Theta1, ThetaLevel};
use crate::transforms::{BlockFunction, Jet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KzbMode {
    AnalyticRhs,
    /// Central differences with step h, Richardson-extrapolated from h and h/2.
    FiniteDifference { h: f64 },
}

/// ϑ₁^{p+1} at level κ = 2p + 2.
pub fn theta1_power_function(p: usize) -> BlockFunction {
    let form = ClosedForm {
        constant: Complex64::new(1.0, 0.0),
        powers: vec![],
        theta1_power: (p + 1) as u32,
        thetas: vec![],
    };
    BlockFunction::with_jet(p, (2 * p + 2) as u32, move |l, pt| form.jet(l, pt))
}

/// θ^s_{κ,m} as a p = 0 function.
pub fn symmetric_theta_function(kappa: u32, m: i64) -> BlockFunction {
    let form = ClosedForm {
        constant: Complex64::new(1.0, 0.0),
        powers: vec![],
        theta1_power: 0,
        thetas: vec![ThetaTerm::sym(1.0, kappa, m)],
    };
    BlockFunction::with_jet(0, kappa, move |l, pt| form.jet(l, pt))
}

fn richardson(d: impl Fn(f64) -> Result<Complex64>, h: f64) -> Result<Complex64> {
    let coarse = d(h)?;
    let fine = d(h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

fn finite_difference_jet(f: &BlockFunction, lambda: Complex64, pt: &ModularPoint, h: f64) -> Result<Jet> {
    let value = f.eval(lambda, pt)?;
    let d_tau = richardson(
        |s| Ok((f.eval(lambda, &pt.translated(s)?)? - f.eval(lambda, &pt.translated(-s)?)?) / (2.0 * s)),
        h,
    )?;
    let d_lambda = richardson(|s| Ok((f.eval(lambda + s, pt)? - f.eval(lambda - s, pt)?) / (2.0 * s)), h)?;
    let d_lambda2 = richardson(
        |s| Ok((f.eval(lambda + s, pt)? - value * 2.0 + f.eval(lambda - s, pt)?) / (s * s)),
        h,
    )?;
    Ok(Jet {
        value,
        d_lambda,
        d_lambda2,
        d_tau,
    })
}

/// |2πiκ ∂_τ f − ∂²_λ f − p(p+1)ρ′f| over the largest of the three terms.
pub fn kzb_residual(f: &BlockFunction, lambda: Complex64, pt: &ModularPoint, mode: KzbMode) -> Result<f64> {
    let jet = match mode {
        KzbMode::AnalyticRhs => f.jet(lambda, pt).ok_or_else(|| {
            Error::InvalidParameter("analytic mode needs a closed-form function".into())
        })??,
        KzbMode::FiniteDifference { h } => {
            if !(h > 0.0) {
                return Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {h}")));
            }
            finite_difference_jet(f, lambda, pt, h)?
        }
    };
    let th = Theta1::new(pt, &SeriesTruncation::default());
    let t0 = th.eval(lambda, 0, 0)?;
    let t1 = th.eval(lambda, 1, 0)?;
    let t2 = th.eval(lambda, 2, 0)?;
    let rho_prime = (t2 * t0 - t1 * t1) / (t0 * t0);
    let heat = Complex64::new(0.0, 2.0 * PI * f.kappa as f64) * jet.d_tau;
    let potential = rho_prime * jet.value * (f.p * (f.p + 1)) as f64;
    let scale = heat.norm().max(jet.d_lambda2.norm()).max(potential.norm());
    Ok((heat - jet.d_lambda2 - potential).norm() / scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OdeCase {
    /// The λ → 0 limit, built on θ_{κ',j}(0).
    DelAt0,
    /// The λ → τ limit, built on θ_{κ',κ'−j}(0).
    Del3AtTau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OdeRecipe {
    /// η^{−3(p+1)/κ} at κ = 2p + 3.
    EtaPower,
    /// (4πθ_{2,1}(0)/ϑ₁'(0))^{2(p+1)/κ} at κ = 2p + 4.
    Theta21Power,
    /// ((2π)²(θ_{4,0}−θ_{4,4})³/ϑ₁'(0)²)^{2(p+1)/κ} at κ = 2p + 6.
    Theta4Power,
    /// ((2π)³(θ_{6,1}−θ_{6,5})⁵/ϑ₁'(0)³)^{2(p+1)/κ} at κ = 2p + 8.
    Theta6Power,
}

impl OdeRecipe {
    /// κ − 2p − 2.
    pub fn reduced_level(&self) -> u32 {
        match self {
            OdeRecipe::EtaPower => 1,
            OdeRecipe::Theta21Power => 2,
            OdeRecipe::Theta4Power => 4,
            OdeRecipe::Theta6Power => 6,
        }
    }

    /// Theta combinations (coef, j) at level κ' for which the recipe solves
    /// the equation.
    fn combinations(&self) -> Vec<Vec<(f64, i64)>> {
        match self {
            OdeRecipe::EtaPower => vec![vec![(1.0, 0)], vec![(1.0, 1)]],
            OdeRecipe::Theta21Power => vec![vec![(1.0, 1)]],
            OdeRecipe::Theta4Power => vec![vec![(1.0, 0), (-1.0, 4)]],
            OdeRecipe::Theta6Power => vec![vec![(1.0, 1), (-1.0, 5)]],
        }
    }
}

/// Θ(0) and dΘ(0)/dτ for Σ coef·θ_{κ',j}.
fn theta_combination(
    level: u32,
    combo: &[(f64, i64)],
    pt: &ModularPoint,
    trunc: &SeriesTruncation,
) -> Result<(Complex64, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    combo.iter().try_fold((zero, zero), |(v, d), &(c, j)| {
        let th = ThetaLevel::new(level, j, pt, trunc)?;
        Ok((v + th.eval(zero, 0, 0)? * c, d + th.eval(zero, 0, 1)? * c))
    })
}

/// c(τ) and c'(τ)/c(τ) for a recipe.
fn recipe_log_derivative(recipe: OdeRecipe, p: usize, kappa: u32, pt: &ModularPoint) -> Result<(Complex64, Complex64)> {
    let trunc = SeriesTruncation::default();
    let k = kappa as f64;
    let e = 2.0 * (p + 1) as f64 / k;
    let th = Theta1::new(pt, &trunc);
    let zero = Complex64::new(0.0, 0.0);
    let d0 = th.eval(zero, 1, 0)?;
    let dlog_d0 = th.eval(zero, 1, 1)? / d0;
    let base = |level: u32, combo: &[(f64, i64)], power: i32, scale: f64, d0_power: i32| -> Result<(Complex64, Complex64)> {
        let (v, dv) = theta_combination(level, combo, pt, &trunc)?;
        let x = v.powi(power) * scale / d0.powi(d0_power);
        let dlog = dv / v * power as f64 - dlog_d0 * d0_power as f64;
        Ok(((x.ln() * e).exp(), dlog * e))
    };
    match recipe {
        OdeRecipe::EtaPower => {
            let eta = dedekind_eta(pt, &trunc)?;
            let x = -3.0 * (p + 1) as f64 / k;
            Ok(((eta.ln() * x).exp(), eta_log_derivative(pt, &trunc)? * x))
        }
        OdeRecipe::Theta21Power => base(2, &[(1.0, 1)], 1, 4.0 * PI, 1),
        OdeRecipe::Theta4Power => base(4, &[(1.0, 0), (-1.0, 4)], 3, (2.0 * PI).powi(2), 2),
        OdeRecipe::Theta6Power => base(6, &[(1.0, 1), (-1.0, 5)], 5, (2.0 * PI).powi(3), 3),
    }
}

fn check_pairing(recipe: OdeRecipe, p: usize, kappa: u32) -> Result<()> {
    let want = 2 * p as u32 + 2 + recipe.reduced_level();
    if kappa != want {
        return Err(Error::InvalidParameter(format!(
            "{recipe:?} pairs with kappa = {want} at p = {p}, got {kappa}"
        )));
    }
    Ok(())
}

/// The recipe's c(τ).
pub fn ode_recipe_value(recipe: OdeRecipe, p: usize, kappa: u32, pt: &ModularPoint) -> Result<Complex64> {
    check_pairing(recipe, p, kappa)?;
    Ok(recipe_log_derivative(recipe, p, kappa, pt)?.0)
}

/// Residual of (κ/(p+1)) c'Θ = (2p+2−κ)(ln ϑ₁'(0))' cΘ + 2(κ−2p−3) cΘ̇ with
/// Θ at argument 0, normalized by the largest term; the worst over the
/// recipe's theta combinations.
pub fn ode_residual(case: OdeCase, kappa: u32, p: usize, recipe: OdeRecipe, pt: &ModularPoint) -> Result<f64> {
    check_pairing(recipe, p, kappa)?;
    let trunc = SeriesTruncation::default();
    let (_, c_dlog) = recipe_log_derivative(recipe, p, kappa, pt)?;
    let th = Theta1::new(pt, &trunc);
    let zero = Complex64::new(0.0, 0.0);
    let dlog_d0 = th.eval(zero, 1, 1)? / th.eval(zero, 1, 0)?;
    let level = recipe.reduced_level();
    let k = kappa as f64;
    let pf = p as f64;
    let mut worst: f64 = 0.0;
    for combo in recipe.combinations() {
        let combo: Vec<(f64, i64)> = match case {
            OdeCase::DelAt0 => combo,
            OdeCase::Del3AtTau => combo.into_iter().map(|(c, j)| (c, level as i64 - j)).collect(),
        };
        let (v, dv) = theta_combination(level, &combo, pt, &trunc)?;
        let lhs = c_dlog * v * (k / (pf + 1.0));
        let t1 = dlog_d0 * v * (2.0 * pf + 2.0 - k);
        let t2 = dv * (2.0 * (k - 2.0 * pf - 3.0));
        let scale = lhs.norm().max(t1.norm()).max(t2.norm());
        worst = worst.max((lhs - t1 - t2).norm() / scale);
    }
    Ok(worst)
}

