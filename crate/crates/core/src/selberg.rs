//! Selberg integrals: Gamma-product closed form, quadrature oracle, and the
//! block normalization constants built from them.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gamma::{is_gamma_pole, ln_gamma};
use crate::quadrature::{AffineFactor, IntervalPlan, QuadratureSpec, SimplexPlan};

/// Parameters (p; α, β, γ) of the Selberg integral over the simplex
/// 0 ≤ t_p ≤ … ≤ t₁ ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelbergParams {
    pub p: usize,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

impl SelbergParams {
    pub fn new(p: usize, alpha: Complex64, beta: Complex64, gamma: Complex64) -> Self {
        Self {
            p,
            alpha,
            beta,
            gamma,
        }
    }

    pub fn real(p: usize, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::new(p, alpha.into(), beta.into(), gamma.into())
    }
}

/// Closed form (1/p!) ∏ⱼ Γ(1+γ+jγ)Γ(α+jγ)Γ(β+jγ) / (Γ(1+γ)Γ(α+β+(p+j−1)γ)).
/// A denominator pole makes the value zero; a numerator pole is an error.
pub fn selberg_value(params: &SelbergParams) -> Result<Complex64> {
    let SelbergParams {
        p,
        alpha,
        beta,
        gamma,
    } = *params;
    let mut log = Complex64::new(0.0, 0.0);
    for j in 0..p {
        let jf = j as f64;
        let numer: [(&'static str, Complex64); 2] = [
            ("Gamma(alpha + j gamma)", alpha + gamma * jf),
            ("Gamma(beta + j gamma)", beta + gamma * jf),
        ];
        for (name, z) in numer {
            log += ln_gamma(z).ok_or(Error::GammaPole { factor: name, j })?;
        }
        if j > 0 {
            let z = 1.0 + gamma + gamma * jf;
            log += ln_gamma(z).ok_or(Error::GammaPole {
                factor: "Gamma(1 + gamma + j gamma)",
                j,
            })?;
            match ln_gamma(1.0 + gamma) {
                Some(l) => log -= l,
                None => return Ok(Complex64::new(0.0, 0.0)),
            }
        }
        let den = alpha + beta + gamma * (p as f64 + jf - 1.0);
        if is_gamma_pole(den) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        log -= ln_gamma(den).expect("pole excluded above");
    }
    let factorial: f64 = (1..=p).map(|k| k as f64).product();
    Ok(log.exp() / factorial)
}

/// A quadrature value with a mesh-comparison error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Direct quadrature of the Selberg integral for p ≤ 2, with finite-part
/// regularization of endpoint exponents in (−2, −1).
pub fn selberg_oracle(params: &SelbergParams, quad: &QuadratureSpec) -> Result<OracleValue> {
    let SelbergParams {
        p,
        alpha,
        beta,
        gamma,
    } = *params;
    if p > 2 {
        return Err(Error::OutOfSupportedRange(format!("oracle supports p <= 2, got {p}")));
    }
    if !(alpha.re > -1.0 && beta.re > -1.0 && gamma.re >= 0.0) {
        return Err(Error::OutOfSupportedRange(format!(
            "oracle needs Re alpha > -1, Re beta > -1, Re gamma >= 0; got {alpha}, {beta}, {gamma}"
        )));
    }
    let run = |spec: &QuadratureSpec| -> Result<(Complex64, usize)> {
        match p {
            0 => Ok((Complex64::new(1.0, 0.0), 0)),
            1 => {
                let plan = IntervalPlan::new(alpha - 1.0, beta - 1.0, spec)?;
                let one = Complex64::new(1.0, 0.0);
                let v = plan.apply(&vec![one; plan.len()], one, one);
                Ok((v, plan.len()))
            }
            _ => {
                let factors = [
                    AffineFactor::new(0.0, 1.0, 0.0, alpha - 1.0),
                    AffineFactor::new(0.0, 0.0, 1.0, alpha - 1.0),
                    AffineFactor::new(1.0, -1.0, 0.0, beta - 1.0),
                    AffineFactor::new(1.0, 0.0, -1.0, beta - 1.0),
                    AffineFactor::new(0.0, 1.0, -1.0, gamma * 2.0),
                ];
                let plan = SimplexPlan::new(&factors, spec)?;
                let one = Complex64::new(1.0, 0.0);
                Ok((plan.apply(&vec![one; plan.len()]), plan.len()))
            }
        }
    };
    let (value, n) = run(quad)?;
    if n > quad.max_evaluations {
        return Err(Error::QuadratureBudgetExceeded {
            used: n,
            limit: quad.max_evaluations,
        });
    }
    let (coarse, nc) = run(&quad.coarser())?;
    Ok(OracleValue {
        value,
        error_estimate: (value - coarse).norm().max(1e-15 * value.norm()),
        evaluations: n + nc,
    })
}

/// c_{κ,n} together with its indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockConstant {
    pub p: usize,
    pub kappa: u32,
    pub n: i64,
    pub value: Complex64,
}

fn phase(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * x)
}

/// c_{κ,n} = (2π)^{p(p+1)/κ} e^{−πip(3p−1)/(2κ)} e^{πi(p+1)/2}
/// · B_p((n+1)/κ, −2p/κ, 1/κ) · ∏ⱼ (1 − e^{2πi(n+j)/κ}), using the positive
/// real root of 2π.
pub fn block_constant(p: usize, kappa: u32, n: i64) -> Result<BlockConstant> {
    let k = kappa as f64;
    if (kappa as usize) < 2 * p + 2 {
        return Err(Error::InvalidParameter(format!(
            "block constant needs kappa >= 2p + 2, got p={p}, kappa={kappa}"
        )));
    }
    if n < 0 || n > kappa as i64 {
        return Err(Error::InvalidParameter(format!(
            "block constant needs 0 <= n <= kappa, got n={n}"
        )));
    }
    let pf = p as f64;
    let b = selberg_value(&SelbergParams::real(
        p,
        (n as f64 + 1.0) / k,
        -2.0 * pf / k,
        1.0 / k,
    ))?;
    let mut value = (2.0 * PI).powf(pf * (pf + 1.0) / k)
        * phase(-pf * (3.0 * pf - 1.0) / (2.0 * k))
        * phase((pf + 1.0) / 2.0)
        * b;
    for j in 1..=p {
        value *= 1.0 - phase(2.0 * (n as f64 + j as f64) / k);
    }
    Ok(BlockConstant { p, kappa, n, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_beta_half_half() {
        let v = selberg_value(&SelbergParams::real(1, 0.5, 0.5, 0.3)).unwrap();
        assert!((v - PI).norm() < 1e-13);
    }

    #[test]
    fn p2_unit_parameters() {
        let v = selberg_value(&SelbergParams::real(2, 1.0, 1.0, 1.0)).unwrap();
        assert!((v - 1.0 / 12.0).norm() < 1e-14);
    }

    #[test]
    fn numerator_pole_is_named() {
        let e = selberg_value(&SelbergParams::real(2, -1.0, 0.5, 0.5)).unwrap_err();
        assert_eq!(
            e,
            Error::GammaPole {
                factor: "Gamma(alpha + j gamma)",
                j: 0
            }
        );
    }

    #[test]
    fn p0_constant_is_i() {
        let c = block_constant(0, 3, 1).unwrap().value;
        assert!((c - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }
}
