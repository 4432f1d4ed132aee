use num_complex::Complex64;
use std::f64::consts::{PI, SQRT_2};

use super::{ModularPoint, SeriesTruncation};
use crate::error::{Error, Result};

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// ∏_{j≥1} (1 + sign·q^{j−offset}) and its τ-log-derivative.
fn product(
    pt: &ModularPoint,
    offset: f64,
    sign: f64,
    trunc: &SeriesTruncation,
) -> Result<(Complex64, Complex64)> {
    trunc.validate()?;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut dlog = Complex64::new(0.0, 0.0);
    for j in 1..=trunc.max_terms {
        let e = j as f64 - offset;
        let qe = pt.q_pow(e) * sign;
        prod *= 1.0 + qe;
        dlog += TWO_PI_I * e * qe / (1.0 + qe);
        if qe.norm() * (1.0 + e) <= trunc.tail_tolerance {
            return Ok((prod, dlog));
        }
    }
    Err(Error::NonConvergence {
        what: "q-product",
        max_terms: trunc.max_terms,
    })
}

/// η(τ) = q^{1/24} ∏ (1 − q^j).
pub fn dedekind_eta(pt: &ModularPoint, trunc: &SeriesTruncation) -> Result<Complex64> {
    let (p, _) = product(pt, 0.0, -1.0, trunc)?;
    Ok(pt.q_pow(1.0 / 24.0) * p)
}

/// d/dτ log η(τ).
pub fn eta_log_derivative(pt: &ModularPoint, trunc: &SeriesTruncation) -> Result<Complex64> {
    let (_, d) = product(pt, 0.0, -1.0, trunc)?;
    Ok(TWO_PI_I / 24.0 + d)
}

fn phi_parts(k: u8, pt: &ModularPoint, trunc: &SeriesTruncation) -> Result<(Complex64, Complex64)> {
    let (lead, lead_exp, offset, sign) = match k {
        1 => (1.0, -1.0 / 48.0, 0.5, 1.0),
        2 => (1.0, -1.0 / 48.0, 0.5, -1.0),
        3 => (SQRT_2, 1.0 / 24.0, 0.0, 1.0),
        _ => {
            return Err(Error::InvalidParameter(format!("phi index must be 1, 2 or 3, got {k}")))
        }
    };
    let (p, d) = product(pt, offset, sign, trunc)?;
    Ok((pt.q_pow(lead_exp) * p * lead, TWO_PI_I * lead_exp + d))
}

/// φ₁, φ₂, φ₃ from their q-products.
pub fn phi(k: u8, pt: &ModularPoint, trunc: &SeriesTruncation) -> Result<Complex64> {
    phi_parts(k, pt, trunc).map(|(v, _)| v)
}

/// d/dτ log φ_k(τ).
pub fn phi_log_derivative(k: u8, pt: &ModularPoint, trunc: &SeriesTruncation) -> Result<Complex64> {
    phi_parts(k, pt, trunc).map(|(_, d)| d)
}
