//! Double-precision theta functions, eta quotients and branch-tracked powers.

mod branch;
mod eta;
mod sigma;
mod theta;

pub use branch::{branched_pow, LogTracker};
pub use eta::{dedekind_eta, eta_log_derivative, phi, phi_log_derivative};
pub use sigma::{sigma_and_e, sigma_and_e_with_floor, SigmaE};
pub use theta::{theta1, theta_level, Theta1, ThetaLevel};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default minimum distance to the period lattice for arguments entering a
/// denominator ϑ₁.
pub const DEFAULT_LATTICE_FLOOR: f64 = 1e-6;

/// A point τ of the upper half plane and its nome q = e^{2πiτ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularPoint {
    tau: Complex64,
    q: Complex64,
    verification_regime: bool,
}

impl ModularPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tau must lie in the upper half plane, got {tau}"
            )));
        }
        Ok(Self {
            tau,
            q: nome_power(tau, 1.0),
            verification_regime: tau.im >= 0.5,
        })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    /// Im τ ≥ 1/2, where |q| ≤ e^{−π}.
    pub fn in_verification_regime(&self) -> bool {
        self.verification_regime
    }

    /// q^c computed as e^{2πicτ}.
    pub fn q_pow(&self, c: f64) -> Complex64 {
        nome_power(self.tau, c)
    }

    /// τ + shift.
    pub fn translated(&self, shift: f64) -> Result<Self> {
        Self::new(self.tau + shift)
    }

    /// −1/τ.
    pub fn inverted(&self) -> Result<Self> {
        Self::new(-1.0 / self.tau)
    }
}

fn nome_power(tau: Complex64, c: f64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI * c) * tau).exp()
}

/// An elliptic argument λ with its distance to ℤ + τℤ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticArgument {
    pub lambda: Complex64,
    pub lattice_distance: f64,
}

impl EllipticArgument {
    pub fn new(lambda: Complex64, pt: &ModularPoint) -> Self {
        Self {
            lambda,
            lattice_distance: lattice_distance(lambda, pt.tau()),
        }
    }

    pub fn real(lambda: f64, pt: &ModularPoint) -> Self {
        Self::new(Complex64::new(lambda, 0.0), pt)
    }
}

/// Minimum of |λ − m − nτ| over the lattice points surrounding λ.
pub fn lattice_distance(lambda: Complex64, tau: Complex64) -> f64 {
    let n0 = (lambda.im / tau.im).floor() as i64;
    let mut best = f64::INFINITY;
    for n in n0 - 1..=n0 + 2 {
        let shifted = lambda - tau * n as f64;
        let m0 = shifted.re.floor() as i64;
        for m in m0 - 1..=m0 + 2 {
            best = best.min((shifted - m as f64).norm());
        }
    }
    best
}

/// Stopping rule for the q-series and q-products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    /// Terms below tail_tolerance × (largest term so far) end the summation.
    pub tail_tolerance: f64,
    pub max_terms: usize,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self {
            tail_tolerance: 1e-18,
            max_terms: 400,
        }
    }
}

impl SeriesTruncation {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tolerance > 0.0) || self.max_terms == 0 {
            return Err(Error::InvalidParameter(format!(
                "invalid truncation: tail_tolerance {} max_terms {}",
                self.tail_tolerance, self.max_terms
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_lower_half_plane() {
        assert!(ModularPoint::new(Complex64::new(0.3, -0.1)).is_err());
        assert!(ModularPoint::new(Complex64::new(0.3, 0.0)).is_err());
    }

    #[test]
    fn regime_flag() {
        assert!(ModularPoint::new(Complex64::new(0.0, 0.5)).unwrap().in_verification_regime());
        assert!(!ModularPoint::new(Complex64::new(0.0, 0.3)).unwrap().in_verification_regime());
    }

    #[test]
    fn lattice_distance_examples() {
        let tau = Complex64::new(0.2, 0.9);
        assert!(lattice_distance(Complex64::new(0.3, 0.0), tau) - 0.3 < 1e-15);
        let near = tau * 2.0 + 3.0 + Complex64::new(1e-7, 0.0);
        assert!(lattice_distance(near, tau) < 2e-7);
    }
}
