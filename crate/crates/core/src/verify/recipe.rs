use num_complex::Complex64;

use crate::error::Result;
use crate::specfun::{
    dedekind_eta, eta_log_derivative, phi, phi_log_derivative, ModularPoint, SeriesTruncation, Theta1,
    ThetaLevel,
};
use crate::transforms::Jet;

/// τ-dependent factors raised to real powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModularFactor {
    Eta,
    Phi(u8),
}

impl ModularFactor {
    fn log_and_derivative(&self, pt: &ModularPoint, trunc: &SeriesTruncation) -> Result<(Complex64, Complex64)> {
        Ok(match *self {
            ModularFactor::Eta => (dedekind_eta(pt, trunc)?.ln(), eta_log_derivative(pt, trunc)?),
            ModularFactor::Phi(k) => (phi(k, pt, trunc)?.ln(), phi_log_derivative(k, pt, trunc)?),
        })
    }
}

/// c·θ_{κ,n}(λ) or c·θ^s_{κ,n}(λ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTerm {
    pub coef: Complex64,
    pub kappa: u32,
    pub n: i64,
    pub symmetrized: bool,
}

impl ThetaTerm {
    pub fn plain(coef: f64, kappa: u32, n: i64) -> Self {
        Self {
            coef: coef.into(),
            kappa,
            n,
            symmetrized: false,
        }
    }

    pub fn sym(coef: f64, kappa: u32, n: i64) -> Self {
        Self {
            symmetrized: true,
            ..Self::plain(coef, kappa, n)
        }
    }
}

/// C · ∏ fᵢ(τ)^{eᵢ} · ϑ₁(λ)^m · Σ θ-terms, with an empty theta sum read as 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    pub constant: Complex64,
    pub powers: Vec<(ModularFactor, f64)>,
    pub theta1_power: u32,
    pub thetas: Vec<ThetaTerm>,
}

impl ClosedForm {
    pub fn value(&self, lambda: Complex64, pt: &ModularPoint) -> Result<Complex64> {
        Ok(self.jet(lambda, pt)?.value)
    }

    /// Value and analytic derivatives; fractional powers use the principal
    /// logarithm of each factor.
    pub fn jet(&self, lambda: Complex64, pt: &ModularPoint) -> Result<Jet> {
        let trunc = SeriesTruncation::default();
        let mut log = Complex64::new(0.0, 0.0);
        let mut dlog = Complex64::new(0.0, 0.0);
        for (f, e) in &self.powers {
            let (l, d) = f.log_and_derivative(pt, &trunc)?;
            log += l * e;
            dlog += d * e;
        }
        let pre = self.constant * log.exp();
        let pre_t = pre * dlog;

        let m = self.theta1_power;
        let (f, f1, f2, ft) = if m == 0 {
            (Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default(), Complex64::default())
        } else {
            let th = Theta1::new(pt, &trunc);
            let t0 = th.eval(lambda, 0, 0)?;
            let t1 = th.eval(lambda, 1, 0)?;
            let t2 = th.eval(lambda, 2, 0)?;
            let tt = th.eval(lambda, 0, 1)?;
            let mf = m as f64;
            let pm1 = t0.powu(m - 1);
            let pm2 = if m >= 2 { t0.powu(m - 2) } else { Complex64::default() };
            (
                t0.powu(m),
                pm1 * t1 * mf,
                pm2 * t1 * t1 * (mf * (mf - 1.0)) + pm1 * t2 * mf,
                pm1 * tt * mf,
            )
        };

        let (mut g, mut g1, mut g2, mut gt) = if self.thetas.is_empty() {
            (Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default(), Complex64::default())
        } else {
            Default::default()
        };
        for term in &self.thetas {
            let th = ThetaLevel::new(term.kappa, term.n, pt, &trunc)?;
            let ev = |dl: u8, dt: u8| {
                if term.symmetrized {
                    th.eval_symmetrized(lambda, dl, dt)
                } else {
                    th.eval(lambda, dl, dt)
                }
            };
            g += term.coef * ev(0, 0)?;
            g1 += term.coef * ev(1, 0)?;
            g2 += term.coef * ev(2, 0)?;
            gt += term.coef * ev(0, 1)?;
        }

        Ok(Jet {
            value: pre * f * g,
            d_lambda: pre * (f1 * g + f * g1),
            d_lambda2: pre * (f2 * g + f1 * g1 * 2.0 + f * g2),
            d_tau: pre_t * f * g + pre * (ft * g + f * gt),
        })
    }
}
