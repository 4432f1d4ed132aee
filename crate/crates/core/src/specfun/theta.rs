use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use super::{EllipticArgument, ModularPoint, SeriesTruncation};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// ϑ₁(·, τ) at a fixed τ via 2 Σ (−1)ⁿ e^{πiτ(n+½)²} sin((2n+1)πλ).
#[derive(Debug, Clone)]
pub struct Theta1 {
    tau: Complex64,
    coefs: Vec<Complex64>,
    trunc: SeriesTruncation,
}

impl Theta1 {
    pub fn new(pt: &ModularPoint, trunc: &SeriesTruncation) -> Self {
        let tau = pt.tau();
        let mut coefs = Vec::new();
        for n in 0..trunc.max_terms {
            let h = n as f64 + 0.5;
            let c = 2.0 * (I * PI * h * h * tau).exp();
            let c = if n % 2 == 0 { c } else { -c };
            coefs.push(c);
            if c.norm() == 0.0 {
                break;
            }
        }
        Self {
            tau,
            coefs,
            trunc: *trunc,
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// ∂_λ^{dl} ∂_τ^{dt} ϑ₁(λ, τ).
    pub fn eval(&self, lambda: Complex64, dl: u8, dt: u8) -> Result<Complex64> {
        if dl as u32 + 2 * dt as u32 > 3 {
            return Err(Error::InvalidParameter(format!(
                "theta1 derivative orders d_lambda={dl}, d_tau={dt} exceed d_lambda + 2 d_tau <= 3"
            )));
        }
        let growth = PI * lambda.im.abs();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut running_max = 0.0f64;
        let mut prev = f64::INFINITY;
        for (n, c) in self.coefs.iter().enumerate() {
            let k = (2 * n + 1) as f64;
            let h = n as f64 + 0.5;
            let mut factor = Complex64::new((k * PI).powi(dl as i32), 0.0);
            if dt == 1 {
                factor *= I * PI * h * h;
            }
            let phase = Complex64::new(dl as f64 * FRAC_PI_2, 0.0);
            let term = c * factor * (lambda * (k * PI) + phase).sin();
            sum += term;
            let bound = c.norm() * factor.norm() * (k * growth).exp();
            running_max = running_max.max(bound);
            if bound <= self.trunc.tail_tolerance * running_max && bound < prev {
                return Ok(sum);
            }
            prev = bound;
        }
        if self.coefs.last().is_some_and(|c| c.norm() == 0.0) {
            return Ok(sum);
        }
        Err(Error::NonConvergence {
            what: "theta1",
            max_terms: self.trunc.max_terms,
        })
    }

    pub fn value(&self, lambda: Complex64) -> Result<Complex64> {
        self.eval(lambda, 0, 0)
    }

    /// ϑ₁'(0, τ).
    pub fn derivative_at_zero(&self) -> Complex64 {
        self.coefs
            .iter()
            .enumerate()
            .map(|(n, c)| c * ((2 * n + 1) as f64 * PI))
            .sum()
    }

    /// ϑ₁(s, τ)/s for real s, finite at s = 0.
    pub fn over_arg(&self, s: f64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, c) in self.coefs.iter().enumerate() {
            let kp = (2 * n + 1) as f64 * PI;
            let x = kp * s;
            let sinc = if x.abs() < 1e-4 {
                1.0 - x * x / 6.0 + x.powi(4) / 120.0
            } else {
                x.sin() / x
            };
            let term = c * (kp * sinc);
            sum += term;
            if term.norm() <= self.trunc.tail_tolerance * sum.norm() && n > 0 {
                break;
            }
        }
        sum
    }
}

/// One-shot ∂_λ^{d_lambda} ∂_τ^{d_tau} ϑ₁(λ, τ).
pub fn theta1(
    arg: &EllipticArgument,
    pt: &ModularPoint,
    d_lambda: u8,
    d_tau: u8,
    trunc: &SeriesTruncation,
) -> Result<Complex64> {
    trunc.validate()?;
    Theta1::new(pt, trunc).eval(arg.lambda, d_lambda, d_tau)
}

/// θ_{κ,n}(·, τ) = Σⱼ e^{2πiκν²τ + 2πiκνλ}, ν = j + n/2κ.
#[derive(Debug, Clone, Copy)]
pub struct ThetaLevel {
    kappa: u32,
    n: u32,
    tau: Complex64,
    trunc: SeriesTruncation,
}

impl ThetaLevel {
    pub fn new(kappa: u32, n: i64, pt: &ModularPoint, trunc: &SeriesTruncation) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::InvalidParameter("theta level kappa must be >= 1".into()));
        }
        let period = 2 * kappa as i64;
        Ok(Self {
            kappa,
            n: n.rem_euclid(period) as u32,
            tau: pt.tau(),
            trunc: *trunc,
        })
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// Index reduced to 0..2κ.
    pub fn index(&self) -> u32 {
        self.n
    }

    /// ∂_λ^{dl} ∂_τ^{dt} θ_{κ,n}(λ, τ).
    pub fn eval(&self, lambda: Complex64, dl: u8, dt: u8) -> Result<Complex64> {
        if dl > 2 || dt > 1 {
            return Err(Error::InvalidParameter(format!(
                "theta_level derivative orders d_lambda={dl}, d_tau={dt} out of range"
            )));
        }
        let k = self.kappa as f64;
        let shift = self.n as f64 / (2.0 * k);
        let centre = (-lambda.im / (2.0 * self.tau.im) - shift).round() as i64;
        let term = |j: i64| -> (Complex64, f64) {
            let nu = j as f64 + shift;
            let expo = I * (2.0 * PI * k) * (nu * nu * self.tau + nu * lambda);
            let mag = expo.re.exp();
            let mut t = expo.exp();
            let mut bound = mag;
            for _ in 0..dl {
                t *= I * (2.0 * PI * k * nu);
                bound *= 2.0 * PI * k * nu.abs() + 1.0;
            }
            if dt == 1 {
                t *= I * (2.0 * PI * k * nu * nu);
                bound *= 2.0 * PI * k * nu * nu + 1.0;
            }
            (t, bound)
        };
        let (t0, b0) = term(centre);
        let mut sum = t0;
        let mut running_max = b0;
        for dir in [1i64, -1] {
            let mut prev = f64::INFINITY;
            let mut done = false;
            for step in 1..=self.trunc.max_terms as i64 {
                let (t, b) = term(centre + dir * step);
                sum += t;
                running_max = running_max.max(b);
                if b <= self.trunc.tail_tolerance * running_max && b < prev {
                    done = true;
                    break;
                }
                prev = b;
            }
            if !done {
                return Err(Error::NonConvergence {
                    what: "theta_level",
                    max_terms: self.trunc.max_terms,
                });
            }
        }
        Ok(sum)
    }

    /// θ^s = θ(λ) + θ(−λ) and its derivatives.
    pub fn eval_symmetrized(&self, lambda: Complex64, dl: u8, dt: u8) -> Result<Complex64> {
        let a = self.eval(lambda, dl, dt)?;
        let b = self.eval(-lambda, dl, dt)?;
        Ok(if dl.is_multiple_of(2) { a + b } else { a - b })
    }
}

/// One-shot θ_{κ,n} or θ^s_{κ,n} with derivatives.
#[allow(clippy::too_many_arguments)]
pub fn theta_level(
    kappa: u32,
    n: i64,
    arg: &EllipticArgument,
    pt: &ModularPoint,
    symmetrized: bool,
    d_lambda: u8,
    d_tau: u8,
    trunc: &SeriesTruncation,
) -> Result<Complex64> {
    trunc.validate()?;
    let th = ThetaLevel::new(kappa, n, pt, trunc)?;
    if symmetrized {
        th.eval_symmetrized(arg.lambda, d_lambda, d_tau)
    } else {
        th.eval(arg.lambda, d_lambda, d_tau)
    }
}
