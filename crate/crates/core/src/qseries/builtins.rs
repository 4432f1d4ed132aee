use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

use super::{BivariateSeries, GaussianRational, QExp};
use crate::error::{Error, Result};

/// The functions with exact q-expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// ϑ₁(λ + k/2), carrying its x-dependence.
    Theta1 { half_shifts: i64 },
    /// θ_{κ,n} (or θ^s_{κ,n}) at λ or at λ = 0.
    ThetaLevel {
        kappa: u32,
        n: i64,
        at_zero: bool,
        symmetrized: bool,
    },
    Eta,
    Phi1,
    Phi2,
    /// φ₃ itself; its leading coefficient √2 is not a Gaussian rational.
    Phi3,
    /// φ₃/√2 = q^{1/24} ∏ (1 + q^j).
    Phi3Reduced,
}

fn q(n: i64, d: i64) -> QExp {
    Ratio::new(n, d)
}

impl Builtin {
    pub fn theta_level_at_zero(kappa: u32, n: i64) -> Self {
        Builtin::ThetaLevel {
            kappa,
            n,
            at_zero: true,
            symmetrized: false,
        }
    }

    /// Exact leading q-exponent.
    pub fn leading_exponent(&self) -> QExp {
        match *self {
            Builtin::Theta1 { .. } => q(1, 8),
            Builtin::ThetaLevel { kappa, n, .. } => {
                let k = kappa as i64;
                let r = n.rem_euclid(2 * k);
                let m = r.min(2 * k - r);
                q(m * m, 4 * k)
            }
            Builtin::Eta | Builtin::Phi3 | Builtin::Phi3Reduced => q(1, 24),
            Builtin::Phi1 | Builtin::Phi2 => q(-1, 48),
        }
    }
}

/// ∏_{j ≥ 1} (1 + sign·q^{j − offset}·x^{xpow}) truncated below `order`.
fn q_product(offset: QExp, sign: i64, xpow: i64, order: QExp) -> BivariateSeries {
    let mut acc = BivariateSeries::one(order);
    let mut j = 1i64;
    loop {
        let e = QExp::from_integer(j) - offset;
        if e >= order {
            break;
        }
        let mut factor = BivariateSeries::one(order);
        factor.add_term(e, xpow, GaussianRational::from_integer(sign));
        acc = acc.mul(&factor);
        j += 1;
    }
    acc
}

/// Exact expansion of a builtin with all q-exponents below `order`.
pub fn expand_builtin(which: Builtin, order: QExp) -> Result<BivariateSeries> {
    let lead = which.leading_exponent();
    if order <= lead {
        return Err(Error::OrderTooSmall {
            order: super::format_qexp(&order),
            leading: super::format_qexp(&lead),
        });
    }
    let series = match which {
        Builtin::Theta1 { half_shifts } => {
            let inner = order - q(1, 8);
            let mut s = BivariateSeries::zero(inner);
            s.add_term(QExp::zero(), 1, GaussianRational::one());
            s.add_term(QExp::zero(), -1, -GaussianRational::one());
            let s = s
                .mul(&q_product(QExp::zero(), -1, 2, inner))
                .mul(&q_product(QExp::zero(), -1, -2, inner))
                .mul(&q_product(QExp::zero(), -1, 0, inner));
            s.scale_monomial(&-GaussianRational::i(), q(1, 8), 0)
                .shift_half_periods(half_shifts)
        }
        Builtin::ThetaLevel {
            kappa,
            n,
            at_zero,
            symmetrized,
        } => {
            if kappa == 0 {
                return Err(Error::InvalidParameter("theta level kappa must be >= 1".into()));
            }
            let k = kappa as i64;
            let mut s = BivariateSeries::zero(order);
            let r = n.rem_euclid(2 * k);
            let bound = (order.to_integer().abs() + 2) * 4 * k;
            for j in -bound..=bound {
                let m = 2 * k * j + r;
                let e = q(m * m, 4 * k);
                if e >= order {
                    continue;
                }
                let xp = if at_zero { 0 } else { m };
                s.add_term(e, xp, GaussianRational::one());
                if symmetrized {
                    s.add_term(e, -xp, GaussianRational::one());
                }
            }
            s
        }
        Builtin::Eta => {
            q_product(QExp::zero(), -1, 0, order - q(1, 24))
                .scale_monomial(&GaussianRational::one(), q(1, 24), 0)
        }
        Builtin::Phi1 | Builtin::Phi2 => {
            let sign = if which == Builtin::Phi1 { 1 } else { -1 };
            q_product(q(1, 2), sign, 0, order + q(1, 48))
                .scale_monomial(&GaussianRational::one(), q(-1, 48), 0)
        }
        Builtin::Phi3 => {
            return Err(Error::UnsupportedBuiltin(
                "phi3 has leading coefficient sqrt(2); expand phi3_reduced and square".into(),
            ))
        }
        Builtin::Phi3Reduced => {
            q_product(QExp::zero(), 1, 0, order - q(1, 24))
                .scale_monomial(&GaussianRational::one(), q(1, 24), 0)
        }
    };
    Ok(series.truncate(order))
}

/// Whether the coefficient lists of `a` and `b`, read in steps of q^{1/2}
/// from the shared leading exponent, agree up to alternating signs.
pub fn alternating_pair(a: &BivariateSeries, b: &BivariateSeries) -> bool {
    let order = a.order().min(b.order());
    let (a, b) = (a.truncate(order), b.truncate(order));
    if a.valuation() != b.valuation() || a.len() != b.len() {
        return false;
    }
    let r0 = a.valuation();
    let ok = a.terms().all(|((r, x), c)| {
        let steps = (*r - r0) * QExp::from_integer(2);
        if !steps.is_integer() {
            return false;
        }
        let want = if steps.to_integer().is_even() { c.clone() } else { -c };
        b.coefficient(*r, *x) == want
    });
    ok
}
