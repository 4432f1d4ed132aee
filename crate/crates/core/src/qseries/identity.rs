use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use super::{expand_builtin, format_qexp, BivariateSeries, Builtin, GaussianRational, QExp};
use crate::error::Result;

/// Expressions over builtins closed under +, −, ×, integer powers and
/// scaling by c·q^r.
#[derive(Debug, Clone)]
pub enum SeriesExpr {
    Builtin(Builtin),
    Scale(GaussianRational, QExp, Box<SeriesExpr>),
    Add(Box<SeriesExpr>, Box<SeriesExpr>),
    Sub(Box<SeriesExpr>, Box<SeriesExpr>),
    Mul(Box<SeriesExpr>, Box<SeriesExpr>),
    Pow(Box<SeriesExpr>, i64),
}

impl SeriesExpr {
    pub fn builtin(b: Builtin) -> Self {
        SeriesExpr::Builtin(b)
    }

    pub fn scale(c: GaussianRational, e: Self) -> Self {
        SeriesExpr::Scale(c, QExp::zero(), Box::new(e))
    }

    pub fn plus(a: Self, b: Self) -> Self {
        SeriesExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn minus(a: Self, b: Self) -> Self {
        SeriesExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn times(a: Self, b: Self) -> Self {
        SeriesExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Self, n: i64) -> Self {
        SeriesExpr::Pow(Box::new(a), n)
    }

    /// A lower bound on the q-valuation.
    fn valuation_bound(&self) -> QExp {
        match self {
            SeriesExpr::Builtin(b) => b.leading_exponent(),
            SeriesExpr::Scale(_, r, e) => *r + e.valuation_bound(),
            SeriesExpr::Add(a, b) | SeriesExpr::Sub(a, b) => {
                a.valuation_bound().min(b.valuation_bound())
            }
            SeriesExpr::Mul(a, b) => a.valuation_bound() + b.valuation_bound(),
            SeriesExpr::Pow(a, n) => a.valuation_bound() * Ratio::from_integer(*n),
        }
    }

    /// Exact expansion valid for every q-exponent below `target`.
    pub fn expand(&self, target: QExp) -> Result<BivariateSeries> {
        let s = match self {
            SeriesExpr::Builtin(b) => expand_builtin(*b, target)?,
            SeriesExpr::Scale(c, r, e) => e.expand(target - r)?.scale_monomial(c, *r, 0),
            SeriesExpr::Add(a, b) => a.expand(target)?.add(&b.expand(target)?),
            SeriesExpr::Sub(a, b) => a.expand(target)?.sub(&b.expand(target)?),
            SeriesExpr::Mul(a, b) => {
                let ea = a.expand(target - b.valuation_bound())?;
                let eb = b.expand(target - a.valuation_bound())?;
                ea.mul(&eb)
            }
            SeriesExpr::Pow(a, n) if *n >= 1 => {
                let need = target - a.valuation_bound() * Ratio::from_integer(n - 1);
                a.expand(need)?.pow_int(*n as u32)
            }
            SeriesExpr::Pow(a, n) => {
                let grow = Ratio::from_integer(1 - n);
                let mut need = target + a.valuation_bound() * grow;
                let mut base = a.expand(need)?;
                let exact = target + base.valuation() * grow;
                if exact > need {
                    need = exact;
                    base = a.expand(need)?;
                }
                base.pow(Ratio::from_integer(*n))?
            }
        };
        Ok(s.truncate(target))
    }
}

/// A named claimed equality of two series expressions.
#[derive(Debug, Clone)]
pub struct SeriesIdentity {
    pub name: String,
    pub lhs: SeriesExpr,
    pub rhs: SeriesExpr,
}

/// First coefficient at which the two sides disagree.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesMismatch {
    pub q_exponent: String,
    pub x_exponent: i64,
    pub lhs: GaussianRational,
    pub rhs: GaussianRational,
}

/// Outcome of an exact series comparison.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesReport {
    pub name: String,
    pub order: String,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    pub pass: bool,
    pub first_mismatch: Option<SeriesMismatch>,
}

/// Compares every coefficient with q-exponent below `order`, exactly.
pub fn check_series_identity(id: &SeriesIdentity, order: QExp) -> Result<SeriesReport> {
    let lhs = id.lhs.expand(order)?;
    let rhs = id.rhs.expand(order)?;
    let diff = lhs.sub(&rhs);
    let first_mismatch = diff.terms().next().map(|((r, x), _)| SeriesMismatch {
        q_exponent: format_qexp(r),
        x_exponent: *x,
        lhs: lhs.coefficient(*r, *x),
        rhs: rhs.coefficient(*r, *x),
    });
    let full_order = lhs.order() >= order && rhs.order() >= order;
    Ok(SeriesReport {
        name: id.name.clone(),
        order: format_qexp(&order),
        lhs_terms: lhs.len(),
        rhs_terms: rhs.len(),
        pass: first_mismatch.is_none() && full_order,
        first_mismatch,
    })
}
