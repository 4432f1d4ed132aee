use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use super::GaussianRational;
use crate::error::{Error, Result};

/// Exponent of q: an exact rational.
pub type QExp = Ratio<i64>;

/// Truncated Σ c_{r,k} q^r x^k with r rational, k integer and x = e^{πiλ}.
/// Every stored coefficient is nonzero and every stored r is below `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateSeries {
    terms: BTreeMap<(QExp, i64), GaussianRational>,
    order: QExp,
}

/// One `(q_exponent, x_exponent, re, im)` row of a series dump.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub q_exponent: String,
    pub x_exponent: i64,
    pub re: String,
    pub im: String,
}

fn fmt_q(r: &QExp) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl BivariateSeries {
    pub fn zero(order: QExp) -> Self {
        Self {
            terms: BTreeMap::new(),
            order,
        }
    }

    pub fn monomial(coef: GaussianRational, q: QExp, x: i64, order: QExp) -> Self {
        let mut s = Self::zero(order);
        s.add_term(q, x, coef);
        s
    }

    pub fn one(order: QExp) -> Self {
        Self::monomial(GaussianRational::one(), QExp::zero(), 0, order)
    }

    pub fn order(&self) -> QExp {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(QExp, i64), &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, q: QExp, x: i64) -> GaussianRational {
        self.terms.get(&(q, x)).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Adds c·q^r x^k, dropping it if r ≥ order and removing cancelled terms.
    pub fn add_term(&mut self, q: QExp, x: i64, c: GaussianRational) {
        if q >= self.order || c.is_zero() {
            return;
        }
        let key = (q, x);
        let sum = match self.terms.get(&key) {
            Some(old) => old + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    /// Smallest q-exponent present, or the order for the zero series.
    pub fn valuation(&self) -> QExp {
        self.terms.keys().next().map(|k| k.0).unwrap_or(self.order)
    }

    pub fn truncate(&self, order: QExp) -> Self {
        let order = order.min(self.order);
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.0 < order)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            order,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.order.min(o.order));
        for ((q, x), c) in self.terms.iter().chain(o.terms.iter()) {
            out.add_term(*q, *x, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
            order: self.order,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = (self.order + o.valuation()).min(o.order + self.valuation());
        let mut out = Self::zero(order);
        for ((qa, xa), ca) in &self.terms {
            for ((qb, xb), cb) in &o.terms {
                let q = qa + qb;
                if q >= order {
                    break;
                }
                out.add_term(q, xa + xb, ca * cb);
            }
        }
        out
    }

    /// c · q^r x^k · self.
    pub fn scale_monomial(&self, c: &GaussianRational, r: QExp, k: i64) -> Self {
        if c.is_zero() {
            return Self::zero(self.order + r);
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|((q, x), v)| ((q + r, x + k), v * c))
                .collect(),
            order: self.order + r,
        }
    }

    pub fn pow_int(&self, n: u32) -> Self {
        let mut acc = Self::one(self.order - self.valuation());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// self^e via the binomial series of the normalized tail. The leading
    /// q-coefficient must be the single monomial 1·q^{r0} x^{k0}.
    pub fn pow(&self, e: QExp) -> Result<Self> {
        let r0 = self.valuation();
        let lead: Vec<_> = self.terms.iter().take_while(|(k, _)| k.0 == r0).collect();
        if lead.len() != 1 {
            return Err(Error::NonUnitLeading(format!(
                "leading q^{} coefficient is not a single monomial",
                fmt_q(&r0)
            )));
        }
        let ((_, k0), c0) = lead[0];
        if !c0.is_one() {
            return Err(Error::NonUnitLeading(c0.to_string()));
        }
        let xk = e * Ratio::from_integer(*k0);
        if !xk.is_integer() {
            return Err(Error::NonUnitLeading(format!(
                "x^{k0} raised to {} is not a Laurent monomial",
                fmt_q(&e)
            )));
        }
        let tail = self
            .scale_monomial(&GaussianRational::one(), -r0, -k0)
            .sub(&Self::one(self.order - r0));
        let tail_order = tail.order;
        let v = tail.valuation();
        let mut sum = Self::one(tail_order);
        if !tail.is_empty() {
            let mut power = Self::one(tail_order);
            let mut binom = BigRational::one();
            let e_big = BigRational::new(BigInt::from(*e.numer()), BigInt::from(*e.denom()));
            let mut k = 0i64;
            loop {
                k += 1;
                power = power.mul(&tail).truncate(tail_order);
                if power.is_empty() || v * Ratio::from_integer(k) >= tail_order {
                    break;
                }
                binom = binom * (&e_big - BigRational::from_integer(BigInt::from(k - 1)))
                    / BigRational::from_integer(BigInt::from(k));
                let term = power.scale_monomial(
                    &GaussianRational::from_rational(binom.clone()),
                    QExp::zero(),
                    0,
                );
                sum = sum.add(&term);
            }
        }
        Ok(sum.scale_monomial(&GaussianRational::one(), e * r0, xk.to_integer()))
    }

    /// Substitutes x → i^k x, i.e. λ → λ + k/2.
    pub fn shift_half_periods(&self, k: i64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|((q, x), c)| ((*q, *x), c * &GaussianRational::i_pow(k * x)))
                .collect(),
            order: self.order,
        }
    }

    /// Substitutes x → 1/x, i.e. λ → −λ.
    pub fn reflect(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|((q, x), c)| ((*q, -x), c.clone())).collect(),
            order: self.order,
        }
    }

    /// Sets x = 1 (λ = 0).
    pub fn at_origin(&self) -> Self {
        let mut out = Self::zero(self.order);
        for ((q, _), c) in &self.terms {
            out.add_term(*q, 0, c.clone());
        }
        out
    }

    /// (1/π)·∂_λ at λ = 0, using ∂_λ x^k = πik x^k.
    pub fn lambda_derivative_at_origin_over_pi(&self) -> Self {
        let mut out = Self::zero(self.order);
        for ((q, x), c) in &self.terms {
            let f = GaussianRational::new(BigRational::zero(), BigRational::from_integer(BigInt::from(*x)));
            out.add_term(*q, 0, c * &f);
        }
        out
    }

    pub fn is_x_free(&self) -> bool {
        self.terms.keys().all(|k| k.1 == 0)
    }

    /// Ordered `(q_exponent, x_exponent, re, im)` rows.
    pub fn rows(&self) -> Vec<SeriesRow> {
        self.terms
            .iter()
            .map(|((q, x), c)| SeriesRow {
                q_exponent: fmt_q(q),
                x_exponent: *x,
                re: ratio_string(&c.re),
                im: ratio_string(&c.im),
            })
            .collect()
    }

    /// CSV text with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q_exponent,x_exponent,re,im\n");
        for r in self.rows() {
            out.push_str(&format!("{},{},{},{}\n", r.q_exponent, r.x_exponent, r.re, r.im));
        }
        out
    }
}

fn ratio_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a q-exponent as `a` or `a/b`.
pub fn format_qexp(r: &QExp) -> String {
    fmt_q(r)
}
