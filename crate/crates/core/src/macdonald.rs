//! A₁ Macdonald polynomials at ε = e^{πi/κ} and the modular matrices of the
//! block basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Squared norms below this abort Gram–Schmidt.
pub const GRAM_FLOOR: f64 = 1e-12;

/// Finite Laurent polynomial Σ c_e z^e.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPoly {
    pub coeffs: BTreeMap<i64, Complex64>,
}

impl LaurentPoly {
    pub fn monomial(e: i64, c: Complex64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(e, c);
        Self { coeffs }
    }

    pub fn one() -> Self {
        Self::monomial(0, Complex64::new(1.0, 0.0))
    }

    /// z^n + z^{−n} (or 1 for n = 0).
    pub fn even_monomial(n: i64) -> Self {
        if n == 0 {
            return Self::one();
        }
        let mut p = Self::monomial(n, Complex64::new(1.0, 0.0));
        p.coeffs.insert(-n, Complex64::new(1.0, 0.0));
        p
    }

    pub fn coefficient(&self, e: i64) -> Complex64 {
        self.coeffs.get(&e).copied().unwrap_or_default()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::default();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &o.coeffs {
                *out.coeffs.entry(ea + eb).or_default() += ca * cb;
            }
        }
        out
    }

    /// self + c·o.
    pub fn axpy(&self, c: Complex64, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, v) in &o.coeffs {
            *out.coeffs.entry(*e).or_default() += c * v;
        }
        out
    }

    /// Value at x, where z = ε^x and ε = e^{πi/κ}.
    pub fn eval_at_x(&self, x: f64, kappa: u32) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(e, c)| c * Complex64::from_polar(1.0, PI * *e as f64 * x / kappa as f64))
            .sum()
    }

    /// Largest |c_e − c_{−e}|.
    pub fn evenness_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(e, c)| (c - self.coefficient(-e)).norm())
            .fold(0.0, f64::max)
    }
}

fn epsilon(kappa: u32) -> Complex64 {
    Complex64::from_polar(1.0, PI / kappa as f64)
}

/// ∏_{j<k} (1 − ε^{2j} z²)(1 − ε^{2j} z^{−2}).
fn weight(k: usize, kappa: u32) -> LaurentPoly {
    let eps = epsilon(kappa);
    let mut w = LaurentPoly::one();
    for j in 0..k {
        let e2j = eps.powu(2 * j as u32);
        w = w.mul(&LaurentPoly::one().axpy(-e2j, &LaurentPoly::monomial(2, Complex64::new(1.0, 0.0))));
        w = w.mul(&LaurentPoly::one().axpy(-e2j, &LaurentPoly::monomial(-2, Complex64::new(1.0, 0.0))));
    }
    w
}

/// ½ · constant term of f·g·∏_{j<k}(1 − ε^{2j}z²)(1 − ε^{2j}z^{−2}); bilinear.
pub fn ct_inner(f: &LaurentPoly, g: &LaurentPoly, k: usize, kappa: u32) -> Complex64 {
    0.5 * f.mul(g).mul(&weight(k, kappa)).coefficient(0)
}

/// P₀ … P_N for parameter k at ε = e^{πi/κ}.
#[derive(Debug, Clone)]
pub struct MacdonaldBasis {
    pub k: usize,
    pub kappa: u32,
    pub polys: Vec<LaurentPoly>,
}

impl MacdonaldBasis {
    pub fn new(k: usize, kappa: u32, max_degree: usize) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::InvalidParameter("kappa must be positive".into()));
        }
        let w = weight(k, kappa);
        let inner = |f: &LaurentPoly, g: &LaurentPoly| 0.5 * f.mul(g).mul(&w).coefficient(0);
        let mut polys: Vec<LaurentPoly> = Vec::with_capacity(max_degree + 1);
        let mut norms: Vec<Complex64> = Vec::with_capacity(max_degree + 1);
        for n in 0..=max_degree {
            let m = LaurentPoly::even_monomial(n as i64);
            let mut v = m.clone();
            for (j, pj) in polys.iter().enumerate() {
                if norms[j].norm() < GRAM_FLOOR {
                    return Err(Error::DegenerateGram {
                        n: j,
                        norm: norms[j].norm(),
                    });
                }
                v = v.axpy(-inner(&m, pj) / norms[j], pj);
            }
            v.coeffs.retain(|_, c| c.norm() > 0.0);
            norms.push(inner(&v, &v));
            polys.push(v);
        }
        Ok(Self { k, kappa, polys })
    }

    /// Largest |⟨P_m, P_n⟩| over m ≠ n.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, pm) in self.polys.iter().enumerate() {
            for pn in &self.polys[m + 1..] {
                worst = worst.max(ct_inner(pm, pn, self.k, self.kappa).norm());
            }
        }
        worst
    }
}

/// P^{(k)}_n at ε = e^{πi/κ}.
pub fn macdonald_poly(n: usize, k: usize, kappa: u32) -> Result<LaurentPoly> {
    Ok(MacdonaldBasis::new(k, kappa, n)?.polys.pop().expect("basis is nonempty"))
}

/// A square matrix on the block basis {u_{κ,n} : p+1 ≤ n ≤ κ−p−1}; column n
/// holds the image of u_{κ,n}.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    pub p: usize,
    pub kappa: u32,
    pub entries: DMatrix<Complex64>,
}

impl TransformMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn indices(&self) -> Vec<i64> {
        block_indices(self.p, self.kappa)
    }
}

/// p+1, …, κ−p−1.
pub fn block_indices(p: usize, kappa: u32) -> Vec<i64> {
    (p as i64 + 1..=kappa as i64 - p as i64 - 1).collect()
}

fn check_dim(p: usize, kappa: u32) -> Result<usize> {
    if (kappa as usize) < 2 * p + 2 {
        return Err(Error::InvalidParameter(format!(
            "need kappa >= 2p + 2, got p={p}, kappa={kappa}"
        )));
    }
    Ok(kappa as usize - 2 * p - 1)
}

/// T = diag(e^{πin²/(2κ)}) and S from the Macdonald closed formula.
pub fn modular_matrices(p: usize, kappa: u32) -> Result<(TransformMatrix, TransformMatrix)> {
    let dim = check_dim(p, kappa)?;
    let idx = block_indices(p, kappa);
    let basis = MacdonaldBasis::new(p + 1, kappa, dim - 1)?;
    let eps = epsilon(kappa);
    let epow = |x: f64| Complex64::from_polar(1.0, PI * x / kappa as f64);
    let k = kappa as f64;
    let pf = p as f64;
    let pref = Complex64::from_polar(1.0, -PI / 4.0) / (2.0 * k).sqrt();
    let mut s = DMatrix::zeros(dim, dim);
    let mut t = DMatrix::zeros(dim, dim);
    for (a, &m) in idx.iter().enumerate() {
        for (b, &n) in idx.iter().enumerate() {
            let (mf, nf) = (m as f64, n as f64);
            let mut prod = Complex64::new(1.0, 0.0);
            for j in 1..=p as i64 {
                prod *= epow((j - n) as f64) - epow((n - j) as f64);
            }
            let poly = basis.polys[(n - p as i64 - 1) as usize].eval_at_x(mf, kappa);
            s[(a, b)] = pref
                * epow(pf * (nf - mf) - pf * (pf + 1.0) / 2.0)
                * (eps.powf(-mf) - eps.powf(mf))
                * prod
                * poly;
        }
        t[(a, a)] = Complex64::from_polar(1.0, PI * (m * m) as f64 / (2.0 * k));
    }
    Ok((
        TransformMatrix {
            p,
            kappa,
            entries: t,
        },
        TransformMatrix {
            p,
            kappa,
            entries: s,
        },
    ))
}

/// A = diag((−1)ⁿ) and B with B_{κ−n,n} = −e^{2πipn/κ}.
pub fn translation_matrices(p: usize, kappa: u32) -> Result<(TransformMatrix, TransformMatrix)> {
    let dim = check_dim(p, kappa)?;
    let idx = block_indices(p, kappa);
    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DMatrix::zeros(dim, dim);
    for (col, &n) in idx.iter().enumerate() {
        a[(col, col)] = Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        let row = idx.iter().position(|&m| m == kappa as i64 - n).expect("index set is symmetric");
        b[(row, col)] = -Complex64::from_polar(1.0, 2.0 * PI * (p as i64 * n) as f64 / kappa as f64);
    }
    Ok((
        TransformMatrix {
            p,
            kappa,
            entries: a,
        },
        TransformMatrix {
            p,
            kappa,
            entries: b,
        },
    ))
}

/// Max-entry residuals of the modular-group relations on the block basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationResiduals {
    pub s_squared: f64,
    pub st_cubed: f64,
    pub sas_inverse_b: f64,
    pub ab_commutation: f64,
    pub tb_bat: f64,
    pub a_squared: f64,
    pub b_squared: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        [
            self.s_squared,
            self.st_cubed,
            self.sas_inverse_b,
            self.ab_commutation,
            self.tb_bat,
            self.a_squared,
            self.b_squared,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// The scalar (−1)^p i e^{−πip(p+1)/κ} by which S² and (ST)³ act.
pub fn central_scalar(p: usize, kappa: u32) -> Complex64 {
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    Complex64::new(0.0, sign) * Complex64::from_polar(1.0, -PI * (p * (p + 1)) as f64 / kappa as f64)
}

/// Residuals of S² = (ST)³ = λI, SAS⁻¹ = B, AB = (−1)^κ BA, TB = i^κ BAT,
/// A² = B² = I.
pub fn relation_residuals(
    s: &DMatrix<Complex64>,
    t: &DMatrix<Complex64>,
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    p: usize,
    kappa: u32,
) -> Result<RelationResiduals> {
    let dim = s.nrows();
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let lam = central_scalar(p, kappa);
    let s_inv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidParameter("S matrix is singular".into()))?;
    let st = s * t;
    let kappa_sign = if kappa.is_multiple_of(2) { 1.0 } else { -1.0 };
    let i_pow = Complex64::new(0.0, 1.0).powu(kappa);
    Ok(RelationResiduals {
        s_squared: max_abs(&(s * s - &id * lam)),
        st_cubed: max_abs(&(&st * &st * &st - &id * lam)),
        sas_inverse_b: max_abs(&(s * a * &s_inv - b)),
        ab_commutation: max_abs(&(a * b - b * a * Complex64::new(kappa_sign, 0.0))),
        tb_bat: max_abs(&(t * b - b * a * t * i_pow)),
        a_squared: max_abs(&(a * a - &id)),
        b_squared: max_abs(&(b * b - &id)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_inner_products() {
        assert!((ct_inner(&LaurentPoly::one(), &LaurentPoly::one(), 0, 5) - 0.5).norm() < 1e-15);
        assert!((ct_inner(&LaurentPoly::one(), &LaurentPoly::one(), 1, 4) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn k1_gives_characters() {
        let p = macdonald_poly(3, 1, 7).unwrap();
        for e in [-3, -1, 1, 3] {
            assert!((p.coefficient(e) - 1.0).norm() < 1e-12);
        }
        assert!(p.coefficient(0).norm() < 1e-12 && p.coefficient(2).norm() < 1e-12);
    }
}
