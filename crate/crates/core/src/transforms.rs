//! The A, B, T, S actions on functions of (λ, τ) and their matrices on the
//! sampled block basis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::blocks::{u_block, BlockIndex};
use crate::error::{Error, Result};
use crate::macdonald::{block_indices, TransformMatrix};
use crate::quadrature::QuadratureSpec;
use crate::specfun::{EllipticArgument, ModularPoint};

/// Condition numbers above this reject a sampled basis.
pub const MAX_CONDITION: f64 = 1e8;

type Evaluator = dyn Fn(Complex64, &ModularPoint) -> Result<Complex64> + Send + Sync;
type JetEvaluator = dyn Fn(Complex64, &ModularPoint) -> Result<Jet> + Send + Sync;

/// f, ∂_λ f, ∂²_λ f and ∂_τ f at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jet {
    pub value: Complex64,
    pub d_lambda: Complex64,
    pub d_lambda2: Complex64,
    pub d_tau: Complex64,
}

/// A function of (λ, τ) carrying the level data (p, κ) its transforms need.
#[derive(Clone)]
pub struct BlockFunction {
    pub p: usize,
    pub kappa: u32,
    evaluator: Arc<Evaluator>,
    jet: Option<Arc<JetEvaluator>>,
}

impl fmt::Debug for BlockFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockFunction")
            .field("p", &self.p)
            .field("kappa", &self.kappa)
            .field("analytic", &self.jet.is_some())
            .finish_non_exhaustive()
    }
}

impl BlockFunction {
    pub fn new<F>(p: usize, kappa: u32, f: F) -> Self
    where
        F: Fn(Complex64, &ModularPoint) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            p,
            kappa,
            evaluator: Arc::new(f),
            jet: None,
        }
    }

    /// A function known with its analytic derivatives.
    pub fn with_jet<F>(p: usize, kappa: u32, jet: F) -> Self
    where
        F: Fn(Complex64, &ModularPoint) -> Result<Jet> + Send + Sync + 'static,
    {
        let jet: Arc<JetEvaluator> = Arc::new(jet);
        let value = jet.clone();
        Self {
            p,
            kappa,
            evaluator: Arc::new(move |l, pt| Ok(value(l, pt)?.value)),
            jet: Some(jet),
        }
    }

    /// Analytic derivatives, if the function carries them.
    pub fn jet(&self, lambda: Complex64, pt: &ModularPoint) -> Option<Result<Jet>> {
        self.jet.as_ref().map(|j| j(lambda, pt))
    }

    /// u_{κ,n} evaluated with the given quadrature.
    pub fn block(idx: BlockIndex, quad: QuadratureSpec) -> Self {
        Self::new(idx.p, idx.kappa, move |l, pt| {
            Ok(u_block(&idx, &EllipticArgument::new(l, pt), pt, &quad)?.value)
        })
    }

    /// Σ cᵢ fᵢ; all terms must share (p, κ).
    pub fn linear_combination(terms: Vec<(Complex64, BlockFunction)>) -> Result<Self> {
        let (p, kappa) = match terms.first() {
            Some((_, f)) => (f.p, f.kappa),
            None => return Err(Error::InvalidParameter("empty linear combination".into())),
        };
        if terms.iter().any(|(_, f)| f.p != p || f.kappa != kappa) {
            return Err(Error::InvalidParameter("linear combination mixes levels".into()));
        }
        Ok(Self::new(p, kappa, move |l, pt| {
            terms.iter().try_fold(Complex64::new(0.0, 0.0), |acc, (c, f)| Ok(acc + c * f.eval(l, pt)?))
        }))
    }

    /// X f as a new function.
    pub fn transformed(&self, which: Transform) -> Self {
        let inner = self.clone();
        Self::new(self.p, self.kappa, move |l, pt| apply_transform(which, &inner, l, pt))
    }

    pub fn eval(&self, lambda: Complex64, pt: &ModularPoint) -> Result<Complex64> {
        (self.evaluator)(lambda, pt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Transform {
    A,
    B,
    T,
    S,
}

/// Au = u(λ+1, τ); Bu = e^{πiκ(λ+τ/2)} u(λ+τ, τ); Tu = u(λ, τ+1);
/// Su = e^{−πiκλ²/(2τ)} τ^{−1/2−p(p+1)/κ} u(λ/τ, −1/τ) with arg τ ∈ (0, π).
pub fn apply_transform(
    which: Transform,
    f: &BlockFunction,
    lambda: Complex64,
    pt: &ModularPoint,
) -> Result<Complex64> {
    let tau = pt.tau();
    let k = f.kappa as f64;
    let i_pi = Complex64::new(0.0, PI);
    match which {
        Transform::A => f.eval(lambda + 1.0, pt),
        Transform::B => Ok((i_pi * k * (lambda + tau / 2.0)).exp() * f.eval(lambda + tau, pt)?),
        Transform::T => f.eval(lambda, &pt.translated(1.0)?),
        Transform::S => {
            let weight = -0.5 - (f.p * (f.p + 1)) as f64 / k;
            let prefactor = (-i_pi * k * lambda * lambda / (2.0 * tau)).exp() * (tau.ln() * weight).exp();
            Ok(prefactor * f.eval(lambda / tau, &pt.inverted()?)?)
        }
    }
}

/// Coordinates on u_{κ,n}, p+1 ≤ n ≤ κ−p−1, with the relative least-squares
/// residual over the sample grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisExpansion {
    pub indices: Vec<i64>,
    pub coefficients: Vec<Complex64>,
    pub residual: f64,
}

/// λᵢ = 0.1 + 0.8(i + 0.37)/N with N = max(2·dim, 6).
pub fn default_grid(dim: usize) -> Vec<f64> {
    let n = (2 * dim).max(6);
    (0..n).map(|i| 0.1 + 0.8 * (i as f64 + 0.37) / n as f64).collect()
}

/// The block basis sampled on a λ-grid at one τ.
#[derive(Debug, Clone)]
pub struct SampledBasis {
    pub p: usize,
    pub kappa: u32,
    pub grid: Vec<f64>,
    pub indices: Vec<i64>,
    pub condition: f64,
    matrix: DMatrix<Complex64>,
}

fn sample(f: &BlockFunction, grid: &[f64], pt: &ModularPoint) -> Result<Vec<Complex64>> {
    grid.par_iter()
        .map(|&l| f.eval(Complex64::new(l, 0.0), pt))
        .collect()
}

impl SampledBasis {
    pub fn new(p: usize, kappa: u32, grid: &[f64], pt: &ModularPoint, quad: &QuadratureSpec) -> Result<Self> {
        let indices = block_indices(p, kappa);
        if indices.is_empty() {
            return Err(Error::InvalidParameter(format!("no blocks at p={p}, kappa={kappa}")));
        }
        if grid.len() < 2 * indices.len() {
            return Err(Error::InvalidParameter(format!(
                "grid of {} points is smaller than twice the basis size {}",
                grid.len(),
                indices.len()
            )));
        }
        let mut matrix = DMatrix::zeros(grid.len(), indices.len());
        for (col, &n) in indices.iter().enumerate() {
            let f = BlockFunction::block(BlockIndex::new(p, kappa, n)?, *quad);
            for (row, v) in sample(&f, grid, pt)?.into_iter().enumerate() {
                matrix[(row, col)] = v;
            }
        }
        let sv = matrix.singular_values();
        let condition = sv.max() / sv.min();
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditionedBasis { cond: condition });
        }
        Ok(Self {
            p,
            kappa,
            grid: grid.to_vec(),
            indices,
            condition,
            matrix,
        })
    }

    /// Least-squares coordinates of sampled values.
    pub fn expand_values(&self, values: &[Complex64]) -> Result<BasisExpansion> {
        let b = DVector::from_column_slice(values);
        let svd = self.matrix.clone().svd(true, true);
        let c = svd
            .solve(&b, 0.0)
            .map_err(|e| Error::InvalidParameter(format!("least squares failed: {e}")))?;
        let misfit = (&self.matrix * &c - &b).norm();
        let scale = b.norm();
        Ok(BasisExpansion {
            indices: self.indices.clone(),
            coefficients: c.iter().copied().collect(),
            residual: if scale > 0.0 { misfit / scale } else { misfit },
        })
    }

    pub fn expand(&self, f: &BlockFunction, pt: &ModularPoint) -> Result<BasisExpansion> {
        self.expand_values(&sample(f, &self.grid, pt)?)
    }
}

/// Least-squares coordinates of `f` on the block basis over `lambda_grid`.
pub fn expand_in_block_basis(
    f: &BlockFunction,
    p: usize,
    kappa: u32,
    lambda_grid: &[f64],
    pt: &ModularPoint,
    quad: &QuadratureSpec,
) -> Result<BasisExpansion> {
    SampledBasis::new(p, kappa, lambda_grid, pt, quad)?.expand(f, pt)
}

/// Matrices of the given transforms, column n holding the coordinates of
/// X u_{κ,n}, together with the worst expansion residual.
pub fn numeric_matrices(
    p: usize,
    kappa: u32,
    which: &[Transform],
    pt: &ModularPoint,
    quad: &QuadratureSpec,
) -> Result<(Vec<TransformMatrix>, f64)> {
    if p > 1 {
        return Err(Error::UnsupportedP(p));
    }
    let dim = block_indices(p, kappa).len();
    let basis = SampledBasis::new(p, kappa, &default_grid(dim), pt, quad)?;
    let mut worst: f64 = 0.0;
    let mut out = Vec::with_capacity(which.len());
    for &x in which {
        let mut m = DMatrix::zeros(dim, dim);
        for (col, &n) in basis.indices.iter().enumerate() {
            let f = BlockFunction::block(BlockIndex::new(p, kappa, n)?, *quad).transformed(x);
            let e = basis.expand(&f, pt)?;
            worst = worst.max(e.residual);
            for (row, c) in e.coefficients.into_iter().enumerate() {
                m[(row, col)] = c;
            }
        }
        out.push(TransformMatrix { p, kappa, entries: m });
    }
    Ok((out, worst))
}

/// Numeric (T, S) at a self-dual point (τ = i) so that S needs one modular point.
pub fn numeric_modular_matrices(
    p: usize,
    kappa: u32,
    pt: &ModularPoint,
    quad: &QuadratureSpec,
) -> Result<(TransformMatrix, TransformMatrix)> {
    let (mut m, _) = numeric_matrices(p, kappa, &[Transform::T, Transform::S], pt, quad)?;
    let s = m.pop().expect("two matrices");
    let t = m.pop().expect("two matrices");
    Ok((t, s))
}

/// Numeric (A, B).
pub fn numeric_translation_matrices(
    p: usize,
    kappa: u32,
    pt: &ModularPoint,
    quad: &QuadratureSpec,
) -> Result<(TransformMatrix, TransformMatrix)> {
    let (mut m, _) = numeric_matrices(p, kappa, &[Transform::A, Transform::B], pt, quad)?;
    let b = m.pop().expect("two matrices");
    let a = m.pop().expect("two matrices");
    Ok((a, b))
}
