//! Quadrature plans for integrands with algebraic endpoint singularities.
//!
//! A plan is a list of nodes with complex weights plus, for one-dimensional
//! plans, coefficients multiplying the cofactor's endpoint values. Applying a
//! plan to sampled cofactor values is a fixed-order dot product, so results
//! are reproducible regardless of how the samples were computed.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Exponents closer than this to a pole of the finite-part moments are
/// treated as degenerate.
const DEGENERATE_GAP: f64 = 1e-6;

/// Numerical integration settings shared by the block integrals and the
/// Selberg oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Nodes per mesh cell and per endpoint window.
    pub gauss_order: usize,
    /// Number of geometrically graded cells between a window and the midpoint.
    pub graded_mesh_levels: usize,
    /// 1: subtract h(0) in each endpoint window; 0: weighted rule on h directly.
    pub subtraction_order: u8,
    /// Width of the endpoint windows [0, δ] and [1 − δ, 1].
    pub endpoint_delta: f64,
    /// Exponent shift used to step around a degenerate corner exponent.
    pub continuation_step: f64,
    /// Ceiling on integrand evaluations for a single integral.
    pub max_evaluations: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            gauss_order: 20,
            graded_mesh_levels: 4,
            subtraction_order: 1,
            endpoint_delta: 0.1,
            continuation_step: 0.01,
            max_evaluations: 20_000_000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.gauss_order < 8 {
            return Err(Error::InvalidParameter(format!(
                "gauss_order must be >= 8, got {}",
                self.gauss_order
            )));
        }
        if self.graded_mesh_levels == 0 {
            return Err(Error::InvalidParameter("graded_mesh_levels must be >= 1".into()));
        }
        if self.subtraction_order > 1 {
            return Err(Error::InvalidParameter(format!(
                "subtraction_order must be 0 or 1, got {}",
                self.subtraction_order
            )));
        }
        if !(self.endpoint_delta > 0.0 && self.endpoint_delta < 0.25) {
            return Err(Error::InvalidParameter(format!(
                "endpoint_delta must lie in (0, 1/4), got {}",
                self.endpoint_delta
            )));
        }
        if !(self.continuation_step > 0.0 && self.continuation_step < 0.1) {
            return Err(Error::InvalidParameter(format!(
                "continuation_step must lie in (0, 0.1), got {}",
                self.continuation_step
            )));
        }
        Ok(())
    }

    /// The lower-resolution companion used for error estimates.
    pub fn coarser(&self) -> Self {
        Self {
            gauss_order: (self.gauss_order.saturating_sub(6)).max(8),
            graded_mesh_levels: self.graded_mesh_levels.div_ceil(2),
            ..*self
        }
    }

    /// The higher-resolution companion used for refinement checks.
    pub fn refined(&self) -> Self {
        Self {
            gauss_order: self.gauss_order + 8,
            graded_mesh_levels: self.graded_mesh_levels * 2,
            ..*self
        }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to [0, 1].
#[derive(Debug, Clone)]
pub struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Self {
            nodes: x.iter().map(|&t| 0.5 * (t + 1.0)).collect(),
            weights: w.iter().map(|&v| 0.5 * v).collect(),
        }
    }
}

/// Product-integration rule for the (finite-part) integral of x^b f(x) over
/// [0, 1] at Gauss–Legendre nodes, exact for polynomial f of degree < m.
#[derive(Debug, Clone)]
pub struct FinitePartRule {
    pub exponent: Complex64,
    pub nodes: Vec<f64>,
    pub weights: Vec<Complex64>,
}

impl FinitePartRule {
    /// `None` when b + 1 is a non-positive integer, where the finite part
    /// of x^b has a pole.
    pub fn new(exponent: Complex64, m: usize) -> Option<Self> {
        let c = exponent + 1.0;
        if is_degenerate_exponent(exponent) {
            return None;
        }
        let base = UnitRule::new(m);
        let mut moments = Vec::with_capacity(m);
        let mut mom = 1.0 / c;
        moments.push(mom);
        for n in 1..m {
            let nf = n as f64;
            mom = -mom * (nf - c) / (c + nf);
            moments.push(mom);
        }
        let weights = base
            .nodes
            .iter()
            .zip(&base.weights)
            .map(|(&x, &gw)| {
                let y = 2.0 * x - 1.0;
                let (mut p0, mut p1) = (1.0, y);
                let mut acc = moments[0];
                for (n, &mn) in moments.iter().enumerate().skip(1) {
                    let pn = if n == 1 {
                        p1
                    } else {
                        let nf = n as f64;
                        let p2 = ((2.0 * nf - 1.0) * y * p1 - (nf - 1.0) * p0) / nf;
                        p0 = p1;
                        p1 = p2;
                        p2
                    };
                    acc += mn * (2.0 * n as f64 + 1.0) * pn;
                }
                acc * gw
            })
            .collect();
        Some(Self {
            exponent,
            nodes: base.nodes,
            weights,
        })
    }
}

/// Whether x^b has no finite part at 0 (b = -1, -2, ...).
pub fn is_degenerate_exponent(b: Complex64) -> bool {
    let c = b + 1.0;
    c.im.abs() < DEGENERATE_GAP && c.re < 0.5 && (c.re - c.re.round()).abs() < DEGENERATE_GAP
}

/// Linear functional approximating the finite part of
/// ∫₀¹ t^{e0} (1 − t)^{e1} g(t) dt as Σ wₖ g(tₖ) + left·g(0) + right·g(1).
#[derive(Debug, Clone)]
pub struct IntervalPlan {
    pub nodes: Vec<f64>,
    pub weights: Vec<Complex64>,
    pub left: Complex64,
    pub right: Complex64,
}

impl IntervalPlan {
    pub fn new(e0: Complex64, e1: Complex64, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let mut plan = IntervalPlan {
            nodes: Vec::new(),
            weights: Vec::new(),
            left: Complex64::new(0.0, 0.0),
            right: Complex64::new(0.0, 0.0),
        };
        let delta = spec.endpoint_delta;
        let (wn, ww, wend) = window(e0, spec)?;
        for (x, w) in wn.iter().zip(&ww) {
            let t = x;
            plan.nodes.push(*t);
            plan.weights.push(w * pow_real(1.0 - t, e1));
        }
        plan.left += wend;
        let (wn, ww, wend) = window(e1, spec)?;
        for (x, w) in wn.iter().zip(&ww) {
            let t = 1.0 - x;
            plan.nodes.push(t);
            plan.weights.push(w * pow_real(1.0 - x, e0));
        }
        plan.right += wend;

        let cells = graded_cells(delta, 0.5, spec.graded_mesh_levels);
        let rule = UnitRule::new(spec.gauss_order);
        for (a, b) in cells {
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let h = b - a;
                for t in [a + h * x, 1.0 - (a + h * x)] {
                    plan.nodes.push(t);
                    plan.weights
                        .push(pow_real(t, e0) * pow_real(1.0 - t, e1) * (w * h));
                }
            }
        }
        Ok(plan)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the plan to cofactor samples taken at `self.nodes`.
    pub fn apply(&self, values: &[Complex64], g0: Complex64, g1: Complex64) -> Complex64 {
        let mut acc = self.left * g0 + self.right * g1;
        for (w, v) in self.weights.iter().zip(values) {
            acc += w * v;
        }
        acc
    }

    /// Samples `g` at the plan nodes in parallel and applies the plan.
    pub fn integrate<F>(&self, g: F, g0: Complex64, g1: Complex64) -> Result<Complex64>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        let values: Vec<Complex64> = self
            .nodes
            .par_iter()
            .map(|&t| g(t))
            .collect::<Result<_>>()?;
        Ok(self.apply(&values, g0, g1))
    }
}

/// Nodes (distance from the singular endpoint), weights acting on the
/// cofactor h, and the coefficient of h(0) for ∫₀^δ t^e h(t) dt.
fn window(e: Complex64, spec: &QuadratureSpec) -> Result<(Vec<f64>, Vec<Complex64>, Complex64)> {
    let delta = spec.endpoint_delta;
    let m = spec.gauss_order;
    let degenerate = || {
        Error::OutOfSupportedRange(format!(
            "endpoint exponent {e} has no finite part (negative integer)"
        ))
    };
    if spec.subtraction_order == 0 {
        let rule = FinitePartRule::new(e, m).ok_or_else(degenerate)?;
        let scale = pow_real(delta, e + 1.0);
        let nodes = rule.nodes.iter().map(|x| delta * x).collect();
        let weights = rule.weights.iter().map(|w| w * scale).collect();
        return Ok((nodes, weights, Complex64::new(0.0, 0.0)));
    }
    let c = e + 1.0;
    if c.norm() < DEGENERATE_GAP {
        return Err(degenerate());
    }
    let rule = FinitePartRule::new(e + 1.0, m).ok_or_else(degenerate)?;
    let scale = pow_real(delta, e + 2.0);
    let mut end = pow_real(delta, c) / c;
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let t = delta * x;
        let wt = w * scale / t;
        nodes.push(t);
        weights.push(wt);
        end -= wt;
    }
    Ok((nodes, weights, end))
}

/// Geometric cells from `a` to `b` with ratio (b/a)^{1/levels}.
fn graded_cells(a: f64, b: f64, levels: usize) -> Vec<(f64, f64)> {
    let ratio = (b / a).powf(1.0 / levels as f64);
    let mut out = Vec::with_capacity(levels);
    let mut lo = a;
    for k in 1..=levels {
        let hi = if k == levels { b } else { a * ratio.powi(k as i32) };
        out.push((lo, hi));
        lo = hi;
    }
    out
}

/// x^e for real x > 0 on the principal branch.
pub fn pow_real(x: f64, e: Complex64) -> Complex64 {
    if e.im == 0.0 {
        return Complex64::new(x.powf(e.re), 0.0);
    }
    (e * x.ln()).exp()
}

/// An affine form c0 + c1·t1 + c2·t2 raised to a complex exponent.
#[derive(Debug, Clone, Copy)]
pub struct AffineFactor {
    pub coeffs: [f64; 3],
    pub exponent: Complex64,
}

impl AffineFactor {
    pub fn new(c0: f64, c1: f64, c2: f64, exponent: Complex64) -> Self {
        Self {
            coeffs: [c0, c1, c2],
            exponent,
        }
    }

    fn at(&self, p: [f64; 2]) -> f64 {
        self.coeffs[0] + self.coeffs[1] * p[0] + self.coeffs[2] * p[1]
    }
}

/// Quadrature plan on the simplex 0 ≤ t₂ ≤ t₁ ≤ 1 for ∏ ℓᵢ^{eᵢ} · Φ, where the
/// affine factors ℓᵢ vanish only on the boundary. Built from six corner
/// triangles (vertex, edge midpoint, centroid) in Duffy coordinates.
#[derive(Debug, Clone)]
pub struct SimplexPlan {
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<Complex64>,
}

const VANISH: f64 = 1e-14;

impl SimplexPlan {
    /// Errors with `OutOfSupportedRange` when a corner or edge exponent is a
    /// negative integer; callers step around those by continuation.
    pub fn new(factors: &[AffineFactor], spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let verts = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0]];
        let centroid = [2.0 / 3.0, 1.0 / 3.0];
        let mut plan = SimplexPlan {
            nodes: Vec::new(),
            weights: Vec::new(),
        };
        for (iv, v) in verts.iter().enumerate() {
            for (jv, u) in verts.iter().enumerate() {
                if iv == jv {
                    continue;
                }
                let a = [0.5 * (v[0] + u[0]), 0.5 * (v[1] + u[1])];
                plan.add_triangle(factors, *v, a, centroid, spec)?;
            }
        }
        Ok(plan)
    }

    fn add_triangle(
        &mut self,
        factors: &[AffineFactor],
        v: [f64; 2],
        a: [f64; 2],
        c: [f64; 2],
        spec: &QuadratureSpec,
    ) -> Result<()> {
        let jac = ((a[0] - v[0]) * (c[1] - a[1]) - (a[1] - v[1]) * (c[0] - a[0])).abs();
        let mut r_exp = Complex64::new(1.0, 0.0);
        let mut s_exp = Complex64::new(0.0, 0.0);
        let mut kinds = Vec::with_capacity(factors.len());
        for f in factors {
            let at_v = f.at(v).abs() < VANISH;
            let on_edge = at_v && f.at(a).abs() < VANISH;
            if at_v {
                r_exp += f.exponent;
            }
            if on_edge {
                s_exp += f.exponent;
            }
            kinds.push((at_v, on_edge));
        }
        let r_rule = RadialRule::new(r_exp, spec)?;
        let s_rule = RadialRule::new(s_exp, spec)?;
        for (r, wr) in r_rule.nodes.iter().zip(&r_rule.weights) {
            for (s, ws) in s_rule.nodes.iter().zip(&s_rule.weights) {
                let q = [a[0] + s * (c[0] - a[0]), a[1] + s * (c[1] - a[1])];
                let p = [v[0] + r * (q[0] - v[0]), v[1] + r * (q[1] - v[1])];
                let mut w = wr * ws * jac;
                for (f, &(at_v, on_edge)) in factors.iter().zip(&kinds) {
                    let base = if on_edge {
                        f.at(c)
                    } else if at_v {
                        f.at(q)
                    } else {
                        f.at(p)
                    };
                    w *= pow_real(base, f.exponent);
                }
                self.nodes.push(p);
                self.weights.push(w);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, values: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn integrate<F>(&self, phi: F) -> Result<Complex64>
    where
        F: Fn([f64; 2]) -> Result<Complex64> + Sync,
    {
        let values: Vec<Complex64> = self
            .nodes
            .par_iter()
            .map(|&p| phi(p))
            .collect::<Result<_>>()?;
        Ok(self.apply(&values))
    }
}

/// Rule for the finite part of ∫₀¹ x^b f(x) dx: a finite-part window at the
/// origin followed by dyadic Gauss–Legendre cells.
struct RadialRule {
    nodes: Vec<f64>,
    weights: Vec<Complex64>,
}

impl RadialRule {
    fn new(b: Complex64, spec: &QuadratureSpec) -> Result<Self> {
        let m = spec.gauss_order;
        let levels = spec.graded_mesh_levels;
        let first = 0.5f64.powi(levels as i32);
        let fp = FinitePartRule::new(b, m).ok_or_else(|| {
            Error::OutOfSupportedRange(format!("corner exponent {b} has no finite part"))
        })?;
        let scale = pow_real(first, b + 1.0);
        let mut nodes: Vec<f64> = fp.nodes.iter().map(|x| first * x).collect();
        let mut weights: Vec<Complex64> = fp.weights.iter().map(|w| w * scale).collect();
        let gl = UnitRule::new(m);
        let mut lo = first;
        for _ in 0..levels {
            let hi = 2.0 * lo;
            let h = hi - lo;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let t = lo + h * x;
                nodes.push(t);
                weights.push(pow_real(t, b) * (w * h));
            }
            lo = hi;
        }
        Ok(Self { nodes, weights })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn finite_part_rule_matches_moments() {
        // F.P. ∫₀¹ x^{-1.5} (1 + x + x²) dx = -2 + 2 + 1/1.5
        let rule = FinitePartRule::new(re(-1.5), 12).unwrap();
        let got: Complex64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * (1.0 + x + x * x))
            .sum();
        assert!((got - re(-2.0 + 2.0 + 1.0 / 1.5)).norm() < 1e-11, "{got}");
    }

    #[test]
    fn degenerate_exponents_are_rejected() {
        assert!(FinitePartRule::new(re(-1.0), 10).is_none());
        assert!(FinitePartRule::new(re(-2.0), 10).is_none());
        assert!(FinitePartRule::new(re(-1.01), 10).is_some());
    }

    #[test]
    fn interval_plan_beta_function() {
        // B(0.5, 0.5) = π with both subtraction modes
        for sub in [0, 1] {
            let spec = QuadratureSpec {
                subtraction_order: sub,
                ..Default::default()
            };
            let plan = IntervalPlan::new(re(-0.5), re(-0.5), &spec).unwrap();
            let v = plan.integrate(|_| Ok(re(1.0)), re(1.0), re(1.0)).unwrap();
            assert!((v - re(PI)).norm() < 1e-12, "sub={sub}: {v}");
        }
    }

    #[test]
    fn simplex_plan_polynomial() {
        let d = AffineFactor::new(0.0, 1.0, -1.0, re(2.0));
        let plan = SimplexPlan::new(&[d], &QuadratureSpec::default()).unwrap();
        let v = plan.integrate(|_| Ok(re(1.0))).unwrap();
        assert!((v - re(1.0 / 12.0)).norm() < 1e-14, "{v}");
    }
}
