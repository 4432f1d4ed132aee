use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest argument step accepted between consecutive path samples.
const MAX_STEP: f64 = 0.9 * PI;

fn unwrap_logs(values: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<Complex64> = None;
    let mut arg = 0.0;
    for (i, v) in values.iter().enumerate() {
        if v.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("zero on branched path at index {i}")));
        }
        match prev {
            None => arg = v.arg(),
            Some(p) => {
                let step = (v / p).arg();
                if step.abs() >= MAX_STEP {
                    return Err(Error::BranchAmbiguity { index: i, step });
                }
                arg += step;
            }
        }
        out.push(Complex64::new(v.norm().ln(), arg));
        prev = Some(*v);
    }
    Ok(out)
}

/// values^exponent along a path, continuing the logarithm from the
/// principal branch at the first sample.
pub fn branched_pow(values: &[Complex64], exponent: Complex64) -> Result<Vec<Complex64>> {
    Ok(unwrap_logs(values)?
        .into_iter()
        .map(|l| (l * exponent).exp())
        .collect())
}

/// Continuous logarithm of a function sampled on an increasing grid; used to
/// pick the branch of log f(t) at arbitrary t inside the grid.
#[derive(Debug, Clone)]
pub struct LogTracker {
    grid: Vec<f64>,
    args: Vec<f64>,
}

impl LogTracker {
    pub fn new(grid: Vec<f64>, values: &[Complex64]) -> Result<Self> {
        let logs = unwrap_logs(values)?;
        Ok(Self {
            grid,
            args: logs.iter().map(|l| l.im).collect(),
        })
    }

    /// The branch of log(value) nearest the interpolated continuous argument at t.
    pub fn log(&self, t: f64, value: Complex64) -> Complex64 {
        let i = match self.grid.binary_search_by(|g| g.total_cmp(&t)) {
            Ok(i) => i,
            Err(i) => i.clamp(1, self.grid.len() - 1) - 1,
        };
        let j = (i + 1).min(self.grid.len() - 1);
        let reference = if i == j {
            self.args[i]
        } else {
            let w = ((t - self.grid[i]) / (self.grid[j] - self.grid[i])).clamp(0.0, 1.0);
            self.args[i] * (1.0 - w) + self.args[j] * w
        };
        let principal = value.arg();
        let k = ((reference - principal) / (2.0 * PI)).round();
        Complex64::new(value.norm().ln(), principal + 2.0 * PI * k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_values_use_real_powers() {
        let v: Vec<Complex64> = [0.5, 2.0, 3.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let out = branched_pow(&v, Complex64::new(-0.5, 0.0)).unwrap();
        for (o, x) in out.iter().zip([0.5f64, 2.0, 3.0]) {
            assert!((o - x.powf(-0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn full_turn_flips_square_root() {
        let v: Vec<Complex64> = (0..=16)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 16.0))
            .collect();
        let out = branched_pow(&v, Complex64::new(0.5, 0.0)).unwrap();
        assert!((out[16] + out[0]).norm() < 1e-14);
    }

    #[test]
    fn coarse_steps_are_ambiguous() {
        let v = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.01)];
        assert!(matches!(
            branched_pow(&v, Complex64::new(0.5, 0.0)),
            Err(Error::BranchAmbiguity { index: 1, .. })
        ));
    }
}
