//! Romberg integration with interval doubling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of integrand evaluations.
    pub budget: usize,
    /// Minimum number of doublings before convergence is accepted.
    pub min_levels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            rel_tol: 1e-6,
            abs_tol: 1e-300,
            budget: 1025,
            min_levels: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Difference between the last two Romberg estimates.
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// `∫_a^b f` by Romberg extrapolation. New nodes of each level are
/// evaluated in parallel; the sums run in a fixed order.
pub fn romberg<F>(a: f64, b: f64, f: F, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("bad interval [{a}, {b}]")));
    }
    if opts.budget < 3 {
        return Err(Error::InvalidParameter("quadrature budget below 3".into()));
    }
    let h0 = b - a;
    let fa = f(a)?;
    let fb = f(b)?;
    check_finite(fa)?;
    check_finite(fb)?;
    let mut evaluations = 2;
    let mut prev_row = vec![0.5 * h0 * (fa + fb)];
    let mut last = prev_row[0];
    let mut error_estimate = f64::INFINITY;
    let mut level = 0usize;
    loop {
        level += 1;
        let fresh = 1usize << (level - 1);
        if evaluations + fresh > opts.budget {
            return Ok(QuadratureResult {
                value: last,
                error_estimate,
                evaluations,
                converged: false,
            });
        }
        let h = h0 / (1u64 << level) as f64;
        let values: Vec<f64> = (0..fresh)
            .into_par_iter()
            .map(|k| f(a + (2 * k + 1) as f64 * h))
            .collect::<Result<_>>()?;
        for &v in &values {
            check_finite(v)?;
        }
        evaluations += fresh;
        let mid: f64 = values.iter().sum();
        let mut row = Vec::with_capacity(level + 1);
        row.push(0.5 * prev_row[0] + h * mid);
        let mut factor = 1.0;
        for m in 1..=level {
            factor *= 4.0;
            let r = row[m - 1] + (row[m - 1] - prev_row[m - 1]) / (factor - 1.0);
            row.push(r);
        }
        let value = row[level];
        error_estimate = (value - last).abs();
        last = value;
        prev_row = row;
        if level >= opts.min_levels && error_estimate <= (opts.rel_tol * value.abs()).max(opts.abs_tol) {
            return Ok(QuadratureResult {
                value,
                error_estimate,
                evaluations,
                converged: true,
            });
        }
    }
}

fn check_finite(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = romberg(0.0, 2.0, |x| Ok(x * x * x - x), QuadratureOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn decaying_exponential() {
        let r = romberg(0.0, 10.0, |t| Ok(t * (-3.0 * t).exp()), QuadratureOptions::default()).unwrap();
        let exact = (1.0 - (1.0 + 30.0) * (-30.0f64).exp()) / 9.0;
        assert!((r.value / exact - 1.0).abs() < 1e-6, "{} vs {exact}", r.value);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let opts = QuadratureOptions { budget: 9, ..Default::default() };
        let r = romberg(0.0, 1.0, |x: f64| Ok(x.sqrt()), opts).unwrap();
        assert!(!r.converged);
        assert!(r.evaluations <= 9);
    }

    #[test]
    fn zero_integrand() {
        let r = romberg(0.0, 5.0, |_| Ok(0.0), QuadratureOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn rejects_nan() {
        assert!(matches!(romberg(0.0, 1.0, |_| Ok(f64::NAN), QuadratureOptions::default()), Err(Error::NonFinite(_))));
    }
}
