//! `lambda_k = sum_{1 <= |n| <= k} |n|^{2s - 2 alpha}`: the trace of the
//! `H^s` covariance of `w` restricted to `|n| <= k`. It stays bounded iff
//! `s < alpha - 1/2`, the threshold for `w` to be a measure on `H^s`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;

/// Partial sums `lambda_1..=lambda_{k_max}` (compensated summation).
pub fn lambda_k(alpha: f64, s: f64, k_max: usize) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    if !(alpha.is_finite() && s.is_finite()) {
        return Err(Error::InvalidParameter("alpha and s must be finite".into()));
    }
    let p = 2.0 * s - 2.0 * alpha;
    let mut out = Vec::with_capacity(k_max);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for n in 1..=k_max {
        let term = 2.0 * (n as f64).powf(p);
        // Neumaier
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        out.push(sum + comp);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    Convergent,
    Logarithmic,
    Power,
}

impl Growth {
    pub fn is_divergent(self) -> bool {
        self != Growth::Convergent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub class: Growth,
    /// Estimated `d log D_j / d log 2^j` for the dyadic increments
    /// `D_j = lambda_{2^{j+1}} - lambda_{2^j}`; tends to `2s - 2 alpha + 1`,
    /// the power-growth exponent when positive.
    pub exponent: f64,
    pub last: f64,
}

/// Blocks used in the slope fit (the largest available).
const FIT_BLOCKS: usize = 6;
/// Slopes within this of zero count as logarithmic.
const SLOPE_TOL: f64 = 1e-3;

/// Classifies the growth of `lambdas` (as returned by [`lambda_k`]) from the
/// decay or growth of its dyadic block increments. Needs `k_max >= 8`.
pub fn classify_growth(lambdas: &[f64]) -> Result<GrowthFit> {
    let lam = |k: usize| lambdas[k - 1];
    let mut logs = Vec::new();
    let mut k = 1;
    while 2 * k <= lambdas.len() {
        logs.push((lam(2 * k) - lam(k)).log2());
        k *= 2;
    }
    if logs.len() < 3 {
        return Err(Error::InvalidParameter("need k_max >= 8 to classify growth".into()));
    }
    let tail = &logs[logs.len().saturating_sub(FIT_BLOCKS)..];
    let xs: Vec<f64> = (0..tail.len()).map(|j| j as f64).collect();
    let (exponent, _) = least_squares(&xs, tail);
    let class = if exponent < -SLOPE_TOL {
        Growth::Convergent
    } else if exponent <= SLOPE_TOL {
        Growth::Logarithmic
    } else {
        Growth::Power
    };
    Ok(GrowthFit {
        class,
        exponent,
        last: lam(lambdas.len()),
    })
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub(crate) fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `k,lambda_k` rows for `k = 1, 1 + stride, ...`, always ending at `k_max`.
pub fn write_lambda_csv<W: Write>(lambdas: &[f64], stride: usize, mut w: W) -> Result<()> {
    let stride = stride.max(1);
    writeln!(w, "k,lambda_k")?;
    for (i, l) in lambdas.iter().enumerate() {
        if i % stride == 0 || i + 1 == lambdas.len() {
            writeln!(w, "{},{}", i + 1, fmt_f64(*l))?;
        }
    }
    Ok(())
}
