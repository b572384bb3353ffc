//! Self-normalized importance-sampling estimators.
//!
//! With unnormalized weights `w_i = exp(log_w_i)` the estimate of `E[phi]` is
//! `sum w phi / sum w`, its delta-method standard error is
//! `sqrt(sum w^2 (phi - est)^2) / sum w`, and the effective sample size is
//! `(sum w)^2 / sum w^2`. Log-weights of `-inf` are zero weights.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub ess: f64,
}

/// Observable name to estimate.
pub type EnsembleReport = BTreeMap<String, Estimate>;

/// Weights rescaled so the largest is 1 (sums are then overflow-free).
pub fn normalized_weights(log_weights: &[f64]) -> Result<Vec<f64>> {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return Err(Error::ZeroWeights);
    }
    Ok(log_weights.iter().map(|lw| (lw - max).exp()).collect())
}

pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let sum: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    if sum_sq == 0.0 {
        0.0
    } else {
        sum * sum / sum_sq
    }
}

/// Weighted estimate of `E[value]`.
pub fn weighted_estimate(values: &[f64], log_weights: &[f64]) -> Result<Estimate> {
    if values.len() != log_weights.len() {
        return Err(Error::InvalidParameter(format!(
            "{} values but {} weights",
            values.len(),
            log_weights.len()
        )));
    }
    let w = normalized_weights(log_weights)?;
    let sum: f64 = w.iter().sum();
    let estimate = values.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / sum;
    let var = values
        .iter()
        .zip(&w)
        .filter(|(_, w)| **w > 0.0)
        .map(|(v, w)| (w * (v - estimate)).powi(2))
        .sum::<f64>();
    let ess = effective_sample_size(&w).min(values.len() as f64);
    Ok(Estimate {
        estimate,
        std_error: var.sqrt() / sum,
        n_samples: values.len(),
        ess,
    })
}

/// [`weighted_estimate`] of `observable` over weighted states.
pub fn ensemble_estimate<T, F>(samples: &[T], log_weight: impl Fn(&T) -> f64, observable: F) -> Result<Estimate>
where
    F: Fn(&T) -> f64,
{
    let values: Vec<f64> = samples.iter().map(&observable).collect();
    let lw: Vec<f64> = samples.iter().map(log_weight).collect();
    weighted_estimate(&values, &lw)
}

/// Smallest value whose cumulative normalized weight reaches `q`.
pub fn weighted_quantile(values: &[f64], weights: &[f64], q: f64) -> Result<f64> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroWeights);
    }
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| weights[i] > 0.0).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut acc = 0.0;
    for &i in &order {
        acc += weights[i] / total;
        if acc >= q * (1.0 - 1e-12) {
            return Ok(values[i]);
        }
    }
    Ok(values[*order.last().expect("positive total weight")])
}

/// Two-sample Kolmogorov–Smirnov distance between weighted empirical laws.
pub fn weighted_ks_distance(a: &[f64], wa: &[f64], b: &[f64], wb: &[f64]) -> Result<f64> {
    let (ta, tb): (f64, f64) = (wa.iter().sum(), wb.iter().sum());
    if !(ta > 0.0 && tb > 0.0) {
        return Err(Error::ZeroWeights);
    }
    let mut points: Vec<(f64, f64)> = a
        .iter()
        .zip(wa)
        .map(|(x, w)| (*x, w / ta))
        .chain(b.iter().zip(wb).map(|(x, w)| (*x, -w / tb)))
        .collect();
    points.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut diff: f64 = 0.0;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < points.len() {
        let x = points[i].0;
        while i < points.len() && points[i].0 == x {
            diff += points[i].1;
            i += 1;
        }
        sup = sup.max(diff.abs());
    }
    Ok(sup)
}

/// `diff / se`, with `0/0 = 0` and `x/0 = ±inf`.
pub fn z_score(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// KS critical distance `c(level) sqrt((n+m)/(n m))` for effective sizes.
pub fn ks_critical(ess_a: f64, ess_b: f64, level: f64) -> f64 {
    let c = (-0.5 * (level / 2.0).ln()).sqrt();
    c * ((ess_a + ess_b) / (ess_a * ess_b)).sqrt()
}
