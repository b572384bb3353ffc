use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::measures::rng::{stream, DOMAIN_GAUSSIAN};
use crate::measures::{sample_gaussian, Ensemble, MeasureConfig};
use crate::spectral::sobolev_norm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailConfig {
    /// Gaussian proposal; the norm index is `measure.params.s`.
    pub measure: MeasureConfig,
    pub k_grid: Vec<f64>,
    pub count: usize,
}

impl TailConfig {
    pub fn validate(&self) -> Result<()> {
        self.measure.params.validate()?;
        if self.count == 0 {
            return Err(Error::InvalidParameter("count must be at least 1".into()));
        }
        if self.k_grid.is_empty()
            || self.k_grid.iter().any(|k| !(*k >= 0.0 && k.is_finite()))
            || self.k_grid.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidParameter(
                "K grid must be nonempty, nonnegative and strictly ascending".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub k: f64,
    pub empirical_prob: f64,
    /// Binomial `sqrt(p (1 - p) / count)`.
    pub std_error: f64,
    /// `exp(-K^2 / 4)`
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub config: TailConfig,
    pub master_seed: u64,
    pub rows: Vec<TailRow>,
    /// Smallest `C` with `p(K) <= C exp(-K^2/4)` on the whole grid.
    pub fitted_c: f64,
    /// `p(K) <= C exp(-K^2/4)` for every grid point with the fitted `C`.
    pub bound_holds: bool,
    /// `p` non-increasing in `K`.
    pub monotone: bool,
    /// Successive slopes of `log p` against `K^2` non-increasing (within
    /// three standard errors), over rows with `p > 0`.
    pub log_concave: bool,
}

impl TailReport {
    pub fn passes(&self) -> bool {
        self.bound_holds && self.monotone && self.log_concave
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "K,empirical_prob,std_error,bound")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_f64(r.k),
                fmt_f64(r.empirical_prob),
                fmt_f64(r.std_error),
                fmt_f64(r.bound)
            )?;
        }
        Ok(())
    }
}

/// Empirical `P(||u||_{H^s} > K)` under the Gaussian measure `w_N`.
pub fn tail_test(config: &TailConfig, ensemble: &Ensemble) -> Result<TailReport> {
    config.validate()?;
    let s = config.measure.params.s;
    let norms = ensemble.map(config.count, || (), |_, i| {
        let mut rng = stream(ensemble.master_seed, DOMAIN_GAUSSIAN, i);
        Ok(sobolev_norm(&sample_gaussian(&config.measure, &mut rng), s))
    })?;
    let m = config.count as f64;
    let rows: Vec<TailRow> = config
        .k_grid
        .iter()
        .map(|&k| {
            let p = norms.iter().filter(|x| **x > k).count() as f64 / m;
            TailRow {
                k,
                empirical_prob: p,
                std_error: (p * (1.0 - p) / m).sqrt(),
                bound: (-k * k / 4.0).exp(),
            }
        })
        .collect();
    let fitted_c = rows.iter().map(|r| r.empirical_prob / r.bound).fold(0.0, f64::max);
    let bound_holds = fitted_c.is_finite()
        && rows
            .iter()
            .all(|r| r.empirical_prob <= fitted_c * r.bound * (1.0 + 1e-12));
    let monotone = rows.windows(2).all(|w| w[1].empirical_prob <= w[0].empirical_prob);
    Ok(TailReport {
        config: config.clone(),
        master_seed: ensemble.master_seed,
        log_concave: log_concave(&rows, m),
        rows,
        fitted_c,
        bound_holds,
        monotone,
    })
}

fn log_concave(rows: &[TailRow], m: f64) -> bool {
    // (K^2, log p, se of log p); p = 1 has no sampling error in log p.
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.empirical_prob > 0.0)
        .map(|r| {
            let p = r.empirical_prob;
            let se = if p < 1.0 { r.std_error / p } else { (1.0 / m).min(1.0) };
            (r.k * r.k, p.ln(), se)
        })
        .collect();
    let slopes: Vec<(f64, f64)> = pts
        .windows(2)
        .map(|w| {
            let dx = w[1].0 - w[0].0;
            ((w[1].1 - w[0].1) / dx, w[0].2.hypot(w[1].2) / dx)
        })
        .collect();
    slopes
        .windows(2)
        .all(|w| w[1].0 <= w[0].0 + 3.0 * w[0].1.hypot(w[1].1))
}
