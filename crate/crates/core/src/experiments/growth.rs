use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Evolver, IntegratorConfig};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::measures::{
    ks_critical, least_squares, normalized_weights, sample_gibbs, weighted_ks_distance, weighted_quantile, Ensemble,
    MeasureConfig,
};
use crate::spectral::{mass, sobolev_norm};

pub const QUANTILES: [f64; 3] = [0.5, 0.9, 0.99];
/// Exponents `c` of the competing power-growth models `a + b t^c`.
pub const POWER_EXPONENTS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub measure: MeasureConfig,
    pub integrator: IntegratorConfig,
    pub checkpoints: Vec<f64>,
    pub count: usize,
    pub sigma: f64,
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<()> {
        self.measure.validate()?;
        self.integrator.validate()?;
        if self.count == 0 {
            return Err(Error::InvalidParameter("count must be at least 1".into()));
        }
        if self.checkpoints.is_empty()
            || self.checkpoints[0] < 0.0
            || self.checkpoints.windows(2).any(|w| w[0] >= w[1])
            || !self.checkpoints.iter().all(|t| t.is_finite())
        {
            return Err(Error::InvalidParameter(
                "checkpoints must be nonnegative and strictly ascending".into(),
            ));
        }
        if !self.sigma.is_finite() {
            return Err(Error::InvalidParameter("sigma must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub t: f64,
    /// Weighted quantiles of `||u(t)||_{H^sigma}` at [`QUANTILES`].
    pub quantiles: [f64; 3],
    /// Weighted KS distance between the norm laws at `t` and `0`.
    pub ks_distance: f64,
    /// 5% two-sample critical distance at the ensemble ESS.
    pub ks_critical: f64,
    /// `max_i |M(u_i(t)) - M(u_i(0))| / M(u_i(0))`.
    pub max_mass_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// `c` of a power model; `None` for the `sqrt(log)` model.
    pub exponent: Option<f64>,
    pub a: f64,
    pub b: f64,
    pub rss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub config: GrowthConfig,
    pub master_seed: u64,
    pub ess: f64,
    pub rows: Vec<GrowthRow>,
    /// Trajectories that hit a non-finite state; the table stops at the
    /// last checkpoint every trajectory reached.
    pub aborted: usize,
    /// Fit of the 0.99 quantile to `a + b (log(1+t))^{1/2}`.
    pub sqrt_log_fit: Option<GrowthFit>,
    /// Fits to `a + b t^c` for `c` in [`POWER_EXPONENTS`].
    pub power_fits: Vec<GrowthFit>,
}

impl GrowthReport {
    /// `b >= 0` for the `sqrt(log)` model and its residual no larger than
    /// any power model's.
    pub fn sqrt_log_preferred(&self) -> bool {
        match &self.sqrt_log_fit {
            Some(f) => f.b >= 0.0 && self.power_fits.iter().all(|p| f.rss <= p.rss * (1.0 + 1e-9) + 1e-300),
            None => false,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,q50,q90,q99,ks_distance,ks_critical,max_mass_drift")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt_f64(r.t),
                fmt_f64(r.quantiles[0]),
                fmt_f64(r.quantiles[1]),
                fmt_f64(r.quantiles[2]),
                fmt_f64(r.ks_distance),
                fmt_f64(r.ks_critical),
                fmt_f64(r.max_mass_drift)
            )?;
        }
        Ok(())
    }
}

/// Norm statistics of a `mu_N` ensemble along the flow.
pub fn norm_growth(config: &GrowthConfig, ensemble: &Ensemble) -> Result<GrowthReport> {
    config.validate()?;
    let set = sample_gibbs(&config.measure, ensemble, config.count)?;
    let params = config.measure.params;
    let n_cp = config.checkpoints.len();
    // Per sample: (norm, mass) at each checkpoint reached.
    let paths = ensemble.map(
        config.count,
        || Evolver::new(params, config.integrator.clone()).expect("validated config"),
        |evolver, i| {
            let mut state = set.samples[i as usize].state.clone();
            let mut out = Vec::with_capacity(n_cp);
            let mut t = 0.0;
            for &cp in &config.checkpoints {
                match evolver.advance(&mut state, cp - t) {
                    Ok(()) => {}
                    Err(e) if e.is_numerical() => break,
                    Err(e) => return Err(e),
                }
                t = cp;
                out.push((sobolev_norm(&state, config.sigma), mass(&state)));
            }
            Ok(out)
        },
    )?;
    let weights = normalized_weights(&set.log_weights())?;
    let reached = paths.iter().map(Vec::len).min().unwrap_or(0);
    let aborted = paths.iter().filter(|p| p.len() < n_cp).count();
    let ess = crate::measures::effective_sample_size(&weights);
    // Mass drift is measured against the sample itself.
    let m0: Vec<f64> = set.samples.iter().map(|s| mass(&s.state)).collect();
    let norms_at = |j: usize| -> Vec<f64> { paths.iter().map(|p| p[j].0).collect() };
    let base: Vec<f64> = set.samples.iter().map(|s| sobolev_norm(&s.state, config.sigma)).collect();
    let mut rows = Vec::with_capacity(reached);
    for j in 0..reached {
        let norms = norms_at(j);
        let mut quantiles = [0.0; 3];
        for (q, out) in QUANTILES.iter().zip(&mut quantiles) {
            *out = weighted_quantile(&norms, &weights, *q)?;
        }
        let max_mass_drift = paths
            .iter()
            .zip(&m0)
            .zip(&weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|((p, m), _)| (p[j].1 - m).abs() / m.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        rows.push(GrowthRow {
            t: config.checkpoints[j],
            quantiles,
            ks_distance: weighted_ks_distance(&norms, &weights, &base, &weights)?,
            ks_critical: ks_critical(ess, ess, 0.05),
            max_mass_drift,
        });
    }
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let q99: Vec<f64> = rows.iter().map(|r| r.quantiles[2]).collect();
    let sqrt_log_fit = fit(&ts, &q99, None, |t| (1.0 + t).ln().sqrt());
    let power_fits = POWER_EXPONENTS
        .iter()
        .filter_map(|&c| fit(&ts, &q99, Some(c), |t| t.powf(c)))
        .collect();
    Ok(GrowthReport {
        config: config.clone(),
        master_seed: ensemble.master_seed,
        ess,
        rows,
        aborted,
        sqrt_log_fit,
        power_fits,
    })
}

fn fit(ts: &[f64], ys: &[f64], exponent: Option<f64>, f: impl Fn(f64) -> f64) -> Option<GrowthFit> {
    if ts.len() < 3 {
        return None;
    }
    let xs: Vec<f64> = ts.iter().map(|t| f(*t)).collect();
    let (b, a) = least_squares(&xs, ys);
    let rss = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    Some(GrowthFit { exponent, a, b, rss })
}
