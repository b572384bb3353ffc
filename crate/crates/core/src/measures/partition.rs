use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ensemble::Ensemble;
use super::estimate::{effective_sample_size, z_score};
use super::rng::{stream, DOMAIN_PARTITION};
use super::sampler::{gibbs_log_weight_with, sample_gaussian};
use super::MeasureConfig;
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::transform::SpectralWorkspace;

/// Rows with fewer effective samples than this are flagged.
pub const MIN_ESS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub n_modes: usize,
    /// Plain Monte Carlo mean of the (unshifted) weight under the proposal.
    pub z: f64,
    pub std_error: f64,
    pub ess: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionTable {
    pub rows: Vec<PartitionRow>,
    /// Inverse-variance weighted constant fitted to all rows.
    pub constant_fit: f64,
    /// `(Z_last - fit) / sqrt(se_last^2 + se_fit^2)`.
    pub last_z_score: f64,
    /// Largest `|Z_i - fit| / sqrt(se_i^2 + se_fit^2)` over all rows.
    pub max_z_score: f64,
}

impl PartitionTable {
    /// Every row within 3 combined standard errors of the constant fit.
    pub fn no_growth(&self) -> bool {
        self.max_z_score <= 3.0
    }

    /// `(Z_a - Z_b) / sqrt(se_a^2 + se_b^2)`, `0` when both are exact.
    pub fn pair_z_score(&self, n_a: usize, n_b: usize) -> Option<f64> {
        let a = self.rows.iter().find(|r| r.n_modes == n_a)?;
        let b = self.rows.iter().find(|r| r.n_modes == n_b)?;
        Some(z_score(a.z - b.z, a.std_error.hypot(b.std_error)))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "N,Z,std_error,ess")?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.n_modes, fmt_f64(r.z), fmt_f64(r.std_error), fmt_f64(r.ess))?;
        }
        Ok(())
    }
}

/// Estimates `Z_N = E_w[exp((gamma/4) q) 1{||u|| <= B}]` for each `N` in
/// `n_list` from `count` proposal draws (zero-mode correction included when
/// the proposal samples `u_0`). Each `N` has its own random streams.
pub fn partition_stability(
    config: &MeasureConfig,
    n_list: &[usize],
    count: usize,
    ensemble: &Ensemble,
) -> Result<PartitionTable> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("N list must be nonempty and strictly ascending".into()));
    }
    if count < 2 {
        return Err(Error::InvalidParameter("count must be at least 2".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let cfg = config.with_modes(n);
        cfg.validate()?;
        let domain = DOMAIN_PARTITION + n as u64;
        let weights = ensemble.map(count, || SpectralWorkspace::new(n), |ws, i| {
            let mut rng = stream(ensemble.master_seed, domain, i);
            let state = sample_gaussian(&cfg, &mut rng);
            Ok(gibbs_log_weight_with(ws, &state, &cfg).exp())
        })?;
        let m = count as f64;
        let z = weights.iter().sum::<f64>() / m;
        let var = weights.iter().map(|w| (w - z).powi(2)).sum::<f64>() / (m - 1.0);
        let ess = effective_sample_size(&weights);
        rows.push(PartitionRow {
            n_modes: n,
            z,
            std_error: (var / m).sqrt(),
            ess,
            degenerate: ess < MIN_ESS,
        });
    }
    let (constant_fit, fit_se) = constant_fit(&rows);
    let last = rows.last().expect("nonempty");
    let last_z_score = z_score(last.z - constant_fit, last.std_error.hypot(fit_se));
    let max_z_score = rows
        .iter()
        .map(|r| z_score(r.z - constant_fit, r.std_error.hypot(fit_se)).abs())
        .fold(0.0, f64::max);
    Ok(PartitionTable {
        rows,
        constant_fit,
        last_z_score,
        max_z_score,
    })
}

fn constant_fit(rows: &[PartitionRow]) -> (f64, f64) {
    if rows.iter().any(|r| r.std_error == 0.0) {
        let exact: Vec<f64> = rows.iter().filter(|r| r.std_error == 0.0).map(|r| r.z).collect();
        return (exact.iter().sum::<f64>() / exact.len() as f64, 0.0);
    }
    let (mut sw, mut swz) = (0.0, 0.0);
    for r in rows {
        let w = r.std_error.powi(-2);
        sw += w;
        swz += w * r.z;
    }
    (swz / sw, sw.sqrt().recip())
}
