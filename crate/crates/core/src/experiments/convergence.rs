use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Evolver, IntegratorConfig, Scheme};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::measures::rng::{stream, DOMAIN_PHASES};
use crate::measures::Ensemble;
use crate::params::ModelParams;
use crate::spectral::{sobolev_norm, truncate};
use crate::state::SpectralState;

/// `u_n = rho_n e^{i theta_n}` with `rho_n = |n|^{-s-1/2-delta}`, `rho_0 = 1`
/// and `theta_n` uniform on `[0, 2 pi)`, drawn from a stream owned by `n`, so
/// the data on `|n| <= N` does not depend on the size of the array.
pub fn power_law_data(n_modes: usize, s: f64, delta: f64, seed: u64) -> Result<SpectralState> {
    if !(s.is_finite() && delta.is_finite()) {
        return Err(Error::InvalidParameter("s and delta must be finite".into()));
    }
    let coeffs = SpectralState::wavenumbers(n_modes)
        .map(|n| {
            let rho = if n == 0 {
                1.0
            } else {
                (n.unsigned_abs() as f64).powf(-s - 0.5 - delta)
            };
            // zigzag: 0, -1, 1, -2, 2, ...
            let index = ((n << 1) ^ (n >> 63)) as u64;
            let theta = stream(seed, DOMAIN_PHASES, index).random::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(rho, theta)
        })
        .collect();
    SpectralState::from_coeffs(n_modes, coeffs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    /// `params.s` is the regularity of the data; `params.n_modes` is ignored.
    pub params: ModelParams,
    pub s_prime: f64,
    pub n_list: Vec<usize>,
    pub n_ref: usize,
    pub time: f64,
    pub integrator: IntegratorConfig,
    pub delta: f64,
    pub phase_seed: u64,
}

impl ConvergenceConfig {
    /// RK4 with the default step at `n_ref`, `delta = 0.01`.
    pub fn new(params: ModelParams, s_prime: f64, n_list: Vec<usize>, n_ref: usize, time: f64, phase_seed: u64) -> Self {
        let dt = params.with_modes(n_ref).default_dt();
        Self {
            params,
            s_prime,
            n_list,
            n_ref,
            time,
            integrator: IntegratorConfig::new(Scheme::Rk4, dt),
            delta: 0.01,
            phase_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.with_modes(self.n_ref).validate()?;
        self.integrator.validate()?;
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) || self.n_list[0] == 0 {
            return Err(Error::InvalidParameter("N list must be positive and strictly ascending".into()));
        }
        let max = *self.n_list.last().expect("nonempty");
        if max > self.n_ref {
            return Err(Error::InvalidParameter(format!(
                "reference truncation {} is below the largest N {max}",
                self.n_ref
            )));
        }
        if !(self.s_prime < self.params.s) {
            return Err(Error::InvalidParameter("need s' < s".into()));
        }
        if !self.time.is_finite() {
            return Err(Error::InvalidParameter("time must be finite".into()));
        }
        Ok(())
    }

    /// The recommended margin `n_ref >= 4 max(N)`.
    pub fn advisories(&self) -> Vec<String> {
        let max = self.n_list.last().copied().unwrap_or(0);
        let mut out = self.integrator.advisories(&self.params.with_modes(self.n_ref));
        if self.n_ref < 4 * max {
            out.push(format!("n_ref = {} is below 4 max(N) = {}", self.n_ref, 4 * max));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_modes: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub config: ConvergenceConfig,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log N` (rows with
    /// positive error); `NaN` with fewer than two such rows.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in `log error`.
    pub residual: f64,
}

impl ConvergenceTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "N,error")?;
        for r in &self.rows {
            writeln!(w, "{},{}", r.n_modes, fmt_f64(r.error))?;
        }
        Ok(())
    }
}

/// Errors `||u_ref(T) - u_N(T)||_{H^{s'}}` of the truncated flows started
/// from `P_N u_0`, against the flow at `n_ref`; `u_N` is zero-extended.
pub fn convergence_study(config: &ConvergenceConfig, ensemble: &Ensemble) -> Result<ConvergenceTable> {
    config.validate()?;
    let u0 = power_law_data(config.n_ref, config.params.s, config.delta, config.phase_seed)?;
    // index 0: reference; others: the truncations
    let sizes: Vec<usize> = std::iter::once(config.n_ref).chain(config.n_list.iter().copied()).collect();
    let finals = ensemble.map(sizes.len(), || (), |_, i| {
        let n = sizes[i as usize];
        let params = config.params.with_modes(n);
        let mut state = truncate(&u0, n)?;
        Evolver::new(params, config.integrator.clone())?.advance(&mut state, config.time)?;
        Ok(state)
    })?;
    let reference = &finals[0];
    let rows = config
        .n_list
        .iter()
        .zip(&finals[1..])
        .map(|(&n, u)| {
            let ext = u.extended(config.n_ref)?;
            let diff: Vec<Complex64> = reference.coeffs().iter().zip(ext.coeffs()).map(|(a, b)| a - b).collect();
            let diff = SpectralState::from_coeffs(config.n_ref, diff)?;
            Ok(ConvergenceRow {
                n_modes: n,
                error: sobolev_norm(&diff, config.s_prime),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.error > 0.0)
        .map(|r| ((r.n_modes as f64).ln(), r.error.ln()))
        .unzip();
    let (slope, intercept, residual) = if x.len() >= 2 {
        let (slope, intercept) = crate::measures::least_squares(&x, &y);
        let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (slope, intercept, (rss / x.len() as f64).sqrt())
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    Ok(ConvergenceTable {
        config: config.clone(),
        rows,
        slope,
        intercept,
        residual,
    })
}
