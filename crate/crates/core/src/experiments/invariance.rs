use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Evolver, IntegratorConfig};
use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::measures::{sample_gibbs, weighted_estimate, z_score, Ensemble, MeasureConfig, Observable, WeightedSample};
use crate::transform::SpectralWorkspace;

/// Below this effective sample size a report is flagged as underpowered.
pub const MIN_ESS: f64 = 30.0;
/// Relative drift allowed for pathwise-conserved observables.
pub const DRIFT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceConfig {
    pub measure: MeasureConfig,
    pub integrator: IntegratorConfig,
    pub time: f64,
    pub count: usize,
    pub observables: Vec<Observable>,
    /// Also evolve samples `count..2 count` and report the doubled ensemble.
    pub doubling: bool,
}

impl InvarianceConfig {
    /// Default observable set and the default step for the scheme.
    pub fn new(measure: MeasureConfig, integrator: IntegratorConfig, time: f64, count: usize) -> Self {
        Self {
            observables: Observable::default_set(&measure.params),
            measure,
            integrator,
            time,
            count,
            doubling: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.measure.validate()?;
        self.integrator.validate()?;
        if self.count < 100 {
            return Err(Error::InvalidParameter(format!("count must be at least 100, got {}", self.count)));
        }
        if self.observables.is_empty() {
            return Err(Error::InvalidParameter("no observables".into()));
        }
        if !self.time.is_finite() {
            return Err(Error::InvalidParameter("time must be finite".into()));
        }
        Ok(())
    }
}

/// Paired difference statistics for one observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableDiff {
    pub name: String,
    pub mean_diff: f64,
    pub std_error: f64,
    /// `mean_diff / std_error`; `0` when both vanish.
    pub z_score: f64,
    pub pathwise_conserved: bool,
    /// `max_i |d_i| / max(1, |phi(u_i)|)` over nonzero-weight samples.
    pub max_relative_drift: f64,
}

impl ObservableDiff {
    /// `|z| < 3`, or for conserved observables drift below [`DRIFT_TOL`].
    pub fn passes(&self) -> bool {
        self.z_score.abs() < 3.0 || (self.pathwise_conserved && self.max_relative_drift < DRIFT_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRun {
    pub count: usize,
    pub ess: f64,
    pub underpowered: bool,
    pub observables: Vec<ObservableDiff>,
}

impl InvarianceRun {
    pub fn passes(&self) -> bool {
        self.observables.iter().all(ObservableDiff::passes)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.observables
            .iter()
            .filter(|o| !o.pathwise_conserved)
            .map(|o| o.z_score.abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub config: InvarianceConfig,
    pub master_seed: u64,
    /// Accepted / proposed for rejection sampling, `1` for importance.
    pub acceptance_rate: f64,
    pub run: InvarianceRun,
    pub doubled: Option<InvarianceRun>,
}

impl InvarianceReport {
    pub fn passes(&self) -> bool {
        self.run.passes() && self.doubled.as_ref().is_none_or(InvarianceRun::passes)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "count,observable,mean_diff,std_error,z_score,max_relative_drift")?;
        for run in std::iter::once(&self.run).chain(&self.doubled) {
            for o in &run.observables {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    run.count,
                    o.name,
                    fmt_f64(o.mean_diff),
                    fmt_f64(o.std_error),
                    fmt_f64(o.z_score),
                    fmt_f64(o.max_relative_drift)
                )?;
            }
        }
        Ok(())
    }
}

/// Paired test of `E_mu[phi(S_N(T) u) - phi(u)] = 0`: each sample `u_i` is
/// evolved to `T` and the weighted mean of `d_i = phi(S(T) u_i) - phi(u_i)`
/// is compared with its standard error.
pub fn invariance_test(config: &InvarianceConfig, ensemble: &Ensemble) -> Result<InvarianceReport> {
    config.validate()?;
    let total = if config.doubling { 2 * config.count } else { config.count };
    let set = sample_gibbs(&config.measure, ensemble, total)?;
    let params = config.measure.params;
    let observables = &config.observables;
    let k = observables.len();

    // Per sample: [d_1..d_k, phi_1(u)..phi_k(u)]
    let rows = ensemble.map(
        total,
        || Evolver::new(params, config.integrator.clone()).expect("validated config"),
        |evolver, i| {
            let WeightedSample { state, log_weight } = &set.samples[i as usize];
            let mut out = vec![0.0; 2 * k];
            if *log_weight == f64::NEG_INFINITY {
                return Ok(out);
            }
            let mut evolved = state.clone();
            evolver.advance(&mut evolved, config.time)?;
            let ws: &mut SpectralWorkspace = evolver.workspace();
            for (j, obs) in observables.iter().enumerate() {
                let before = obs.eval(state, &params, ws);
                let after = obs.eval(&evolved, &params, ws);
                out[j] = after - before;
                out[k + j] = before;
            }
            Ok(out)
        },
    )?;
    let log_weights = set.log_weights();
    let summarize = |m: usize| -> Result<InvarianceRun> {
        let lw = &log_weights[..m];
        let mut diffs = Vec::with_capacity(k);
        let mut ess = 0.0;
        for (j, obs) in observables.iter().enumerate() {
            let d: Vec<f64> = rows[..m].iter().map(|r| r[j]).collect();
            let est = weighted_estimate(&d, lw)?;
            ess = est.ess;
            let drift = rows[..m]
                .iter()
                .zip(lw)
                .filter(|(_, w)| **w > f64::NEG_INFINITY)
                .map(|(r, _)| r[j].abs() / r[k + j].abs().max(1.0))
                .fold(0.0, f64::max);
            diffs.push(ObservableDiff {
                name: obs.to_string(),
                mean_diff: est.estimate,
                std_error: est.std_error,
                z_score: z_score(est.estimate, est.std_error),
                pathwise_conserved: obs.pathwise_conserved(),
                max_relative_drift: drift,
            });
        }
        Ok(InvarianceRun {
            count: m,
            ess,
            underpowered: ess < MIN_ESS,
            observables: diffs,
        })
    };
    let run = summarize(config.count)?;
    let doubled = if config.doubling { Some(summarize(total)?) } else { None };
    Ok(InvarianceReport {
        config: config.clone(),
        master_seed: ensemble.master_seed,
        acceptance_rate: set.acceptance_rate(),
        run,
        doubled,
    })
}
