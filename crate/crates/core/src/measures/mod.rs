//! Gaussian measure `w_N`, Gibbs measure `mu_N`, weighted estimators and the
//! analytic diagnostics `lambda_k` and `Z_N`.
//!
//! `w_N` is the product of complex Gaussians with per-component variance
//! `|n|^{-2 alpha}` on `1 <= |n| <= N`. `mu_N` is `w_N` reweighted by
//! `exp((gamma/4) q(u))`, `q = (1/2 pi) int |u|^4`, restricted to
//! `||u||_{L^2} <= B` in the focusing case.

mod ensemble;
mod estimate;
mod lambda;
mod observable;
mod partition;
pub mod rng;
mod sampler;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Gamma, ModelParams};

pub use ensemble::Ensemble;
pub use estimate::{
    effective_sample_size, ensemble_estimate, ks_critical, normalized_weights, weighted_estimate,
    weighted_ks_distance, weighted_quantile, z_score, EnsembleReport, Estimate,
};
pub use lambda::{classify_growth, lambda_k, write_lambda_csv, Growth, GrowthFit};
pub(crate) use lambda::least_squares;
pub use observable::Observable;
pub use partition::{partition_stability, PartitionRow, PartitionTable};
pub use sampler::{
    gibbs_log_weight, rejection_envelope, sample_gaussian, sample_gaussian_ensemble, sample_gibbs, write_samples, read_samples,
    SampleSet, WeightedSample,
};

impl fmt::Display for SamplingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplingMethod::Rejection => "rejection",
            SamplingMethod::Importance => "importance",
        })
    }
}

impl FromStr for SamplingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rejection" => Ok(SamplingMethod::Rejection),
            "importance" => Ok(SamplingMethod::Importance),
            other => Err(Error::InvalidParameter(format!("unknown sampling method '{other}'"))),
        }
    }
}

/// Treatment of `u_0`, which carries no Gaussian factor in `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum ZeroMode {
    /// `u_0 = 0` in every sample. The flow does not preserve `u_0 = 0`, so
    /// this conditional measure is not invariant; use it for static studies.
    Pinned,
    /// `u_0` drawn with per-component s.d. `sigma0`, corrected in the weight.
    GaussianProposal { sigma0: f64 },
}

impl fmt::Display for ZeroMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroMode::Pinned => f.write_str("pinned"),
            ZeroMode::GaussianProposal { sigma0 } => write!(f, "gaussian:{sigma0}"),
        }
    }
}

impl FromStr for ZeroMode {
    type Err = Error;

    /// `pinned` or `gaussian:<sigma0>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "pinned" => Ok(ZeroMode::Pinned),
            Some(("gaussian", v)) => v
                .parse()
                .map(|sigma0| ZeroMode::GaussianProposal { sigma0 })
                .map_err(|_| Error::InvalidParameter(format!("bad sigma0 in '{s}'"))),
            _ => Err(Error::InvalidParameter(format!(
                "zero mode must be 'pinned' or 'gaussian:<sigma0>', got '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMethod {
    Rejection,
    Importance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub params: ModelParams,
    pub l2_cutoff: Option<f64>,
    pub zero_mode: ZeroMode,
    pub method: SamplingMethod,
}

impl MeasureConfig {
    /// Defocusing: pinned zero mode, rejection, no cutoff.
    /// Focusing: pinned zero mode, importance, `B = 2`.
    pub fn new(params: ModelParams) -> Self {
        match params.gamma {
            Gamma::Defocusing => Self {
                params,
                l2_cutoff: None,
                zero_mode: ZeroMode::Pinned,
                method: SamplingMethod::Rejection,
            },
            Gamma::Focusing => Self {
                params,
                l2_cutoff: Some(2.0),
                zero_mode: ZeroMode::Pinned,
                method: SamplingMethod::Importance,
            },
        }
    }

    pub fn with_cutoff(mut self, b: Option<f64>) -> Self {
        self.l2_cutoff = b;
        self
    }

    pub fn with_zero_mode(mut self, zero_mode: ZeroMode) -> Self {
        self.zero_mode = zero_mode;
        self
    }

    pub fn with_method(mut self, method: SamplingMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_modes(mut self, n_modes: usize) -> Self {
        self.params = self.params.with_modes(n_modes);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if let Some(b) = self.l2_cutoff {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!("L2 cutoff must be positive, got {b}")));
            }
        }
        if let ZeroMode::GaussianProposal { sigma0 } = self.zero_mode {
            if !(sigma0 > 0.0 && sigma0.is_finite()) {
                return Err(Error::InvalidParameter(format!("sigma0 must be positive, got {sigma0}")));
            }
        }
        if self.params.gamma == Gamma::Focusing && self.l2_cutoff.is_none() {
            return Err(Error::InvalidParameter(
                "the focusing measure needs an L2 cutoff".into(),
            ));
        }
        if self.method == SamplingMethod::Rejection && self.params.gamma != Gamma::Defocusing {
            return Err(Error::InvalidParameter(
                "rejection sampling needs gamma = -1".into(),
            ));
        }
        Ok(())
    }
}
