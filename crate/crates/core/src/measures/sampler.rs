use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ensemble::Ensemble;
use super::rng::{stream, DOMAIN_GAUSSIAN, DOMAIN_GIBBS};
use super::{MeasureConfig, SamplingMethod, ZeroMode};
use crate::error::{Error, Result};
use crate::io::to_json_line;
use crate::spectral::mass;
use crate::state::SpectralState;
use crate::transform::SpectralWorkspace;

/// Proposal draws allowed per rejection sample before giving up; at the
/// 1e-4 acceptance floor this is reached with probability e^{-100}.
const MAX_DRAWS_PER_SAMPLE: u64 = 1_000_000;
const MIN_ACCEPTANCE: f64 = 1e-4;
const ACCEPTANCE_WINDOW: u64 = 10_000;

/// A state and the log of its unnormalized weight `dmu_N / d(proposal)`;
/// `-inf` marks a sample removed by the L² cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    #[serde(with = "state_json")]
    pub state: SpectralState,
    #[serde(with = "log_weight_json")]
    pub log_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<WeightedSample>,
    /// Proposal draws consumed (equals `samples.len()` for importance sampling).
    pub draws: u64,
}

impl SampleSet {
    pub fn acceptance_rate(&self) -> f64 {
        self.samples.len() as f64 / self.draws as f64
    }

    pub fn log_weights(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.log_weight).collect()
    }
}

/// Draws from the Gaussian measure `w_N`: for `1 <= |n| <= N`, `Re u_n` and
/// `Im u_n` are independent `N(0, |n|^{-2 alpha})`; the zero mode follows the
/// configured policy.
pub fn sample_gaussian<R: Rng + ?Sized>(config: &MeasureConfig, rng: &mut R) -> SpectralState {
    let params = &config.params;
    let coeffs = SpectralState::wavenumbers(params.n_modes)
        .map(|n| {
            let sd = if n == 0 {
                match config.zero_mode {
                    ZeroMode::Pinned => return Complex64::new(0.0, 0.0),
                    ZeroMode::GaussianProposal { sigma0 } => sigma0,
                }
            } else {
                (n.unsigned_abs() as f64).powf(-params.alpha)
            };
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * sd, im * sd)
        })
        .collect();
    SpectralState::from_vec_unchecked(params.n_modes, coeffs)
}

/// Log of `dmu_N / d(proposal)` up to a constant:
/// `(gamma/4) (1/2 pi) int |u|^4`, plus `|u_0|^2 / (2 sigma0^2)` for a Gaussian
/// zero-mode proposal; `-inf` when focusing and `||u||_{L^2} > B`.
pub fn gibbs_log_weight(state: &SpectralState, config: &MeasureConfig) -> f64 {
    let mut ws = SpectralWorkspace::new(state.n_modes());
    gibbs_log_weight_with(&mut ws, state, config)
}

pub(crate) fn gibbs_log_weight_with(
    ws: &mut SpectralWorkspace,
    state: &SpectralState,
    config: &MeasureConfig,
) -> f64 {
    if let Some(b) = config.l2_cutoff {
        if mass(state) > b * b {
            return f64::NEG_INFINITY;
        }
    }
    let mut lw = 0.25 * config.params.gamma.sign() * ws.quartic(state.coeffs());
    if let ZeroMode::GaussianProposal { sigma0 } = config.zero_mode {
        lw += state.get(0).norm_sqr() / (2.0 * sigma0 * sigma0);
    }
    lw
}

/// One Gaussian draw per index from the pure-Gaussian stream family.
pub fn sample_gaussian_ensemble(config: &MeasureConfig, ensemble: &Ensemble, count: usize) -> Result<Vec<SpectralState>> {
    config.validate()?;
    ensemble.map(count, || (), |_, i| {
        let mut rng = stream(ensemble.master_seed, DOMAIN_GAUSSIAN, i);
        Ok(sample_gaussian(config, &mut rng))
    })
}

/// Upper bound of [`gibbs_log_weight`] for the defocusing measure.
///
/// `q = (1/2 pi) int |u|^4 >= M(u)^2 >= |u_0|^4`, so with a Gaussian zero-mode
/// proposal `-q/4 + |u_0|^2/(2 sigma0^2) <= max_x (-x^2/4 + x/(2 sigma0^2))
/// = 1/(4 sigma0^4)`; with a pinned zero mode the bound is `0`.
pub fn rejection_envelope(config: &MeasureConfig) -> f64 {
    match config.zero_mode {
        ZeroMode::Pinned => 0.0,
        ZeroMode::GaussianProposal { sigma0 } => 0.25 / sigma0.powi(4),
    }
}

fn rejection_sample(
    config: &MeasureConfig,
    ws: &mut SpectralWorkspace,
    master_seed: u64,
    index: u64,
) -> Result<(WeightedSample, u64)> {
    let mut rng = stream(master_seed, DOMAIN_GIBBS, index);
    let envelope = rejection_envelope(config);
    for draws in 1..=MAX_DRAWS_PER_SAMPLE {
        let state = sample_gaussian(config, &mut rng);
        let lw = gibbs_log_weight_with(ws, &state, config);
        debug_assert!(lw <= envelope + 1e-12);
        let u: f64 = rng.random();
        if u.ln() < lw - envelope {
            return Ok((
                WeightedSample {
                    state,
                    log_weight: 0.0,
                },
                draws,
            ));
        }
    }
    Err(Error::AcceptanceTooLow {
        rate: 0.0,
        draws: MAX_DRAWS_PER_SAMPLE,
    })
}

/// Samples of the Gibbs measure `mu_N`.
///
/// Rejection (defocusing): each index redraws proposals from its own stream
/// until acceptance with probability `exp(log_weight - envelope)` (see
/// [`rejection_envelope`]), so the output is exactly `mu_N`-distributed with
/// unit weights. Importance: one
/// proposal per index carrying [`gibbs_log_weight`].
pub fn sample_gibbs(config: &MeasureConfig, ensemble: &Ensemble, count: usize) -> Result<SampleSet> {
    config.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let n_modes = config.params.n_modes;
    let seed = ensemble.master_seed;
    match config.method {
        SamplingMethod::Rejection => {
            let out = ensemble.map(count, || SpectralWorkspace::new(n_modes), |ws, i| {
                rejection_sample(config, ws, seed, i)
            })?;
            let draws: u64 = out.iter().map(|(_, d)| d).sum();
            let rate = count as f64 / draws as f64;
            if draws >= ACCEPTANCE_WINDOW && rate < MIN_ACCEPTANCE {
                return Err(Error::AcceptanceTooLow { rate, draws });
            }
            Ok(SampleSet {
                samples: out.into_iter().map(|(s, _)| s).collect(),
                draws,
            })
        }
        SamplingMethod::Importance => {
            let samples = ensemble.map(count, || SpectralWorkspace::new(n_modes), |ws, i| {
                let mut rng = stream(seed, DOMAIN_GIBBS, i);
                let state = sample_gaussian(config, &mut rng);
                let log_weight = gibbs_log_weight_with(ws, &state, config);
                Ok(WeightedSample { state, log_weight })
            })?;
            Ok(SampleSet {
                samples,
                draws: count as u64,
            })
        }
    }
}

/// JSON-lines: one `{"log_weight": .., "state": {..}}` object per sample.
pub fn write_samples<W: Write>(samples: &[WeightedSample], mut writer: W) -> Result<()> {
    for sample in samples {
        writer.write_all(to_json_line(sample)?.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_samples<R: BufRead>(reader: R) -> Result<Vec<WeightedSample>> {
    reader
        .lines()
        .filter(|l| !matches!(l, Ok(l) if l.trim().is_empty()))
        .map(|line| Ok(serde_json::from_str(&line?)?))
        .collect()
}

mod state_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::state::{SpectralState, StateFile};

    #[derive(Serialize, Deserialize)]
    struct Coeffs {
        n_modes: usize,
        coeffs: Vec<[f64; 2]>,
    }

    pub fn serialize<S: Serializer>(state: &SpectralState, s: S) -> Result<S::Ok, S::Error> {
        let file = StateFile::from_state(state, f64::NAN);
        Coeffs {
            n_modes: file.n_modes,
            coeffs: file.coeffs,
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SpectralState, D::Error> {
        let c = Coeffs::deserialize(d)?;
        StateFile {
            alpha: f64::NAN,
            n_modes: c.n_modes,
            coeffs: c.coeffs,
        }
        .into_state()
        .map(|(s, _)| s)
        .map_err(serde::de::Error::custom)
    }
}

mod log_weight_json {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(lw: &f64, s: S) -> Result<S::Ok, S::Error> {
        if lw.is_finite() {
            s.serialize_f64(*lw)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}
