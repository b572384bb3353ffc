//! Initial-data specs for `evolve`.

use std::io::BufReader;
use std::path::Path;

use fracgibbs_core::experiments::power_law_data;
use fracgibbs_core::{Complex64, SpectralState};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    PlaneWave { n: i64, amplitude: f64 },
    PowerLaw { s: f64, delta: f64, seed: u64 },
    File(String),
}

impl InitSpec {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = |what: &str| CliError::Config(format!("init `{spec}`: {what}"));
        let parts: Vec<&str> = spec.split(':').collect();
        match parts[0] {
            "plane_wave" => {
                let [_, n, a] = parts[..] else {
                    return Err(bad("expected plane_wave:<n>:<a>"));
                };
                Ok(InitSpec::PlaneWave {
                    n: n.parse().map_err(|_| bad("bad mode index"))?,
                    amplitude: a.parse().map_err(|_| bad("bad amplitude"))?,
                })
            }
            "power_law" => {
                let [_, s, delta, seed] = parts[..] else {
                    return Err(bad("expected power_law:<s>:<delta>:<seed>"));
                };
                Ok(InitSpec::PowerLaw {
                    s: s.parse().map_err(|_| bad("bad s"))?,
                    delta: delta.parse().map_err(|_| bad("bad delta"))?,
                    seed: seed.parse().map_err(|_| bad("bad seed"))?,
                })
            }
            _ => Ok(InitSpec::File(spec.to_string())),
        }
    }

    /// Builds the state; files carry their own size, which must agree with
    /// `n_modes` when that is given.
    pub fn build(&self, n_modes: Option<usize>) -> Result<(SpectralState, Option<f64>), CliError> {
        let need = || CliError::Usage("--modes is required for builtin initial data".into());
        match self {
            InitSpec::PlaneWave { n, amplitude } => {
                let state = SpectralState::plane_wave(n_modes.ok_or_else(need)?, *n, Complex64::new(*amplitude, 0.0))?;
                Ok((state, None))
            }
            InitSpec::PowerLaw { s, delta, seed } => Ok((power_law_data(n_modes.ok_or_else(need)?, *s, *delta, *seed)?, None)),
            InitSpec::File(path) => {
                let file = std::fs::File::open(Path::new(path))
                    .map_err(|e| CliError::Config(format!("cannot read initial state {path}: {e}")))?;
                let (state, alpha) = SpectralState::read_json(BufReader::new(file))
                    .map_err(|e| CliError::Config(format!("initial state {path}: {e}")))?;
                if let Some(n) = n_modes {
                    if n != state.n_modes() {
                        return Err(CliError::Config(format!(
                            "--modes {n} does not match the {} modes in {path}",
                            state.n_modes()
                        )));
                    }
                }
                Ok((state, Some(alpha)))
            }
        }
    }
}
