use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the cubic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gamma {
    /// γ = +1
    Focusing,
    /// γ = −1
    Defocusing,
}

impl Gamma {
    pub fn sign(self) -> f64 {
        match self {
            Gamma::Focusing => 1.0,
            Gamma::Defocusing => -1.0,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(Gamma::Focusing),
            -1 => Ok(Gamma::Defocusing),
            other => Err(Error::InvalidParameter(format!(
                "gamma must be +1 or -1, got {other}"
            ))),
        }
    }
}

impl std::fmt::Display for Gamma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Gamma::Focusing => "1",
            Gamma::Defocusing => "-1",
        })
    }
}

impl std::str::FromStr for Gamma {
    type Err = Error;

    /// `1`, `+1`, `focusing`, `-1` or `defocusing`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "+1" | "focusing" => Ok(Gamma::Focusing),
            "-1" | "defocusing" => Ok(Gamma::Defocusing),
            other => Err(Error::InvalidParameter(format!("gamma must be +1 or -1, got '{other}'"))),
        }
    }
}

/// Dispersion exponent, nonlinearity sign, truncation size and Sobolev index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub gamma: Gamma,
    pub n_modes: usize,
    pub s: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, gamma: Gamma, n_modes: usize, s: f64) -> Result<Self> {
        let params = Self {
            alpha,
            gamma,
            n_modes,
            s,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        // alpha = 1 is the classical cubic NLS.
        if !(self.alpha > 0.5 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (1/2, 1], got {}",
                self.alpha
            )));
        }
        if self.n_modes == 0 {
            return Err(Error::InvalidParameter("n_modes must be at least 1".into()));
        }
        if !self.s.is_finite() {
            return Err(Error::InvalidParameter("s must be finite".into()));
        }
        Ok(())
    }

    pub fn with_modes(self, n_modes: usize) -> Self {
        Self { n_modes, ..self }
    }

    /// Threshold `alpha - 1/2` below which the Gaussian measure lives on H^s.
    pub fn critical_s(&self) -> f64 {
        self.alpha - 0.5
    }

    /// `min(1e-3, 0.5 / N^{2 alpha})`
    pub fn default_dt(&self) -> f64 {
        (0.5 / (self.n_modes as f64).powf(2.0 * self.alpha)).min(1e-3)
    }
}
