use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::{hamiltonian_with, mass, sobolev_norm};
use crate::state::SpectralState;
use crate::transform::SpectralWorkspace;

/// Scalar functionals of a state used by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Observable {
    Mass,
    SobolevNorm(f64),
    Quartic,
    Hamiltonian,
    /// `|u_n|^2`
    ModeEnergy(i64),
    /// `Re u_n`
    ModeReal(i64),
}

impl Observable {
    pub fn eval(&self, state: &SpectralState, params: &ModelParams, ws: &mut SpectralWorkspace) -> f64 {
        match *self {
            Observable::Mass => mass(state),
            Observable::SobolevNorm(sigma) => sobolev_norm(state, sigma),
            Observable::Quartic => ws.quartic(state.coeffs()),
            Observable::Hamiltonian => hamiltonian_with(ws, state, params),
            Observable::ModeEnergy(n) => state.get(n).norm_sqr(),
            Observable::ModeReal(n) => state.get(n).re,
        }
    }

    /// Constant along every exact trajectory, so only integrator drift
    /// shows up in paired differences.
    pub fn pathwise_conserved(&self) -> bool {
        match self {
            Observable::Mass | Observable::Hamiltonian => true,
            // the H^0 norm is sqrt(mass)
            Observable::SobolevNorm(sigma) => *sigma == 0.0,
            _ => false,
        }
    }

    /// Mass, `H^0.1` and `H^s` norms, quartic integral, `|u_n|^2` for
    /// `|n| <= min(N, 4)` and `Re u_1`.
    pub fn default_set(params: &ModelParams) -> Vec<Observable> {
        let mut out = vec![Observable::Mass, Observable::SobolevNorm(0.1)];
        if params.s != 0.1 {
            out.push(Observable::SobolevNorm(params.s));
        }
        out.push(Observable::Quartic);
        let m = params.n_modes.min(4) as i64;
        out.extend((-m..=m).map(Observable::ModeEnergy));
        out.push(Observable::ModeReal(1));
        out
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Mass => write!(f, "mass"),
            Observable::SobolevNorm(s) => write!(f, "h_norm_{s}"),
            Observable::Quartic => write!(f, "quartic"),
            Observable::Hamiltonian => write!(f, "hamiltonian"),
            Observable::ModeEnergy(n) => write!(f, "abs2_mode_{n}"),
            Observable::ModeReal(n) => write!(f, "re_mode_{n}"),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown observable '{s}'"));
        match s {
            "mass" => return Ok(Observable::Mass),
            "quartic" => return Ok(Observable::Quartic),
            "hamiltonian" => return Ok(Observable::Hamiltonian),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("h_norm_") {
            return v.parse().map(Observable::SobolevNorm).map_err(|_| bad());
        }
        if let Some(v) = s.strip_prefix("abs2_mode_") {
            return v.parse().map(Observable::ModeEnergy).map_err(|_| bad());
        }
        if let Some(v) = s.strip_prefix("re_mode_") {
            return v.parse().map(Observable::ModeReal).map_err(|_| bad());
        }
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Gamma;

    #[test]
    fn names_round_trip() {
        let p = ModelParams::new(0.75, Gamma::Defocusing, 8, 0.2).unwrap();
        let set = Observable::default_set(&p);
        assert_eq!(set.len(), 1 + 2 + 1 + 9 + 1);
        for o in set {
            assert_eq!(o.to_string().parse::<Observable>().unwrap(), o);
        }
        assert!("nope".parse::<Observable>().is_err());
        assert!("h_norm_x".parse::<Observable>().is_err());
    }

    #[test]
    fn small_truncation_limits_modes() {
        let p = ModelParams::new(0.75, Gamma::Defocusing, 2, 0.1).unwrap();
        let set = Observable::default_set(&p);
        assert_eq!(set.len(), 1 + 1 + 1 + 5 + 1);
    }

    #[test]
    fn conserved_observables() {
        assert!(Observable::Mass.pathwise_conserved());
        assert!(Observable::SobolevNorm(0.0).pathwise_conserved());
        assert!(!Observable::SobolevNorm(0.1).pathwise_conserved());
        assert!(!Observable::Quartic.pathwise_conserved());
    }
}
