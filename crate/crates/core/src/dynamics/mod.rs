//! Time evolution of the Galerkin-truncated fractional cubic NLS
//!
//! `i u_t + (-Δ)^α u = γ P_N(|u|^2 u)`,
//!
//! written on the Fourier side as `u_n' = i |n|^{2α} u_n - i γ P_N(|u|^2 u)_n`.
//! The linear propagator multiplies `u_n` by `e^{i t |n|^{2α}}`, so a plane
//! wave `a e^{inx}` evolves to `a e^{i(|n|^{2α} - γ|a|^2) t}`.

mod log;
mod picard;
mod stepper;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use self::log::{LogRow, TrajectoryLog};
pub use self::picard::{picard_solve, PicardConfig, PicardSolution};
pub use self::stepper::Stepper;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::{hamiltonian_with, mass, sobolev_norm};
use crate::state::SpectralState;
use crate::transform::SpectralWorkspace;

/// RK4 is linearly stable for `|lambda| dt <= 2 sqrt 2`; the stiffest
/// eigenvalue of the truncated system is `N^{2 alpha}`.
const RK4_STABILITY: f64 = 2.8;

pub(crate) fn check_dims(state: &SpectralState, params: &ModelParams) -> Result<()> {
    if state.n_modes() != params.n_modes {
        return Err(Error::DimensionMismatch {
            expected: params.n_modes,
            got: state.n_modes(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Strang,
    Rk4,
    Picard,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strang" => Ok(Scheme::Strang),
            "rk4" => Ok(Scheme::Rk4),
            "picard" => Ok(Scheme::Picard),
            other => Err(Error::InvalidParameter(format!("unknown scheme '{other}'"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Strang => "strang",
            Scheme::Rk4 => "rk4",
            Scheme::Picard => "picard",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub dt: f64,
    /// Steps between log rows.
    pub record_every: usize,
    /// Sobolev indices recorded in the trajectory log.
    pub log_sigmas: Vec<f64>,
    /// Per-step Picard settings (only used by [`Scheme::Picard`]).
    pub picard: PicardConfig,
}

impl IntegratorConfig {
    pub fn new(scheme: Scheme, dt: f64) -> Self {
        Self {
            scheme,
            dt,
            record_every: 1,
            log_sigmas: Vec::new(),
            picard: PicardConfig {
                iterations: 60,
                nodes: 4,
                tolerance: 1e-15,
            },
        }
    }

    /// Scheme with [`ModelParams::default_dt`].
    pub fn default_for(scheme: Scheme, params: &ModelParams) -> Self {
        Self::new(scheme, params.default_dt())
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k;
        self
    }

    pub fn log_sigmas(mut self, sigmas: Vec<f64>) -> Self {
        self.log_sigmas = sigmas;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Non-fatal warnings, e.g. an RK4 step above its stability limit.
    pub fn advisories(&self, params: &ModelParams) -> Vec<String> {
        let mut out = Vec::new();
        let limit = RK4_STABILITY / (params.n_modes as f64).powf(2.0 * params.alpha);
        if self.scheme == Scheme::Rk4 && self.dt > limit {
            out.push(format!(
                "rk4 step dt = {} exceeds the linear stability limit ~{limit:.3e} for N = {}",
                self.dt, params.n_modes
            ));
        }
        out
    }
}

/// `u_n -> e^{i t |n|^{2 alpha}} u_n`
pub fn linear_flow(state: &SpectralState, t: f64, alpha: f64) -> SpectralState {
    let coeffs = state
        .modes()
        .map(|(n, c)| {
            let w = crate::spectral::fractional_symbol(n, alpha);
            if w == 0.0 {
                c
            } else {
                c * Complex64::from_polar(1.0, t * w)
            }
        })
        .collect();
    SpectralState::from_vec_unchecked(state.n_modes(), coeffs)
}

/// Alias-free `P_N(|u|^2 u)`; the sign `gamma` is left to the caller.
pub fn cubic_term(state: &SpectralState) -> SpectralState {
    let mut ws = crate::transform::SpectralWorkspace::new(state.n_modes());
    let mut out = vec![Complex64::new(0.0, 0.0); state.coeffs().len()];
    ws.cubic_into(state.coeffs(), &mut out);
    SpectralState::from_vec_unchecked(state.n_modes(), out)
}

/// The Galerkin vector field.
pub fn rhs(state: &SpectralState, params: &ModelParams) -> Result<SpectralState> {
    check_dims(state, params)?;
    let mut stepper = Stepper::new(*params);
    let mut out = vec![Complex64::new(0.0, 0.0); state.coeffs().len()];
    stepper.rhs_into(state.coeffs(), &mut out);
    Ok(SpectralState::from_vec_unchecked(state.n_modes(), out))
}

fn finite_or_abort(coeffs: &[Complex64], last_good_time: f64) -> Result<()> {
    if coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NumericalAbort { last_good_time })
    }
}

/// One split step. Negative `dt` runs the flow backwards.
pub fn step_strang(state: &SpectralState, params: &ModelParams, dt: f64) -> Result<SpectralState> {
    check_dims(state, params)?;
    let mut stepper = Stepper::new(*params);
    let mut coeffs = state.coeffs().to_vec();
    stepper.strang(&mut coeffs, dt)?;
    finite_or_abort(&coeffs, 0.0)?;
    Ok(SpectralState::from_vec_unchecked(state.n_modes(), coeffs))
}

/// One classical RK4 step.
pub fn step_rk4(state: &SpectralState, params: &ModelParams, dt: f64) -> Result<SpectralState> {
    check_dims(state, params)?;
    let mut stepper = Stepper::new(*params);
    let mut coeffs = state.coeffs().to_vec();
    stepper.rk4(&mut coeffs, dt);
    finite_or_abort(&coeffs, 0.0)?;
    Ok(SpectralState::from_vec_unchecked(state.n_modes(), coeffs))
}

/// Reusable propagator `S_N(t)` for one parameter set and scheme.
pub struct Evolver {
    stepper: Stepper,
    config: IntegratorConfig,
}

impl Evolver {
    pub fn new(params: ModelParams, config: IntegratorConfig) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        Ok(Self {
            stepper: Stepper::new(params),
            config,
        })
    }

    pub fn params(&self) -> &ModelParams {
        self.stepper.params()
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.config
    }

    pub fn workspace(&mut self) -> &mut SpectralWorkspace {
        self.stepper.workspace()
    }

    fn step(&mut self, coeffs: &mut Vec<Complex64>, dt: f64, t_now: f64) -> Result<()> {
        match self.config.scheme {
            Scheme::Strang => self.stepper.strang(coeffs, dt)?,
            Scheme::Rk4 => self.stepper.rk4(coeffs, dt),
            Scheme::Picard => {
                let n = coeffs.len() / 2;
                let state = SpectralState::from_vec_unchecked(n, std::mem::take(coeffs));
                let sol = picard::picard_with(&mut self.stepper, &state, dt, &self.config.picard)?;
                *coeffs = sol.state.into_coeffs();
            }
        }
        finite_or_abort(coeffs, t_now)
    }

    /// Step sizes covering `[0, t]`: full steps, then one shortened step.
    fn schedule(&self, t: f64) -> (usize, f64, f64) {
        let dt = self.config.dt;
        let span = t.abs();
        let mut n_steps = (span / dt).ceil() as usize;
        // Snap away a final step that is pure round-off.
        if n_steps > 0 && span - (n_steps - 1) as f64 * dt <= 1e-9 * dt {
            n_steps -= 1;
        }
        let last = span - n_steps.saturating_sub(1) as f64 * dt;
        (n_steps, dt.copysign(t), last.copysign(t))
    }

    /// Advances `state` by time `t` (any sign).
    pub fn advance(&mut self, state: &mut SpectralState, t: f64) -> Result<()> {
        check_dims(state, self.params())?;
        let (n_steps, dt, last) = self.schedule(t);
        let n = state.n_modes();
        let mut coeffs = std::mem::replace(state, SpectralState::zeros(0)).into_coeffs();
        let mut result = Ok(());
        for k in 0..n_steps {
            let h = if k + 1 == n_steps { last } else { dt };
            if let Err(e) = self.step(&mut coeffs, h, k as f64 * dt) {
                result = Err(e);
                break;
            }
        }
        *state = SpectralState::from_vec_unchecked(n, coeffs);
        result
    }

    fn record(&mut self, log: &mut TrajectoryLog, t: f64, state: &SpectralState) {
        let params = *self.params();
        let ws = self.stepper.workspace();
        let row = LogRow {
            t,
            mass: mass(state),
            hamiltonian: hamiltonian_with(ws, state, &params),
            h_norms: log.sigmas.iter().map(|s| sobolev_norm(state, *s)).collect(),
            linf: ws.linf(state.coeffs()),
        };
        log.rows.push(row);
    }

    /// Evolves to `t_final`, logging every `record_every` steps and at both ends.
    pub fn evolve(&mut self, state: &SpectralState, t_final: f64) -> Result<(SpectralState, TrajectoryLog)> {
        check_dims(state, self.params())?;
        let mut log = TrajectoryLog::new(self.config.log_sigmas.clone());
        let (n_steps, dt, last) = self.schedule(t_final);
        let mut coeffs = state.coeffs().to_vec();
        let n = state.n_modes();
        self.record(&mut log, 0.0, state);
        for k in 0..n_steps {
            let final_step = k + 1 == n_steps;
            let h = if final_step { last } else { dt };
            self.step(&mut coeffs, h, k as f64 * dt)?;
            if final_step || (k + 1) % self.config.record_every == 0 {
                let t = if final_step { t_final } else { (k + 1) as f64 * dt };
                let snapshot = SpectralState::from_vec_unchecked(n, coeffs.clone());
                self.record(&mut log, t, &snapshot);
            }
        }
        Ok((SpectralState::from_vec_unchecked(n, coeffs), log))
    }
}

/// Composed steps covering `[0, t_final]`; see [`Evolver::evolve`].
pub fn evolve(
    state: &SpectralState,
    params: &ModelParams,
    config: &IntegratorConfig,
    t_final: f64,
) -> Result<(SpectralState, TrajectoryLog)> {
    Evolver::new(*params, config.clone())?.evolve(state, t_final)
}

#[cfg(test)]
mod tests;
