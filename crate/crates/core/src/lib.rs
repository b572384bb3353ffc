//! Spectral simulation and Monte Carlo for the Galerkin-truncated periodic
//! fractional cubic Schrödinger equation
//!
//! ```text
//! i u_t + (-Δ)^α u = γ P_N(|u|^2 u),   x ∈ T = [0, 2π),   1/2 < α ≤ 1,  γ = ±1,
//! ```
//!
//! and its Gibbs measure `dμ_N ∝ e^{-H_N(u)} Π du_n`.
//!
//! - [`spectral`]: states, norms, mass, Hamiltonian, projections, grid transforms.
//! - [`dynamics`]: exact linear flow, split-step / RK4 / Picard integrators.
//! - [`measures`]: Gaussian and Gibbs samplers, importance weights, diagnostics.
//! - [`experiments`]: invariance, tail, truncation-rate and norm-growth studies.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod measures;
pub mod params;
pub mod spectral;
pub mod state;
pub mod transform;

#[cfg(test)]
mod test_util;

pub use num_complex::Complex64;

pub use crate::dynamics::{evolve, IntegratorConfig, Scheme, TrajectoryLog};
pub use crate::error::{Error, Result};
pub use crate::params::{Gamma, ModelParams};
pub use crate::state::{GridField, SpectralState};
