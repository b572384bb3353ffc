//! Exact operations on truncated states: transforms, norms, conserved
//! quantities and projections.
//!
//! Integrals over the circle are normalized by `1/2 pi`, so Parseval reads
//! `(1/2 pi) int |u|^2 = sum |u_n|^2` and the Hamiltonian below is exactly
//! conserved by the Galerkin vector field in [`crate::dynamics`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::state::{GridField, SpectralState};
use crate::transform::{SpectralWorkspace, Transform};

/// Japanese bracket `<n> = (1 + n^2)^{1/2}`.
pub fn bracket(n: i64) -> f64 {
    (1.0 + (n as f64).powi(2)).sqrt()
}

/// Fourier symbol of the fractional Laplacian, `|n|^{2 alpha}`; zero at `n = 0`.
pub fn fractional_symbol(n: i64, alpha: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        (n.unsigned_abs() as f64).powf(2.0 * alpha)
    }
}

fn check_grid(m_points: usize, n_modes: usize) -> Result<()> {
    let needed = 2 * n_modes + 1;
    if m_points < needed {
        return Err(Error::GridTooSmall {
            m_points,
            n_modes,
            needed,
        });
    }
    Ok(())
}

/// Evaluates the trigonometric polynomial on `m_points` equispaced points.
pub fn to_grid(state: &SpectralState, m_points: usize) -> Result<GridField> {
    check_grid(m_points, state.n_modes())?;
    let mut transform = Transform::new(m_points);
    let mut values = vec![Complex64::new(0.0, 0.0); m_points];
    transform.synthesize(state.coeffs(), &mut values);
    Ok(GridField::from_vec_unchecked(values))
}

/// Discrete Fourier coefficients `|n| <= n_modes` of grid data.
pub fn from_grid(field: &GridField, n_modes: usize) -> Result<SpectralState> {
    check_grid(field.m_points(), n_modes)?;
    let mut transform = Transform::new(field.m_points());
    let mut grid = field.values().to_vec();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * n_modes + 1];
    transform.analyze(&mut grid, &mut coeffs);
    Ok(SpectralState::from_vec_unchecked(n_modes, coeffs))
}

/// `||u||_{H^sigma} = (sum <n>^{2 sigma} |u_n|^2)^{1/2}`
pub fn sobolev_norm(state: &SpectralState, sigma: f64) -> f64 {
    state
        .modes()
        .map(|(n, c)| bracket(n).powf(2.0 * sigma) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `sum |u_n|^2`
pub fn mass(state: &SpectralState) -> f64 {
    state.coeffs().iter().map(|c| c.norm_sqr()).sum()
}

/// `(1/2 pi) int |u|^4`
pub fn quartic_integral(state: &SpectralState) -> f64 {
    SpectralWorkspace::new(state.n_modes()).quartic(state.coeffs())
}

/// `1/2 sum |n|^{2 alpha} |u_n|^2`
pub fn kinetic_energy(state: &SpectralState, alpha: f64) -> f64 {
    0.5 * state
        .modes()
        .map(|(n, c)| fractional_symbol(n, alpha) * c.norm_sqr())
        .sum::<f64>()
}

fn check_dims(state: &SpectralState, params: &ModelParams) -> Result<()> {
    if state.n_modes() != params.n_modes {
        return Err(Error::DimensionMismatch {
            expected: params.n_modes,
            got: state.n_modes(),
        });
    }
    Ok(())
}

/// `H_N(u) = 1/2 sum |n|^{2 alpha} |u_n|^2 - (gamma/4) (1/2 pi) int |u|^4`
pub fn hamiltonian(state: &SpectralState, params: &ModelParams) -> Result<f64> {
    check_dims(state, params)?;
    let mut ws = SpectralWorkspace::new(state.n_modes());
    Ok(hamiltonian_with(&mut ws, state, params))
}

pub(crate) fn hamiltonian_with(
    ws: &mut SpectralWorkspace,
    state: &SpectralState,
    params: &ModelParams,
) -> f64 {
    kinetic_energy(state, params.alpha) - 0.25 * params.gamma.sign() * ws.quartic(state.coeffs())
}

/// Zeroes every mode with `|n| > n_cut`, keeping the storage size.
pub fn project(state: &SpectralState, n_cut: usize) -> Result<SpectralState> {
    if n_cut > state.n_modes() {
        return Err(Error::InvalidParameter(format!(
            "projection cut {n_cut} exceeds N = {}",
            state.n_modes()
        )));
    }
    let coeffs = state
        .modes()
        .map(|(n, c)| {
            if n.unsigned_abs() as usize > n_cut {
                Complex64::new(0.0, 0.0)
            } else {
                c
            }
        })
        .collect();
    Ok(SpectralState::from_vec_unchecked(state.n_modes(), coeffs))
}

/// Like [`project`] but with `n_cut > N` treated as the identity.
pub fn project_clamped(state: &SpectralState, n_cut: usize) -> SpectralState {
    project(state, n_cut.min(state.n_modes())).expect("cut clamped to N")
}

/// Projection re-indexed to `n_cut` modes.
pub fn truncate(state: &SpectralState, n_cut: usize) -> Result<SpectralState> {
    if n_cut > state.n_modes() {
        return Err(Error::InvalidParameter(format!(
            "truncation {n_cut} exceeds N = {}",
            state.n_modes()
        )));
    }
    let offset = state.n_modes() - n_cut;
    let coeffs = state.coeffs()[offset..offset + 2 * n_cut + 1].to_vec();
    Ok(SpectralState::from_vec_unchecked(n_cut, coeffs))
}

/// Coordinates in the H^s-orthonormal basis `e^{inx} / <n>^s`: `<n>^s u_n`.
pub fn to_hs_coords(state: &SpectralState, s: f64) -> Vec<Complex64> {
    state.modes().map(|(n, c)| c * bracket(n).powf(s)).collect()
}

/// Inverse of [`to_hs_coords`].
pub fn from_hs_coords(n_modes: usize, coords: &[Complex64], s: f64) -> Result<SpectralState> {
    let coeffs = SpectralState::wavenumbers(n_modes)
        .zip(coords)
        .map(|(n, c)| c / bracket(n).powf(s))
        .collect();
    SpectralState::from_coeffs(n_modes, coeffs)
}
