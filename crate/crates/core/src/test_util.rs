//! Shared fixtures for unit tests.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::sobolev_norm;
use crate::state::SpectralState;

/// Random state with `|u_n| ~ <n>^{-1}`, rescaled so `||u||_{H^s} = norm`.
pub fn random_state(n_modes: usize, s: f64, norm: f64, seed: u64) -> SpectralState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = SpectralState::wavenumbers(n_modes)
        .map(|n| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) / (1.0 + (n as f64).powi(2)).sqrt()
        })
        .collect();
    let raw = SpectralState::from_coeffs(n_modes, coeffs).unwrap();
    let scale = norm / sobolev_norm(&raw, s);
    raw.scaled(Complex64::new(scale, 0.0))
}
