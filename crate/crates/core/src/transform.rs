//! FFT-backed transforms between truncated coefficients and collocation grids.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest power of two holding `2N+1` points (exact linear transforms).
pub fn linear_grid_size(n_modes: usize) -> usize {
    (2 * n_modes + 1).next_power_of_two()
}

/// Smallest power of two holding `4N+1` points: cubic products and quartic
/// integrals of degree-N polynomials are alias-free there.
pub fn quadrature_grid_size(n_modes: usize) -> usize {
    (4 * n_modes + 1).next_power_of_two()
}

/// Forward/inverse plans of one size plus scratch space.
pub struct Transform {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Transform {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            m,
            forward,
            inverse,
            scratch: vec![ZERO; scratch_len],
        }
    }

    pub fn m_points(&self) -> usize {
        self.m
    }

    /// `out_j = sum_n c_n e^{i n x_j}`. Requires `m >= coeffs.len()`.
    pub fn synthesize(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        debug_assert!(coeffs.len() <= self.m && out.len() == self.m);
        let big_n = (coeffs.len() / 2) as i64;
        out.fill(ZERO);
        for (i, c) in coeffs.iter().enumerate() {
            let n = i as i64 - big_n;
            out[n.rem_euclid(self.m as i64) as usize] = *c;
        }
        self.inverse.process_with_scratch(out, &mut self.scratch);
    }

    /// `c_n = (1/M) sum_j grid_j e^{-i n x_j}` for `|n| <= N`; `grid` is
    /// overwritten with its unnormalized DFT.
    pub fn analyze(&mut self, grid: &mut [Complex64], coeffs: &mut [Complex64]) {
        debug_assert!(coeffs.len() <= self.m && grid.len() == self.m);
        self.forward.process_with_scratch(grid, &mut self.scratch);
        let big_n = (coeffs.len() / 2) as i64;
        let norm = 1.0 / self.m as f64;
        for (i, c) in coeffs.iter_mut().enumerate() {
            let n = i as i64 - big_n;
            *c = grid[n.rem_euclid(self.m as i64) as usize] * norm;
        }
    }
}

/// Per-trajectory scratch for the nonlinear kernels at a fixed truncation.
pub struct SpectralWorkspace {
    n_modes: usize,
    transform: Transform,
    grid: Vec<Complex64>,
}

impl SpectralWorkspace {
    pub fn new(n_modes: usize) -> Self {
        let m = quadrature_grid_size(n_modes);
        Self {
            n_modes,
            transform: Transform::new(m),
            grid: vec![ZERO; m],
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn m_points(&self) -> usize {
        self.transform.m_points()
    }

    /// Values on the quadrature grid.
    pub fn grid_values(&mut self, coeffs: &[Complex64]) -> &[Complex64] {
        self.transform.synthesize(coeffs, &mut self.grid);
        &self.grid
    }

    /// `P_N(|u|^2 u)` written into `out`.
    pub fn cubic_into(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        self.transform.synthesize(coeffs, &mut self.grid);
        for v in self.grid.iter_mut() {
            *v *= v.norm_sqr();
        }
        self.transform.analyze(&mut self.grid, out);
    }

    /// `(1/2 pi) int |u|^4`, exact by quadrature on `M >= 4N+1` points.
    pub fn quartic(&mut self, coeffs: &[Complex64]) -> f64 {
        self.transform.synthesize(coeffs, &mut self.grid);
        let sum: f64 = self.grid.iter().map(|v| v.norm_sqr().powi(2)).sum();
        sum / self.grid.len() as f64
    }

    /// `max_j |u(x_j)|` on the quadrature grid.
    pub fn linf(&mut self, coeffs: &[Complex64]) -> f64 {
        self.grid_values(coeffs)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}
