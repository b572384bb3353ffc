use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spectral::fractional_symbol;
use crate::transform::SpectralWorkspace;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

// Two-stage Gauss–Legendre tableau.
const SQRT3_6: f64 = 0.288_675_134_594_812_9;
const GL_A: [[f64; 2]; 2] = [[0.25, 0.25 - SQRT3_6], [0.25 + SQRT3_6, 0.25]];
const GL_MAX_ITER: usize = 100;

fn axpy_into(out: &mut [Complex64], base: &[Complex64], terms: &[(f64, &[Complex64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = base[i];
        for (w, v) in terms {
            acc += v[i] * *w;
        }
        *o = acc;
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn l2_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Single-trajectory integrator kernels for one fixed [`ModelParams`].
///
/// Owns the FFT workspace and stage buffers so repeated steps allocate nothing.
pub struct Stepper {
    params: ModelParams,
    ws: SpectralWorkspace,
    symbol: Vec<f64>,
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
    fresh: Vec<Complex64>,
}

impl Stepper {
    pub fn new(params: ModelParams) -> Self {
        let len = 2 * params.n_modes + 1;
        let big_n = params.n_modes as i64;
        let symbol = (-big_n..=big_n)
            .map(|n| fractional_symbol(n, params.alpha))
            .collect();
        Self {
            params,
            ws: SpectralWorkspace::new(params.n_modes),
            symbol,
            k: std::array::from_fn(|_| vec![ZERO; len]),
            stage: vec![ZERO; len],
            fresh: vec![ZERO; len],
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn workspace(&mut self) -> &mut SpectralWorkspace {
        &mut self.ws
    }

    /// `u_n <- e^{i t |n|^{2 alpha}} u_n`
    pub fn linear_flow(&self, coeffs: &mut [Complex64], t: f64) {
        for (c, w) in coeffs.iter_mut().zip(&self.symbol) {
            if *w != 0.0 {
                *c *= Complex64::from_polar(1.0, t * w);
            }
        }
    }

    /// `P_N(|u|^2 u)`
    pub fn cubic_into(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        self.ws.cubic_into(coeffs, out);
    }

    /// Nonlinear part alone: `-i gamma P_N(|u|^2 u)`.
    fn nonlinear_into(ws: &mut SpectralWorkspace, gamma: f64, coeffs: &[Complex64], out: &mut [Complex64]) {
        ws.cubic_into(coeffs, out);
        let factor = -I * gamma;
        for o in out.iter_mut() {
            *o *= factor;
        }
    }

    /// Full Galerkin vector field `i |n|^{2 alpha} u_n - i gamma P_N(|u|^2 u)_n`.
    pub fn rhs_into(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        Self::rhs_raw(&mut self.ws, &self.symbol, self.params.gamma.sign(), coeffs, out);
    }

    fn rhs_raw(
        ws: &mut SpectralWorkspace,
        symbol: &[f64],
        gamma: f64,
        coeffs: &[Complex64],
        out: &mut [Complex64],
    ) {
        Self::nonlinear_into(ws, gamma, coeffs, out);
        for ((o, c), w) in out.iter_mut().zip(coeffs).zip(symbol) {
            *o += I * *w * c;
        }
    }

    /// Flow of `v' = -i gamma P_N(|v|^2 v)` over `dt` by the two-stage Gauss
    /// collocation method, stage equations iterated to round-off. Gauss
    /// methods preserve quadratic invariants, so mass is kept exactly.
    fn nonlinear_substep(&mut self, coeffs: &mut [Complex64], dt: f64) -> Result<()> {
        let gamma = self.params.gamma.sign();
        let scale = l2(coeffs);
        if scale == 0.0 {
            return Ok(());
        }
        let [k1, k2, _, _] = &mut self.k;
        Self::nonlinear_into(&mut self.ws, gamma, coeffs, k1);
        k2.copy_from_slice(k1);

        let tol = 2.0 * f64::EPSILON * scale;
        let mut prev = f64::INFINITY;
        let mut converged = false;
        for it in 0..GL_MAX_ITER {
            axpy_into(&mut self.stage, coeffs, &[(dt * GL_A[0][0], k1), (dt * GL_A[0][1], k2)]);
            Self::nonlinear_into(&mut self.ws, gamma, &self.stage, &mut self.fresh);
            let mut diff = l2_diff(&self.fresh, k1);
            std::mem::swap(k1, &mut self.fresh);

            axpy_into(&mut self.stage, coeffs, &[(dt * GL_A[1][0], k1), (dt * GL_A[1][1], k2)]);
            Self::nonlinear_into(&mut self.ws, gamma, &self.stage, &mut self.fresh);
            diff = diff.max(l2_diff(&self.fresh, k2));
            std::mem::swap(k2, &mut self.fresh);

            let increment = diff * dt.abs();
            if !increment.is_finite() {
                break;
            }
            // Stop at tolerance, or once round-off stops the contraction.
            if increment <= tol || (it >= 2 && increment >= 0.5 * prev && increment < 1e3 * tol) {
                converged = true;
                break;
            }
            prev = increment;
        }
        if !converged {
            return Err(Error::NotContracting {
                iterations: GL_MAX_ITER,
                increment: prev,
            });
        }
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c += (k1[i] + k2[i]) * (0.5 * dt);
        }
        Ok(())
    }

    /// Symmetric split step: half linear flow, Gauss nonlinear substep,
    /// half linear flow.
    pub fn strang(&mut self, coeffs: &mut [Complex64], dt: f64) -> Result<()> {
        self.linear_flow(coeffs, 0.5 * dt);
        self.nonlinear_substep(coeffs, dt)?;
        self.linear_flow(coeffs, 0.5 * dt);
        Ok(())
    }

    /// Classical four-stage Runge–Kutta on the Galerkin vector field.
    pub fn rk4(&mut self, coeffs: &mut [Complex64], dt: f64) {
        let gamma = self.params.gamma.sign();
        let [k1, k2, k3, k4] = &mut self.k;
        Self::rhs_raw(&mut self.ws, &self.symbol, gamma, coeffs, k1);
        axpy_into(&mut self.stage, coeffs, &[(0.5 * dt, k1)]);
        Self::rhs_raw(&mut self.ws, &self.symbol, gamma, &self.stage, k2);
        axpy_into(&mut self.stage, coeffs, &[(0.5 * dt, k2)]);
        Self::rhs_raw(&mut self.ws, &self.symbol, gamma, &self.stage, k3);
        axpy_into(&mut self.stage, coeffs, &[(dt, k3)]);
        Self::rhs_raw(&mut self.ws, &self.symbol, gamma, &self.stage, k4);
        let w = dt / 6.0;
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }
}
