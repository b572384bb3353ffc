//! Fixed-point iteration of the Duhamel formula, used as an
//! integrator-independent oracle.
//!
//! In the interaction picture `v(t) = L(-t) u(t)`, with `L(t)` the linear
//! propagator `e^{i t |n|^{2 alpha}}`, the truncated equation becomes
//! `v(t) = u0 - i gamma int_0^t L(-tau) P_N(|u|^2 u)(tau) dtau`. The integral is
//! evaluated at every node by a fourth-order cumulative rule.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stepper::Stepper;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::state::SpectralState;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    /// Upper bound on fixed-point sweeps.
    pub iterations: usize,
    /// Number of quadrature intervals on `[0, T]` (at least 3).
    pub nodes: usize,
    /// Sweeps stop once the sup-in-time l² increment falls below
    /// `tolerance * (1 + ||u0||)`.
    pub tolerance: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            iterations: 60,
            nodes: 400,
            tolerance: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardSolution {
    pub state: SpectralState,
    /// Distance between the last two iterates.
    pub increment: f64,
    pub iterations: usize,
}

pub(crate) fn picard_with(
    stepper: &mut Stepper,
    state: &SpectralState,
    t_final: f64,
    config: &PicardConfig,
) -> Result<PicardSolution> {
    if config.nodes < 3 || config.iterations == 0 {
        return Err(Error::InvalidParameter(
            "Picard needs at least 3 nodes and 1 iteration".into(),
        ));
    }
    let len = state.coeffs().len();
    let u0 = state.coeffs();
    let scale = 1.0 + u0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let q = config.nodes;
    let h = t_final / q as f64;
    let gamma = stepper.params().gamma.sign();

    let mut v: Vec<Vec<Complex64>> = vec![u0.to_vec(); q + 1];
    let mut g: Vec<Vec<Complex64>> = vec![vec![ZERO; len]; q + 1];
    let mut u = vec![ZERO; len];
    let mut cubic = vec![ZERO; len];

    let mut increment = f64::INFINITY;
    let mut history: Vec<f64> = Vec::new();
    let mut iterations = 0;
    while iterations < config.iterations {
        iterations += 1;
        for j in 0..=q {
            let tj = h * j as f64;
            u.copy_from_slice(&v[j]);
            stepper.linear_flow(&mut u, tj);
            stepper.cubic_into(&u, &mut cubic);
            stepper.linear_flow(&mut cubic, -tj);
            g[j].copy_from_slice(&cubic);
        }

        let mut acc = vec![ZERO; len];
        let mut max_diff: f64 = 0.0;
        for j in 0..=q {
            if j > 0 {
                let k = j - 1;
                let (a, b, c, d, w) = if k == 0 {
                    (0, 1, 2, 3, [9.0, 19.0, -5.0, 1.0])
                } else if k == q - 1 {
                    (q - 3, q - 2, q - 1, q, [1.0, -5.0, 19.0, 9.0])
                } else {
                    (k - 1, k, k + 1, k + 2, [-1.0, 13.0, 13.0, -1.0])
                };
                for i in 0..len {
                    acc[i] += (g[a][i] * w[0] + g[b][i] * w[1] + g[c][i] * w[2] + g[d][i] * w[3])
                        * (h / 24.0);
                }
            }
            let mut diff = 0.0;
            for i in 0..len {
                let fresh = u0[i] - I * gamma * acc[i];
                diff += (fresh - v[j][i]).norm_sqr();
                v[j][i] = fresh;
            }
            max_diff = max_diff.max(diff.sqrt());
        }
        increment = max_diff;
        if !increment.is_finite() {
            return Err(Error::NumericalAbort { last_good_time: 0.0 });
        }
        if increment <= config.tolerance * scale {
            break;
        }
        history.push(increment);
        let n = history.len();
        if n >= 4 && history[n - 1] > history[n - 2] && history[n - 2] > history[n - 3] {
            return Err(Error::NotContracting {
                iterations,
                increment,
            });
        }
    }

    let mut out = v.pop().expect("q + 1 nodes");
    stepper.linear_flow(&mut out, t_final);
    Ok(PicardSolution {
        state: SpectralState::from_vec_unchecked(state.n_modes(), out),
        increment,
        iterations,
    })
}

/// Solves the truncated equation on `[0, t_final]` by Picard iteration of
/// the Duhamel formula.
pub fn picard_solve(
    state: &SpectralState,
    params: &ModelParams,
    t_final: f64,
    config: &PicardConfig,
) -> Result<PicardSolution> {
    super::check_dims(state, params)?;
    let mut stepper = Stepper::new(*params);
    picard_with(&mut stepper, state, t_final, config)
}
