//! Monte Carlo and deterministic studies built on the flow and the measures:
//! invariance of `mu_N`, Gaussian tails, truncation convergence rate and
//! norm growth along the flow.

mod convergence;
mod growth;
mod invariance;
mod tails;

pub use convergence::{convergence_study, power_law_data, ConvergenceConfig, ConvergenceRow, ConvergenceTable};
pub use growth::{norm_growth, GrowthConfig, GrowthFit, GrowthReport, GrowthRow, POWER_EXPONENTS, QUANTILES};
pub use invariance::{
    invariance_test, InvarianceConfig, InvarianceReport, InvarianceRun, ObservableDiff, DRIFT_TOL, MIN_ESS,
};
pub use tails::{tail_test, TailConfig, TailReport, TailRow};
