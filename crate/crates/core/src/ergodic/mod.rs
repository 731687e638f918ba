//! Weighted Cesàro trajectories of convolution powers, limit detection, and
//! the theorem-level checks built on them.

mod finite;
mod integer;
mod trajectory;
mod verdict;

pub use finite::{
    abs_pairing_average_finite, cesaro_allowance, kawada_ito_check, limit_measure, power_limit_check, smoothed,
    spectral_decomposition_check, uniform_convergence_gap, weighted_mean_check, CLASSIFY_TOL, IDEMPOTENCE_TOL,
};
pub use integer::{
    abs_pairing_average, log_log_slope, weighted_mean_check_z, z_decay_report, z_decay_report_with, DEFAULT_WINDOW,
};
pub use trajectory::{
    block_cesaro, detect_limit, power_trajectory, weighted_cesaro, CesaroTrajectory, LimitReport, LimitVerdict,
    TrajectoryKind, TAIL_LEN,
};
pub use verdict::{Hypothesis, NamedValues, Observation, TheoremVerdict, UNCONDITIONAL};
