use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{Measure, PowerCache, SUPPORT_TOL};
use crate::spectral::geometric_checkpoints;
use crate::weights::WeightSequence;

/// Number of consecutive final values kept for oscillation detection.
pub const TAIL_LEN: usize = 8;

const NORM_SLACK: f64 = 1e-9;
/// Checkpoint steps below this are rounding noise and not held to monotonicity.
const NOISE_FLOOR: f64 = 64.0 * f64::EPSILON;
/// Allowed growth between consecutive steps; squaring doubles rounding error
/// in `μ^n`, so a converged doubling trajectory drifts by about 2× per step.
const DRIFT_GROWTH: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    /// `m_n = (1/n) Σ_{i=1..n} a_i μ^i`.
    WeightedCesaro,
    /// `μ^n`.
    Powers,
    /// `W_n = (1/n) Σ_{i=n+1..2n} μ^i` at `n = B·2^k`.
    BlockCesaro,
}

/// Values of a sequence of measures at increasing checkpoints.
#[derive(Debug, Clone)]
pub struct CesaroTrajectory<M> {
    pub kind: TrajectoryKind,
    pub measure: M,
    /// `sup_i |a_i|`; 1 for unweighted trajectories.
    pub weight_bound: f64,
    pub window: Option<(i64, i64)>,
    pub checkpoints: Vec<u64>,
    pub values: Vec<M>,
    /// Up to [`TAIL_LEN`] consecutive values ending at the last checkpoint.
    pub tail: Vec<(u64, M)>,
    /// `max_n ‖m_n‖₁` over the checkpoints.
    pub max_norm: f64,
}

impl<M: Measure> CesaroTrajectory<M> {
    pub fn last(&self) -> Option<(u64, &M)> {
        self.checkpoints.last().copied().zip(self.values.last())
    }

    pub fn n_max(&self) -> u64 {
        self.checkpoints.last().copied().unwrap_or(0)
    }

    /// `(n, index, value)` rows over the observed coordinates.
    pub fn rows(&self) -> Vec<(u64, i64, Complex64)> {
        let mut out = Vec::new();
        for (&n, m) in self.checkpoints.iter().zip(&self.values) {
            let idx = m.observe_indices(self.window);
            let vals = m.observe(self.window);
            out.extend(idx.into_iter().zip(vals).map(|(i, v)| (n, i, v)));
        }
        out
    }

    pub fn distance(&self, a: &M, b: &M) -> f64 {
        observed_distance(a, b, self.window)
    }
}

pub(crate) fn observed_distance<M: Measure>(a: &M, b: &M, window: Option<(i64, i64)>) -> f64 {
    a.observe(window)
        .iter()
        .zip(b.observe(window))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn validate_horizon(n_max: u64) -> Result<()> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    Ok(())
}

/// Weighted Cesàro averages of the powers of `μ`, accumulated with
/// `S_n = S_{n−1} + a_n μ^n` and recorded at geometric checkpoints.
pub fn weighted_cesaro<M: Measure>(
    mu: &M,
    w: &WeightSequence,
    n_max: u64,
    window: Option<(i64, i64)>,
) -> Result<CesaroTrajectory<M>> {
    validate_horizon(n_max)?;
    mu.ensure_power_bounded()?;
    let probability = mu.is_probability(SUPPORT_TOL.sqrt());
    let bound = w.bound();
    let checkpoints = geometric_checkpoints(n_max);
    let mut next = 0;
    let mut cache = PowerCache::new(mu.clone());
    let mut sum = mu.zero();
    let mut values = Vec::with_capacity(checkpoints.len());
    let mut tail = Vec::with_capacity(TAIL_LEN);
    let mut max_norm = 0.0f64;
    for n in 1..=n_max {
        let a = w.weight_at(n)?;
        let power = cache.advance()?;
        sum.add_scaled(power, a)?;
        let at_checkpoint = checkpoints.get(next) == Some(&n);
        let in_tail = n_max - n < TAIL_LEN as u64;
        if !(at_checkpoint || in_tail) {
            continue;
        }
        let m = sum.scale(Complex64::new(1.0 / n as f64, 0.0));
        if at_checkpoint {
            let norm = m.tv_norm();
            max_norm = max_norm.max(norm);
            if probability && norm > bound * (1.0 + NORM_SLACK) + NORM_SLACK {
                return Err(Error::OracleDisagreement(format!(
                    "‖m_{n}‖₁ = {norm} exceeds sup|a_i| = {bound}"
                )));
            }
            values.push(m.clone());
            next += 1;
        }
        if in_tail {
            tail.push((n, m));
        }
    }
    Ok(CesaroTrajectory {
        kind: TrajectoryKind::WeightedCesaro,
        measure: mu.clone(),
        weight_bound: bound,
        window,
        checkpoints,
        values,
        tail,
        max_norm,
    })
}

/// Raw powers `μ^n` at geometric checkpoints.
pub fn power_trajectory<M: Measure>(
    mu: &M,
    n_max: u64,
    window: Option<(i64, i64)>,
) -> Result<CesaroTrajectory<M>> {
    validate_horizon(n_max)?;
    let checkpoints = geometric_checkpoints(n_max);
    let mut next = 0;
    let mut cache = PowerCache::new(mu.clone());
    let mut values = Vec::with_capacity(checkpoints.len());
    let mut tail = Vec::with_capacity(TAIL_LEN);
    let mut max_norm = 0.0f64;
    for n in 1..=n_max {
        let power = cache.advance()?;
        if checkpoints.get(next) == Some(&n) {
            max_norm = max_norm.max(power.tv_norm());
            values.push(power.clone());
            next += 1;
        }
        if n_max - n < TAIL_LEN as u64 {
            tail.push((n, power.clone()));
        }
    }
    Ok(CesaroTrajectory {
        kind: TrajectoryKind::Powers,
        measure: mu.clone(),
        weight_bound: 1.0,
        window,
        checkpoints,
        values,
        tail,
        max_norm,
    })
}

/// Block averages `W_n = (1/n) Σ_{i=n+1..2n} μ^i` for `n = block·2^k ≤ n_max`,
/// obtained by doubling: `S_{2n} = S_n + μ^n ∗ S_n`, `μ^{2n} = μ^n ∗ μ^n`.
/// With `stop_tol`, doubling ends as soon as two consecutive steps are within
/// it; squaring doubles phase errors, so running past that point only adds
/// rounding drift.
pub fn block_cesaro<M: Measure>(mu: &M, block: u64, n_max: u64, stop_tol: Option<f64>) -> Result<CesaroTrajectory<M>> {
    let block = block.max(1);
    if n_max < block {
        return Err(Error::InvalidArgument(format!(
            "horizon {n_max} is shorter than the block length {block}"
        )));
    }
    let mut power = mu.clone();
    let mut sum = mu.clone();
    for _ in 1..block {
        power = power.convolve(mu)?;
        sum.add_scaled(&power, Complex64::new(1.0, 0.0))?;
    }
    let mut n = block;
    let mut checkpoints = Vec::new();
    let mut values = Vec::new();
    let mut max_norm = 0.0f64;
    loop {
        let w = power.convolve(&sum)?.scale(Complex64::new(1.0 / n as f64, 0.0));
        max_norm = max_norm.max(w.tv_norm());
        checkpoints.push(n);
        values.push(w);
        if let Some(tol) = stop_tol {
            if settled(&values, None, tol) {
                break;
            }
        }
        match n.checked_mul(2) {
            Some(next) if next <= n_max => {
                let shifted = power.convolve(&sum)?;
                sum.add_scaled(&shifted, Complex64::new(1.0, 0.0))?;
                power = power.convolve(&power)?;
                n = next;
            }
            _ => break,
        }
    }
    Ok(CesaroTrajectory {
        kind: TrajectoryKind::BlockCesaro,
        measure: mu.clone(),
        weight_bound: 1.0,
        window: None,
        checkpoints,
        values,
        tail: Vec::new(),
        max_norm,
    })
}

/// The last two checkpoint steps are within `tol` and not growing faster
/// than rounding drift.
fn settled<M: Measure>(values: &[M], window: Option<(i64, i64)>, tol: f64) -> bool {
    let k = values.len();
    if k < 3 {
        return false;
    }
    let d1 = observed_distance(&values[k - 3], &values[k - 2], window);
    let d2 = observed_distance(&values[k - 2], &values[k - 1], window);
    d1 <= tol && d2 <= tol && d2 <= (DRIFT_GROWTH * d1).max(NOISE_FLOOR)
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum LimitVerdict<M> {
    Converged {
        limit: M,
        /// `(n_k, ‖v_k − v_{k−1}‖∞)` between consecutive checkpoints.
        rate_trace: Vec<(u64, f64)>,
    },
    Diverged {
        /// Two values the sequence keeps alternating between.
        witness: (M, M),
        period: usize,
        amplitude: f64,
    },
    Undecided {
        residual: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport<M> {
    pub verdict: LimitVerdict<M>,
    pub n_final: u64,
    pub final_value: M,
    pub target: Option<M>,
    pub target_source: Option<String>,
    /// `‖m_{n_final} − target‖∞` on the observed coordinates.
    pub sup_distance: Option<f64>,
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(skip)]
    window: Option<(i64, i64)>,
}

impl<M: Measure> LimitReport<M> {
    pub fn is_converged(&self) -> bool {
        matches!(self.verdict, LimitVerdict::Converged { .. })
    }

    pub fn limit(&self) -> Option<&M> {
        match &self.verdict {
            LimitVerdict::Converged { limit, .. } => Some(limit),
            _ => None,
        }
    }

    pub fn with_target(mut self, target: M, source: impl Into<String>) -> Self {
        self.sup_distance = Some(observed_distance(&self.final_value, &target, self.window));
        self.target = Some(target);
        self.target_source = Some(source.into());
        self
    }
}

/// Finds the smallest period `p ≥ 2` such that the tail repeats with period
/// `p` to within `tol` while moving by more than `floor` inside one period.
fn oscillation<M: Measure>(
    tail: &[(u64, M)],
    window: Option<(i64, i64)>,
    tol: f64,
    floor: f64,
) -> Option<(usize, f64)> {
    let k = tail.len().checked_sub(1)?;
    let d = |i: usize, j: usize| observed_distance(&tail[i].1, &tail[j].1, window);
    (2..=k).find_map(|p| {
        let repeats = (p..=k).all(|i| d(i, i - p) <= tol);
        let amplitude = (1..p).map(|j| d(k, k - j)).fold(0.0, f64::max);
        (repeats && amplitude > floor).then_some((p, amplitude))
    })
}

/// Classifies a trajectory as converged, diverged or undecided.
pub fn detect_limit<M: Measure>(traj: &CesaroTrajectory<M>, tol: f64) -> LimitReport<M> {
    let steps: Vec<(u64, f64)> = traj
        .values
        .windows(2)
        .zip(traj.checkpoints.iter().skip(1))
        .map(|(v, &n)| (n, traj.distance(&v[0], &v[1])))
        .collect();
    let (n_final, final_value) = match traj.last() {
        Some((n, m)) => (n, m.clone()),
        None => (0, traj.measure.zero()),
    };
    // A Cesàro mean moves by at most 2·sup|a|/n per step, so alternation
    // below that size is ordinary averaging rather than oscillation.
    let floor = match traj.kind {
        TrajectoryKind::WeightedCesaro => (10.0 * tol).max(4.0 * traj.weight_bound / n_final.max(1) as f64),
        _ => 10.0 * tol,
    };
    let verdict = if let Some((period, amplitude)) = oscillation(&traj.tail, traj.window, tol, floor) {
        let k = traj.tail.len() - 1;
        LimitVerdict::Diverged {
            witness: (traj.tail[k].1.clone(), traj.tail[k - 1].1.clone()),
            period,
            amplitude,
        }
    } else if settled(&traj.values, traj.window, tol) {
        LimitVerdict::Converged {
            limit: final_value.clone(),
            rate_trace: steps.clone(),
        }
    } else {
        LimitVerdict::Undecided {
            residual: steps.last().map_or(f64::INFINITY, |s| s.1),
        }
    };
    LimitReport {
        verdict,
        n_final,
        final_value,
        target: None,
        target_source: None,
        sup_distance: None,
        diagnostics: BTreeMap::new(),
        window: traj.window,
    }
}
