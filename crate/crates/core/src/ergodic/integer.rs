use super::finite::{aperiodicity_witness, cesaro_allowance, goodness_hypothesis, CLASSIFY_TOL};
use super::trajectory::weighted_cesaro;
use super::verdict::{Observation, TheoremVerdict};
use crate::error::Result;
use crate::groups::{z_difference_subgroup, z_subgroup};
use crate::measures::{classify_int, IntMeasure, Measure, PowerCache, SUPPORT_TOL};
use crate::spectral::geometric_checkpoints;
use crate::weights::WeightSequence;

/// Observation window used when none is configured.
pub const DEFAULT_WINDOW: (i64, i64) = (-8, 8);

/// Smallest checkpoint used in the log-log decay fit.
const FIT_FROM: u64 = 8;

fn mass(mu: &IntMeasure) -> f64 {
    mu.entries().iter().map(|(_, c)| c.re).sum()
}

/// On ℤ, weighted Cesàro means of a strictly aperiodic probability measure
/// whose support generates a non-compact subgroup vanish on every window.
pub fn weighted_mean_check_z(
    mu: &IntMeasure,
    w: &WeightSequence,
    n_max: u64,
    window: Option<(i64, i64)>,
    tol: f64,
) -> Result<TheoremVerdict> {
    let window = Some(window.unwrap_or(DEFAULT_WINDOW));
    let mut v = TheoremVerdict::new("theorem_2_2");
    let class = classify_int(mu, CLASSIFY_TOL)?;
    let generated = z_subgroup(&mu.support(SUPPORT_TOL))?;
    v.hypothesis("probability", class.probability, format!("total mass {:.12}", mass(mu)));
    v.hypothesis("strictly_aperiodic", class.strictly_aperiodic, aperiodicity_witness(&class));
    v.hypothesis(
        "non_compact",
        generated.is_noncompact(),
        format!("[supp μ] = {}ℤ", generated.d),
    );
    goodness_hypothesis(&mut v, w)?;

    let traj = weighted_cesaro(mu, w, n_max, window)?;
    let (n, last) = traj.last().expect("non-empty trajectory");
    let zero = mu.zero();
    let sup = last.observe(window).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let allowance = cesaro_allowance(tol, w.bound(), n);
    v.metric("window_sup", sup);
    v.metric("allowance", allowance);
    v.metric("max_norm", traj.max_norm);
    v.observe(Observation::of(n, last, window).with_target("0", &zero, window));
    v.conclude(sup <= allowance);
    Ok(v)
}

/// `(n, (1/n) Σ_{i=1..n} |⟨μ^i∗f, h⟩|)` at geometric checkpoints, with `f`
/// and `h` finitely supported functions on ℤ.
pub fn abs_pairing_average(mu: &IntMeasure, f: &IntMeasure, h: &IntMeasure, n_max: u64) -> Result<Vec<(u64, f64)>> {
    let checkpoints = geometric_checkpoints(n_max);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut phi = f.clone();
    let mut acc = 0.0;
    let mut next = 0;
    for n in 1..=n_max {
        phi = mu.convolve(&phi)?;
        acc += phi.inner(h).norm();
        if checkpoints.get(next) == Some(&n) {
            out.push((n, acc / n as f64));
            next += 1;
        }
    }
    Ok(out)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Decay of the powers of a walk on ℤ whose difference set generates a
/// non-compact subgroup: window values, `ℓ²` norm and weak pairings against
/// `𝟙_{0}` all tend to zero.
pub fn z_decay_report(mu: &IntMeasure, n_max: u64, window: Option<(i64, i64)>, tol: f64) -> Result<TheoremVerdict> {
    let delta = IntMeasure::dirac(0);
    z_decay_report_with(mu, n_max, window, tol, &[(delta.clone(), delta)])
}

/// [`z_decay_report`] with explicit `(f, h)` pairs for the weak pairings.
pub fn z_decay_report_with(
    mu: &IntMeasure,
    n_max: u64,
    window: Option<(i64, i64)>,
    tol: f64,
    pairs: &[(IntMeasure, IntMeasure)],
) -> Result<TheoremVerdict> {
    let (lo, hi) = window.unwrap_or(DEFAULT_WINDOW);
    let mut v = TheoremVerdict::new("z_decay");
    let support = mu.support(SUPPORT_TOL);
    let diff = z_difference_subgroup(&support)?;
    v.hypothesis(
        "probability",
        mu.is_probability(CLASSIFY_TOL),
        format!("total mass {:.12}", mass(mu)),
    );
    v.hypothesis(
        "non_compact_differences",
        diff.is_noncompact(),
        format!("[supp μ̃∗μ] = {}ℤ", diff.d),
    );

    let checkpoints = geometric_checkpoints(n_max);
    let mut cache = PowerCache::new(mu.clone());
    let mut next = 0;
    let mut sups = Vec::new();
    let mut l2 = Vec::new();
    let mut last_pairings = vec![0.0; pairs.len()];
    let mut windows = Vec::new();
    for n in 1..=n_max {
        let p = cache.advance()?;
        if checkpoints.get(next) != Some(&n) {
            continue;
        }
        next += 1;
        sups.push((n as f64, p.sup_norm()));
        l2.push((n as f64, p.l2_norm()));
        windows.push(p.window_sup(lo, hi));
        if n == n_max {
            for (slot, (f, h)) in last_pairings.iter_mut().zip(pairs) {
                *slot = p.convolve(f)?.inner(h).norm();
            }
        }
    }
    let last = cache.current().clone();
    let window_sup = windows.last().copied().unwrap_or(f64::INFINITY);
    let pairing = last_pairings.iter().copied().fold(0.0, f64::max);
    let l2_first = l2.first().map_or(0.0, |p| p.1);
    let l2_last = l2.last().map_or(0.0, |p| p.1);
    let l2_monotone = l2.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12));
    let fit: Vec<(f64, f64)> = sups.iter().copied().filter(|p| p.0 >= FIT_FROM as f64).collect();
    let exponent = log_log_slope(&fit);
    let l2_exponent = log_log_slope(&l2.iter().copied().filter(|p| p.0 >= FIT_FROM as f64).collect::<Vec<_>>());

    v.metric("window_sup", window_sup);
    v.metric("pairing_abs", pairing);
    v.metric("l2_norm", l2_last);
    v.metric("global_sup", sups.last().map_or(0.0, |p| p.1));
    v.metric("decay_exponent", exponent);
    v.metric("l2_decay_exponent", l2_exponent);
    v.metric("expected_exponent", -0.5);
    v.metric("difference_generator", diff.d as f64);

    let mut holds = true;
    if window_sup > tol {
        v.diagnose(format!("window sup {window_sup:.3e} exceeds {tol:.1e}"));
        holds = false;
    }
    if pairing > tol {
        v.diagnose(format!("weak pairing {pairing:.3e} exceeds {tol:.1e}"));
        holds = false;
    }
    if !(l2_monotone && l2_last < l2_first) {
        v.diagnose("ℓ² norm of μ^n is not decreasing");
        holds = false;
    }
    if !(exponent < 0.0) {
        v.diagnose(format!("fitted decay exponent {exponent:.3} is not negative"));
        holds = false;
    }
    v.observe(Observation::of(n_max, &last, Some((lo, hi))).with_target("0", &mu.zero(), Some((lo, hi))));
    v.conclude(holds);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk() -> IntMeasure {
        IntMeasure::from_real_pairs(&[(-1, 0.5), (1, 0.5)]).unwrap()
    }

    fn lazy() -> IntMeasure {
        IntMeasure::from_real_pairs(&[(0, 0.5), (1, 0.5)]).unwrap()
    }

    #[test]
    fn symmetric_walk_return_probability() {
        // C(100, 50) / 4^50.
        let p = walk().power(100).unwrap().get(0).re;
        assert!((p - 0.079_589_237_387_178_77).abs() < 1e-12);
    }

    #[test]
    fn lazy_walk_central_binomial() {
        let p = lazy().power(256).unwrap();
        assert!(p.sup_norm() < 0.05);
        assert!((p.sup_norm() - 0.049_819_109_936_140_15).abs() < 1e-12);
    }

    #[test]
    fn translating_point_mass_leaves_window() {
        let mu = IntMeasure::dirac(1);
        let p = mu.power(6).unwrap();
        assert_eq!(p.window_sup(-5, 5), 0.0);
        let v = z_decay_report(&mu, 64, Some((-5, 5)), 1e-9).unwrap();
        assert!(v.observational);
        assert_eq!(v.metrics["window_sup"], 0.0);
    }

    #[test]
    fn lazy_walk_decays() {
        let v = z_decay_report(&lazy(), 4096, None, 1e-2).unwrap();
        assert!(v.pass, "{v:?}");
        assert!((v.metrics["decay_exponent"] + 0.5).abs() < 0.05);
    }

    #[test]
    fn weighted_mean_on_z() {
        let v = weighted_mean_check_z(&lazy(), &WeightSequence::constant(1.0), 4096, None, 1e-2).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(v.metrics["window_sup"] < 1e-2);
        let v = weighted_mean_check_z(&walk(), &WeightSequence::constant(1.0), 256, None, 1e-2).unwrap();
        assert!(v.observational);
    }

    #[test]
    fn abs_pairing_bound() {
        let delta = IntMeasure::dirac(0);
        let avg = abs_pairing_average(&walk(), &delta, &delta, 1024).unwrap();
        for (n, a) in avg {
            assert!(a <= 3.0 / (n as f64).sqrt(), "n={n} a={a}");
        }
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|k| (k as f64, (k as f64).powf(-0.5))).collect();
        assert!((log_log_slope(&pts) + 0.5).abs() < 1e-12);
    }
}
