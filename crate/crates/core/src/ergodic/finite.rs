use num_complex::Complex64;

use super::trajectory::{block_cesaro, detect_limit, power_trajectory, weighted_cesaro, LimitReport, LimitVerdict};
use super::verdict::{Observation, TheoremVerdict};
use crate::error::{Error, Result};
use crate::measures::{classify, FiniteMeasure, GeneratedGroup, GroupFunction, Measure, MeasureClass, SUPPORT_TOL};
use crate::spectral::linalg::max_abs;
use crate::spectral::{
    ergodic_projection, kt_report, measure_from_operator, power_boundedness, regular_matrix, spectrum,
    MAX_DOUBLINGS, PROJECTION_AGREEMENT,
};
use crate::weights::{goodness, mean_weight, weight_limit, WeightSequence, UNIT_MATCH_TOL};

/// Tolerance used for the support-based predicates in verdicts.
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Idempotence threshold for every converged limit measure.
pub const IDEMPOTENCE_TOL: f64 = 1e-8;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `max(tol, 10·sup|a_i|/n)`: Cesàro means converge like `1/n` at best.
pub fn cesaro_allowance(tol: f64, bound: f64, n: u64) -> f64 {
    tol.max(10.0 * bound / n.max(1) as f64)
}

fn generated_of(class: &MeasureClass) -> Option<&crate::groups::Subgroup> {
    match &class.generated {
        GeneratedGroup::Finite(h) => Some(h),
        GeneratedGroup::Integer(_) => None,
    }
}

pub(crate) fn aperiodicity_witness(class: &MeasureClass) -> String {
    let diff = match &class.difference_generated {
        GeneratedGroup::Finite(h) => format!("[supp μ̃∗μ] has order {}", h.order()),
        GeneratedGroup::Integer(z) => format!("[supp μ̃∗μ] = {}ℤ", z.d),
    };
    match &class.coset_witness {
        Some(w) => format!("{diff}; support lies in the coset {w}"),
        None if class.oracle_checked => format!("{diff}; no proper coset contains the support"),
        None => diff,
    }
}

pub(crate) fn goodness_hypothesis(v: &mut TheoremVerdict, w: &WeightSequence) -> Result<()> {
    let g = goodness(w)?;
    let witness = goodness_witness(&g);
    v.hypothesis("good_weight", g.is_usable(), witness);
    Ok(())
}

fn goodness_witness(g: &crate::weights::Goodness) -> String {
    use crate::weights::Goodness::*;
    match g {
        Certified => "closed form for every ξ".into(),
        NumericallyConsistent { max_residual } => {
            format!("numerically consistent, max residual {max_residual:.3e}")
        }
        Inconclusive { residual_trace } => {
            format!("inconclusive at {} sample points", residual_trace.len())
        }
    }
}

/// Weighted Cesàro means of a probability measure on a finite group tend to
/// `a·m̄_{[supp μ]}` when `μ` is strictly aperiodic and `a` is the mean of a
/// good weight.
pub fn weighted_mean_check(mu: &FiniteMeasure, w: &WeightSequence, n_max: u64, tol: f64) -> Result<TheoremVerdict> {
    let mut v = TheoremVerdict::new("theorem_2_2");
    let class = classify(mu, CLASSIFY_TOL)?;
    v.hypothesis("probability", class.probability, format!("total mass {:.12}", mass(mu)));
    v.hypothesis("strictly_aperiodic", class.strictly_aperiodic, aperiodicity_witness(&class));
    v.hypothesis("compact", true, format!("finite group of order {}", mu.group().order()));
    goodness_hypothesis(&mut v, w)?;

    let traj = weighted_cesaro(mu, w, n_max, None)?;
    let (n, last) = traj.last().expect("non-empty trajectory");
    let mut obs = Observation::of(n, last, None);
    let holds = match (mean_weight(w), generated_of(&class)) {
        (Ok(a), Some(h)) => {
            let target = FiniteMeasure::haar_on_subgroup(mu.group(), h)?.scale(a);
            let dist = last.max_abs_diff(&target);
            let allowance = cesaro_allowance(tol, w.bound(), n);
            v.metric("mean_weight_re", a.re);
            v.metric("mean_weight_im", a.im);
            v.metric("sup_distance", dist);
            v.metric("allowance", allowance);
            v.metric("generated_order", h.order() as f64);
            obs = obs.with_target("a·m̄_[supp μ]", &target, None);
            let mut ok = dist <= allowance;
            if class.strictly_aperiodic && !h.is_whole() {
                v.diagnose("strictly aperiodic measure whose support generates a proper subgroup");
                ok = false;
            }
            ok
        }
        (Err(e), _) => {
            v.diagnose(format!("mean weight unavailable: {e}"));
            false
        }
        (_, None) => unreachable!("finite measure classified on ℤ"),
    };
    v.metric("max_norm", traj.max_norm);
    v.metric("weight_bound", w.bound());
    v.observe(obs);
    v.conclude(holds);
    Ok(v)
}

fn mass(mu: &FiniteMeasure) -> f64 {
    mu.coeffs().iter().map(|c| c.re).sum()
}

/// Cesàro averages of an adapted measure tend to Haar measure; raw powers do
/// as well once the measure is also strictly aperiodic.
pub fn kawada_ito_check(mu: &FiniteMeasure, n_max: u64, tol: f64) -> Result<TheoremVerdict> {
    let class = classify(mu, CLASSIFY_TOL)?;
    let haar = FiniteMeasure::haar(mu.group());
    let adapted_witness = match generated_of(&class) {
        Some(h) => format!("[supp μ] has order {} of {}", h.order(), mu.group().order()),
        None => String::new(),
    };

    let mut cesaro = TheoremVerdict::new("kawada_ito.cesaro");
    cesaro.hypothesis("probability", class.probability, format!("total mass {:.12}", mass(mu)));
    cesaro.hypothesis("adapted", class.adapted, adapted_witness.clone());
    let traj = weighted_cesaro(mu, &WeightSequence::constant(1.0), n_max, None)?;
    let mut rate_constant = 0.0f64;
    for (&n, m) in traj.checkpoints.iter().zip(&traj.values) {
        rate_constant = rate_constant.max(n as f64 * m.max_abs_diff(&haar));
    }
    let (n, last) = traj.last().expect("non-empty trajectory");
    let dist = last.max_abs_diff(&haar);
    let allowance = cesaro_allowance(tol, 1.0, n);
    cesaro.metric("sup_distance", dist);
    cesaro.metric("allowance", allowance);
    cesaro.metric("rate_constant", rate_constant);
    cesaro.observe(Observation::of(n, last, None).with_target("m_G", &haar, None));
    cesaro.conclude(dist <= allowance);

    let mut powers = TheoremVerdict::new("kawada_ito.powers");
    powers.hypothesis("probability", class.probability, format!("total mass {:.12}", mass(mu)));
    powers.hypothesis("adapted", class.adapted, adapted_witness);
    powers.hypothesis("strictly_aperiodic", class.strictly_aperiodic, aperiodicity_witness(&class));
    let traj = power_trajectory(mu, n_max, None)?;
    let first_below = traj
        .checkpoints
        .iter()
        .zip(&traj.values)
        .find(|(_, m)| m.max_abs_diff(&haar) < tol)
        .map_or(f64::NAN, |(&n, _)| n as f64);
    let (n, last) = traj.last().expect("non-empty trajectory");
    let dist = last.max_abs_diff(&haar);
    powers.metric("sup_distance", dist);
    powers.metric("first_checkpoint_below_tol", first_below);
    powers.observe(Observation::of(n, last, None).with_target("m_G", &haar, None));
    powers.conclude(dist <= tol);
    if powers.observational {
        powers.diagnose("raw-power conclusion skipped: measure is not strictly aperiodic");
    }

    let mut v = TheoremVerdict::new("kawada_ito");
    v.hypothesis("probability", class.probability, format!("total mass {:.12}", mass(mu)));
    let holds = cesaro.counts_as_pass() && powers.counts_as_pass();
    v.sub_verdicts = vec![cesaro, powers];
    v.conclude(holds);
    Ok(v)
}

/// `(δ_e + μ)/2`.
pub fn smoothed(mu: &FiniteMeasure) -> Result<FiniteMeasure> {
    let mut nu = FiniteMeasure::dirac(mu.group(), mu.group().identity())?;
    nu.add_scaled(mu, ONE)?;
    Ok(nu.scale(Complex64::new(0.5, 0.0)))
}

/// Raw powers converge to an idempotent when the unitary spectrum is `{1}`.
/// With `smoothing` the check runs on `(δ_e + μ)/2`, whose limit must equal
/// the Cesàro limit of `μ`.
pub fn power_limit_check(mu: &FiniteMeasure, n_max: u64, tol: f64, smoothing: bool) -> Result<TheoremVerdict> {
    let mut v = TheoremVerdict::new(if smoothing { "smoothing" } else { "power_limit" });
    let pb = power_boundedness(mu)?;
    if !pb.bounded {
        return Err(Error::NotPowerBounded(pb.certificate));
    }
    v.hypothesis("power_bounded", true, pb.certificate.clone());
    let nu = if smoothing { smoothed(mu)? } else { mu.clone() };

    let kt = kt_report(&nu, n_max, tol)?;
    let gate = kt.spectral_predicate;
    v.metric("spectral_gate", f64::from(u8::from(gate)));
    v.metric("d_final", kt.d_final());
    if !gate {
        let listed: Vec<String> = kt.unitary_eigenvalues.iter().map(|z| format!("{z:.6}")).collect();
        v.diagnose(format!("spectral gate fails: unitary eigenvalues {}", listed.join(", ")));
    }

    let traj = power_trajectory(&nu, n_max, None)?;
    let report = detect_limit(&traj, tol);
    let (n, last) = traj.last().expect("non-empty trajectory");
    let mut obs = Observation::of(n, last, None);
    let mut holds = gate;
    match &report.verdict {
        LimitVerdict::Converged { limit, .. } => {
            let idem = limit.convolve(limit)?.l1_distance(limit);
            let proj = ergodic_projection(mu, ONE)?;
            let gap = max_abs(&(regular_matrix(limit).matrix() - &proj.projection));
            v.metric("idempotence_residual", idem);
            v.metric("operator_gap", gap);
            holds &= idem <= IDEMPOTENCE_TOL && gap <= PROJECTION_AGREEMENT;
            let projected = measure_from_operator(mu.group(), &proj.projection)?;
            obs = obs.with_target("θ from the mean ergodic projection", &projected, None);
            if smoothing {
                let cesaro = limit_measure(mu, ONE, None, tol.max(1e-12))?;
                let theta = cesaro.limit().expect("converged").clone();
                let dist = limit.max_abs_diff(&theta);
                v.metric("cesaro_limit_distance", dist);
                holds &= dist <= (10.0 * tol).max(IDEMPOTENCE_TOL);
            }
        }
        LimitVerdict::Diverged { period, amplitude, .. } => {
            v.diagnose(format!("oscillation of period {period} with amplitude {amplitude:.3e}"));
            v.metric("oscillation_period", *period as f64);
            v.metric("oscillation_amplitude", *amplitude);
            holds = false;
        }
        LimitVerdict::Undecided { residual } => {
            v.diagnose(format!("no limit detected, residual {residual:.3e}"));
            v.metric("residual", *residual);
            holds = false;
        }
    }
    v.observe(obs);
    v.conclude(holds);
    Ok(v)
}

/// The limit `θ^ξ` of `(1/n) Σ ξ^i μ^i`, found by block Cesàro doubling and
/// cross-checked against the spectral projection. `n_max` defaults to
/// `|G|·2^24`.
pub fn limit_measure(mu: &FiniteMeasure, xi: Complex64, n_max: Option<u64>, tol: f64) -> Result<LimitReport<FiniteMeasure>> {
    if (xi.norm() - 1.0).abs() > UNIT_MATCH_TOL {
        return Err(Error::InvalidArgument(format!("|ξ| = {} is not 1", xi.norm())));
    }
    mu.ensure_power_bounded()?;
    let block = mu.group().order() as u64;
    let n_max = n_max.unwrap_or(block << MAX_DOUBLINGS);
    let traj = block_cesaro(&mu.scale(xi), block, n_max, Some(tol))?;
    let report = detect_limit(&traj, tol);
    let theta = match &report.verdict {
        LimitVerdict::Converged { limit, .. } => limit.clone(),
        LimitVerdict::Diverged { amplitude, .. } => {
            return Err(Error::CesaroNotConverged {
                residual: *amplitude,
                n: report.n_final,
            })
        }
        LimitVerdict::Undecided { residual } => {
            return Err(Error::CesaroNotConverged {
                residual: *residual,
                n: report.n_final,
            })
        }
    };
    let idem = theta.convolve(&theta)?.l1_distance(&theta);
    if idem > tol.max(1e-12) {
        return Err(Error::OracleDisagreement(format!(
            "θ^ξ at ξ = {xi} is not idempotent: ‖θ∗θ − θ‖₁ = {idem:.3e}"
        )));
    }
    let proj = ergodic_projection(mu, xi)?;
    let gap = max_abs(&(regular_matrix(&theta).matrix() - &proj.projection));
    if gap > (10.0 * tol).max(1e-9) {
        return Err(Error::OracleDisagreement(format!(
            "λ(θ^ξ) at ξ = {xi} differs from the spectral projection by {gap:.3e}"
        )));
    }
    let target = measure_from_operator(mu.group(), &proj.projection)?;
    let mut report = report.with_target(target, "spectral projection");
    report.diagnostics.insert("idempotence_residual".into(), idem);
    report.diagnostics.insert("operator_gap".into(), gap);
    report.diagnostics.insert("projection_rank".into(), proj.rank as f64);
    Ok(report)
}

/// Weighted Cesàro means of a contraction converge to
/// `Σ_ξ a(ξ)·θ^{ξ̄}` over the unitary eigenvalues `ξ` of `λ(μ)`. The literal
/// pairing `Σ_ξ a(ξ)·θ^ξ` is reported alongside.
pub fn spectral_decomposition_check(mu: &FiniteMeasure, w: &WeightSequence, n_max: u64, tol: f64) -> Result<TheoremVerdict> {
    let mut v = TheoremVerdict::new("theorem_2_13");
    let norm = mu.tv_norm();
    v.hypothesis("contraction", norm <= 1.0 + SUPPORT_TOL, format!("‖μ‖₁ = {norm:.12}"));
    goodness_hypothesis(&mut v, w)?;

    let report = spectrum(mu)?;
    let mut literal = FiniteMeasure::zeros(mu.group());
    let mut conjugate = FiniteMeasure::zeros(mu.group());
    let theta_tol = tol.clamp(1e-12, 1e-9);
    for (i, xi) in report.unitary_values().into_iter().enumerate() {
        let a = weight_limit(w, xi)?.value;
        v.metric(&format!("xi_{i}_re"), xi.re);
        v.metric(&format!("xi_{i}_im"), xi.im);
        v.metric(&format!("a_xi_{i}_re"), a.re);
        v.metric(&format!("a_xi_{i}_im"), a.im);
        if a.norm() == 0.0 {
            continue;
        }
        let lit = limit_measure(mu, xi, None, theta_tol)?;
        let conj = limit_measure(mu, xi.conj(), None, theta_tol)?;
        literal.add_scaled(lit.limit().expect("converged"), a)?;
        conjugate.add_scaled(conj.limit().expect("converged"), a)?;
    }

    let traj = weighted_cesaro(mu, w, n_max, None)?;
    let (n, last) = traj.last().expect("non-empty trajectory");
    let allowance = cesaro_allowance(tol, w.bound(), n);
    let d_conj = last.max_abs_diff(&conjugate);
    let d_lit = last.max_abs_diff(&literal);
    v.metric("unitary_eigenvalue_count", report.unitary.len() as f64);
    v.metric("conjugate_pairing_distance", d_conj);
    v.metric("literal_pairing_distance", d_lit);
    v.metric("allowance", allowance);
    let literal_ok = d_lit <= allowance;
    v.metric("literal_pairing_matches", f64::from(u8::from(literal_ok)));
    if !literal_ok {
        v.diagnose(format!(
            "literal pairing Σ a(ξ)·θ^ξ misses the empirical limit by {d_lit:.3e}; the conjugate pairing Σ a(ξ)·θ^ξ̄ is used"
        ));
    }
    v.observe(
        Observation::of(n, last, None)
            .with_target("Σ a(ξ)·θ^ξ̄", &conjugate, None)
            .with_alternative("Σ a(ξ)·θ^ξ", &literal, None),
    );
    v.conclude(d_conj <= allowance);
    Ok(v)
}

/// `sup_g |(μ_k∗f)(g) − (θ∗f)(g)|` for each `μ_k`.
pub fn uniform_convergence_gap(seq: &[FiniteMeasure], limit: &FiniteMeasure, f: &GroupFunction) -> Result<Vec<f64>> {
    let target = limit.act_on_function(f)?;
    seq.iter()
        .map(|m| Ok(m.act_on_function(f)?.sup_distance(&target)))
        .collect()
}

/// `(n, (1/n) Σ_{i=1..n} |⟨μ^i∗f, h⟩|)` at geometric checkpoints, with the
/// inner product of `L²(G, m_G)`.
pub fn abs_pairing_average_finite(
    mu: &FiniteMeasure,
    f: &GroupFunction,
    h: &GroupFunction,
    n_max: u64,
) -> Result<Vec<(u64, f64)>> {
    let checkpoints = crate::spectral::geometric_checkpoints(n_max);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut phi = f.clone();
    let mut acc = 0.0;
    let mut next = 0;
    let haar = 1.0 / mu.group().order() as f64;
    for n in 1..=n_max {
        phi = mu.act_on_function(&phi)?;
        acc += phi.inner(h)?.norm() * haar;
        if checkpoints.get(next) == Some(&n) {
            out.push((n, acc / n as f64));
            next += 1;
        }
    }
    Ok(out)
}
