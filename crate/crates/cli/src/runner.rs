//! Executes the checks of a prepared scenario.

use std::collections::BTreeMap;
use std::time::Instant;

use ergolab::ergodic::{
    abs_pairing_average, abs_pairing_average_finite, detect_limit, kawada_ito_check, power_limit_check,
    spectral_decomposition_check, weighted_cesaro, weighted_mean_check, weighted_mean_check_z, z_decay_report,
    TheoremVerdict, CLASSIFY_TOL,
};
use ergolab::groups::z_subgroup;
use ergolab::measures::{classify, classify_int, GroupFunction, IntMeasure, Measure, SUPPORT_TOL};
use ergolab::spectral::{dual_table, kt_report, power_boundedness, spectrum};
use ergolab::Error;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CheckKind, Prepared, Scenario, Setting};

/// Outcome of one requested check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: String,
    /// Theorem id when the payload is a verdict, otherwise the check name.
    pub theorem: String,
    pub pass: bool,
    pub observational: bool,
    pub result: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub versions: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
    /// `(n, index, value)` rows of the weighted Cesàro trajectory.
    #[serde(skip)]
    pub trajectory: Option<Vec<(u64, i64, Complex64)>>,
}

/// Run-time options that do not change what is checked.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub timing: bool,
    pub trajectory: bool,
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("ergolab".to_string(), ergolab::VERSION.to_string()),
        ("ergolab-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ])
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report payloads serialize")
}

fn plain(check: CheckKind, pass: bool, result: Value) -> CheckResult {
    CheckResult {
        check: check.name().into(),
        theorem: check.name().into(),
        pass,
        observational: false,
        result,
    }
}

fn verdict(check: CheckKind, v: &TheoremVerdict) -> CheckResult {
    CheckResult {
        check: check.name().into(),
        theorem: v.theorem.clone(),
        pass: v.counts_as_pass(),
        observational: v.observational,
        result: to_value(v),
    }
}

/// `(1/n) Σ |⟨μ^i∗f, h⟩|` with `f = h` the point mass at 0 on ℤ, or the
/// constant function on a finite group, where no decay is expected.
fn abs_pairing(setting: &Setting, n: u64, tol: f64) -> Result<(TheoremVerdict, Vec<(u64, f64)>), Error> {
    let mut v = TheoremVerdict::new("abs_pairing");
    let trace = match setting {
        Setting::Integers(mu) => {
            let support = mu.support(SUPPORT_TOL);
            v.hypothesis("probability", mu.is_probability(CLASSIFY_TOL), String::new());
            let generated = z_subgroup(&support)?;
            v.hypothesis("non_compact", generated.is_noncompact(), format!("[supp μ] = {}ℤ", generated.d));
            let delta = IntMeasure::dirac(0);
            abs_pairing_average(mu, &delta, &delta, n)?
        }
        Setting::Finite(mu) => {
            v.hypothesis("probability", mu.is_probability(CLASSIFY_TOL), String::new());
            v.hypothesis("non_compact", false, format!("{} is finite", mu.group().label()));
            let one = GroupFunction::constant(mu.group(), Complex64::new(1.0, 0.0));
            abs_pairing_average_finite(mu, &one, &one, n)?
        }
    };
    let &(last_n, last) = trace.last().expect("horizon is at least 1");
    let allowance = tol.max(3.0 / (last_n as f64).sqrt());
    v.metric("average", last);
    v.metric("allowance", allowance);
    v.conclude(last <= allowance);
    Ok((v, trace))
}

fn run_check(p: &Prepared, check: CheckKind) -> Result<CheckResult, Error> {
    let s = &p.scenario;
    let (n, tol, w) = (s.horizon, s.tolerance, &p.weight);
    let result = match (&p.setting, check) {
        (Setting::Finite(mu), CheckKind::Classify) => plain(check, true, to_value(&classify(mu, CLASSIFY_TOL)?)),
        (Setting::Integers(mu), CheckKind::Classify) => plain(check, true, to_value(&classify_int(mu, CLASSIFY_TOL)?)),
        (Setting::Finite(mu), CheckKind::Spectrum) => {
            let report = spectrum(mu)?;
            let pb = power_boundedness(mu)?;
            plain(check, true, json!({ "spectrum": to_value(&report), "power_boundedness": to_value(&pb) }))
        }
        (Setting::Finite(mu), CheckKind::Dual) => {
            let table = dual_table(mu, CLASSIFY_TOL)?;
            if mu.is_probability(CLASSIFY_TOL) {
                let id = table.check_identities(mu)?;
                let pass = id.f_matches && id.e_matches;
                plain(check, pass, json!({ "table": to_value(&table), "identities": to_value(&id) }))
            } else {
                let mut r = plain(check, true, json!({ "table": to_value(&table) }));
                r.observational = true;
                r
            }
        }
        (Setting::Finite(mu), CheckKind::Kt) => {
            let r = kt_report(mu, n.min(1 << 20), tol)?;
            plain(check, r.agree, to_value(&r))
        }
        (Setting::Finite(mu), CheckKind::Cesaro) => {
            let report = detect_limit(&weighted_cesaro(mu, w, n, None)?, tol);
            plain(check, report.is_converged(), to_value(&report))
        }
        (Setting::Integers(mu), CheckKind::Cesaro) => {
            let report = detect_limit(&weighted_cesaro(mu, w, n, s.window)?, tol);
            plain(check, report.is_converged(), to_value(&report))
        }
        (Setting::Finite(mu), CheckKind::Theorem2_2) => verdict(check, &weighted_mean_check(mu, w, n, tol)?),
        (Setting::Integers(mu), CheckKind::Theorem2_2) => {
            verdict(check, &weighted_mean_check_z(mu, w, n, s.window, tol)?)
        }
        (Setting::Finite(mu), CheckKind::KawadaIto) => verdict(check, &kawada_ito_check(mu, n, tol)?),
        (Setting::Finite(mu), CheckKind::PowerLimit) => verdict(check, &power_limit_check(mu, n, tol, false)?),
        (Setting::Finite(mu), CheckKind::Smoothing) => verdict(check, &power_limit_check(mu, n, tol, true)?),
        (Setting::Finite(mu), CheckKind::Theorem2_13) => {
            verdict(check, &spectral_decomposition_check(mu, w, n, tol)?)
        }
        (Setting::Integers(mu), CheckKind::ZDecay) => verdict(check, &z_decay_report(mu, n, s.window, tol)?),
        (setting, CheckKind::AbsPairing) => {
            let (v, trace) = abs_pairing(setting, n, tol)?;
            let mut r = verdict(check, &v);
            r.result["trace"] = to_value(&trace);
            r
        }
        (_, c) => unreachable!("`{c}` was rejected during validation"),
    };
    Ok(result)
}

/// A check that could not run because its precondition failed on this
/// measure; reported as a failure rather than an internal error.
fn precondition_failure(check: CheckKind, e: &Error) -> CheckResult {
    plain(check, false, json!({ "error": e.to_string() }))
}

/// Runs every check of a prepared scenario in order.
pub fn run(p: &Prepared, opts: RunOptions) -> Result<Report, Error> {
    let mut checks = Vec::with_capacity(p.scenario.checks.len());
    let mut timing = BTreeMap::new();
    for &check in &p.scenario.checks {
        let start = Instant::now();
        let r = match run_check(p, check) {
            Ok(r) => r,
            Err(e @ (Error::NotPowerBounded(_) | Error::Inconclusive { .. })) => precondition_failure(check, &e),
            Err(e) => return Err(e),
        };
        timing.insert(check.name().to_string(), start.elapsed().as_secs_f64());
        checks.push(r);
    }
    let trajectory = if opts.trajectory {
        let s = &p.scenario;
        Some(match &p.setting {
            Setting::Finite(mu) => weighted_cesaro(mu, &p.weight, s.horizon, None)?.rows(),
            Setting::Integers(mu) => weighted_cesaro(mu, &p.weight, s.horizon, s.window)?.rows(),
        })
    } else {
        None
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        scenario: p.scenario.clone(),
        checks,
        pass,
        versions: versions(),
        timing: opts.timing.then_some(timing),
        trajectory,
    })
}
