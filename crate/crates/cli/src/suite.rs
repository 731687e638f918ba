//! Built-in suites.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use ergolab::groups::{aperiodicity_sweep, build_group, builtin_families, GroupSpec, SweepResult};
use ergolab::measures::FiniteMeasure;
use ergolab::spectral::linalg::multiset_distance;
use ergolab::spectral::{dual_table, fourier_transform, spectrum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{self, Overrides};
use crate::runner::{Report, RunOptions};
use crate::{run_all, Failure};

const PAPER_CHECKS: &str = include_str!("../suites/paper-checks.toml");

/// Largest group order in the exhaustive support sweep.
pub const SWEEP_MAX_ORDER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteTag {
    PaperChecks,
    Prop33Exhaustive,
}

impl FromStr for SuiteTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper-checks" => Ok(SuiteTag::PaperChecks),
            "prop-3-3-exhaustive" => Ok(SuiteTag::Prop33Exhaustive),
            _ => Err(format!("unknown suite `{s}` (expected paper-checks or prop-3-3-exhaustive)")),
        }
    }
}

impl SuiteTag {
    pub fn name(self) -> &'static str {
        match self {
            SuiteTag::PaperChecks => "paper-checks",
            SuiteTag::Prop33Exhaustive => "prop-3-3-exhaustive",
        }
    }
}

pub struct SuiteOutput {
    pub summary: Value,
    pub reports: Vec<Report>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
struct DualityTrials {
    seed: u64,
    measures: usize,
    failures: Vec<String>,
    max_eigenvalue_distance: f64,
}

/// Random probability measures on Z₆, Z₈ and Z₂×Z₄, checked against the
/// annihilator identities and the Fourier eigenvalue multiset.
fn duality_trials(seed: u64, per_group: usize) -> Result<DualityTrials, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs = [
        GroupSpec::Cyclic(6),
        GroupSpec::Cyclic(8),
        GroupSpec::Product(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(4)]),
    ];
    let mut out = DualityTrials {
        seed,
        measures: 0,
        failures: Vec::new(),
        max_eigenvalue_distance: 0.0,
    };
    for spec in specs {
        let g = Arc::new(build_group(&spec).map_err(Failure::from)?);
        let n = g.order();
        for trial in 0..per_group {
            let raw: Vec<f64> = loop {
                let v: Vec<f64> =
                    (0..n).map(|_| if rng.gen_bool(0.35) { rng.gen_range(0.05..1.0) } else { 0.0 }).collect();
                if v.iter().any(|&x| x > 0.0) {
                    break v;
                }
            };
            let total: f64 = raw.iter().sum();
            let coeffs: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let mu = FiniteMeasure::from_real(&g, &coeffs).map_err(Failure::from)?;
            let id = dual_table(&mu, 1e-9).and_then(|t| t.check_identities(&mu)).map_err(Failure::from)?;
            let eig = spectrum(&mu).map_err(Failure::from)?.eigenvalues;
            let fourier = fourier_transform(&mu).map_err(Failure::from)?;
            let d = multiset_distance(&eig, &fourier).map_err(Failure::from)?;
            out.max_eigenvalue_distance = out.max_eigenvalue_distance.max(d);
            if !(id.f_matches && id.e_matches && d <= 1e-8) {
                out.failures.push(format!("{spec} trial {trial}"));
            }
            out.measures += 1;
        }
    }
    Ok(out)
}

fn paper_checks(overrides: &Overrides, opts: RunOptions, jobs: usize, seed: u64) -> Result<SuiteOutput, Failure> {
    let mut scenarios = config::parse(PAPER_CHECKS).map_err(Failure::Config)?;
    for s in &mut scenarios {
        overrides.apply(s);
    }
    let prepared = scenarios
        .iter()
        .map(config::prepare)
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::Config)?;
    let reports = run_all(&prepared, opts, jobs)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::from)?;

    let mut theorems: BTreeMap<String, bool> = BTreeMap::new();
    let mut rows = Vec::with_capacity(reports.len());
    for r in &reports {
        let checks: Vec<Value> = r
            .checks
            .iter()
            .map(|c| {
                *theorems.entry(c.theorem.clone()).or_insert(true) &= c.pass;
                json!({ "check": c.check, "theorem": c.theorem, "pass": c.pass, "observational": c.observational })
            })
            .collect();
        rows.push(json!({ "name": r.scenario.name, "pass": r.pass, "checks": checks }));
    }
    let trials = duality_trials(seed, 100)?;
    let pass = reports.iter().all(|r| r.pass) && trials.failures.is_empty();
    let summary = json!({
        "suite": SuiteTag::PaperChecks.name(),
        "pass": pass,
        "theorems": theorems,
        "scenarios": rows,
        "duality_trials": trials,
        "versions": crate::runner::versions(),
    });
    Ok(SuiteOutput { summary, reports, pass })
}

fn exhaustive(jobs: usize) -> Result<SuiteOutput, Failure> {
    use rayon::prelude::*;
    let specs = builtin_families(SWEEP_MAX_ORDER);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Io(e.to_string()))?;
    let results: Vec<SweepResult> = pool
        .install(|| {
            specs
                .par_iter()
                .map(|s| build_group(s).and_then(|g| aperiodicity_sweep(&g)))
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(Failure::from)?;
    let subsets: usize = results.iter().map(|r| r.subsets).sum();
    let disagreements: usize = results.iter().map(|r| r.disagreements.len()).sum();
    let pass = disagreements == 0;
    let summary = json!({
        "suite": SuiteTag::Prop33Exhaustive.name(),
        "pass": pass,
        "max_order": SWEEP_MAX_ORDER,
        "groups": results,
        "subsets": subsets,
        "disagreements": disagreements,
        "versions": crate::runner::versions(),
    });
    Ok(SuiteOutput {
        summary,
        reports: Vec::new(),
        pass,
    })
}

pub fn run_suite(tag: SuiteTag, overrides: &Overrides, opts: RunOptions, jobs: usize, seed: u64) -> Result<SuiteOutput, Failure> {
    match tag {
        SuiteTag::PaperChecks => paper_checks(overrides, opts, jobs, seed),
        SuiteTag::Prop33Exhaustive => exhaustive(jobs),
    }
}
