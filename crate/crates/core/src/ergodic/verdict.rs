use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::measures::Measure;
use crate::spectral::ser_complex_vec;

/// Label attached to observations made while a hypothesis fails.
pub const UNCONDITIONAL: &str = "unconditional observation";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValues {
    pub label: String,
    #[serde(serialize_with = "ser_complex_vec")]
    pub values: Vec<Complex64>,
}

/// Observed coordinates of the final empirical measure and of the target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub label: String,
    pub n: u64,
    pub indices: Vec<i64>,
    #[serde(serialize_with = "ser_complex_vec")]
    pub empirical: Vec<Complex64>,
    pub target: Option<NamedValues>,
    pub alternatives: Vec<NamedValues>,
}

impl Observation {
    pub fn of<M: Measure>(n: u64, m: &M, window: Option<(i64, i64)>) -> Self {
        Observation {
            label: "checked".into(),
            n,
            indices: m.observe_indices(window),
            empirical: m.observe(window),
            target: None,
            alternatives: Vec::new(),
        }
    }

    pub fn with_target<M: Measure>(mut self, label: &str, t: &M, window: Option<(i64, i64)>) -> Self {
        self.target = Some(NamedValues {
            label: label.into(),
            values: t.observe(window),
        });
        self
    }

    pub fn with_alternative<M: Measure>(mut self, label: &str, t: &M, window: Option<(i64, i64)>) -> Self {
        self.alternatives.push(NamedValues {
            label: label.into(),
            values: t.observe(window),
        });
        self
    }
}

/// Outcome of checking one theorem on one measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub theorem: String,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion_checked: bool,
    pub conclusion_holds: bool,
    pub pass: bool,
    /// Some hypothesis failed, so the run only records what happened.
    pub observational: bool,
    pub diagnostics: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
    pub observation: Option<Observation>,
    pub sub_verdicts: Vec<TheoremVerdict>,
}

impl TheoremVerdict {
    pub fn new(theorem: impl Into<String>) -> Self {
        TheoremVerdict {
            theorem: theorem.into(),
            hypotheses: Vec::new(),
            conclusion_checked: false,
            conclusion_holds: false,
            pass: false,
            observational: false,
            diagnostics: Vec::new(),
            metrics: BTreeMap::new(),
            observation: None,
            sub_verdicts: Vec::new(),
        }
    }

    pub fn hypothesis(&mut self, name: &str, holds: bool, witness: impl Into<String>) {
        self.hypotheses.push(Hypothesis {
            name: name.into(),
            holds,
            witness: witness.into(),
        });
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.into(), value);
    }

    pub fn diagnose(&mut self, msg: impl Into<String>) {
        self.diagnostics.push(msg.into());
    }

    pub fn observe(&mut self, obs: Observation) {
        self.observation = Some(obs);
    }

    /// Records the conclusion and settles `pass` and `observational`.
    pub fn conclude(&mut self, holds: bool) {
        self.conclusion_checked = true;
        self.conclusion_holds = holds;
        let hyps = self.hypotheses_hold();
        self.pass = hyps && holds;
        self.observational = !hyps;
        if !hyps {
            let failed: Vec<&str> = self
                .hypotheses
                .iter()
                .filter(|h| !h.holds)
                .map(|h| h.name.as_str())
                .collect();
            self.diagnostics
                .push(format!("hypotheses not satisfied: {}", failed.join(", ")));
            if let Some(obs) = self.observation.as_mut() {
                obs.label = UNCONDITIONAL.into();
            }
        }
    }

    /// Passing, or recorded as an observation because a hypothesis failed.
    pub fn counts_as_pass(&self) -> bool {
        self.pass || (self.observational && self.sub_verdicts.iter().all(|v| v.counts_as_pass()))
    }
}
