//! Scenario documents.
//!
//! A document is either one scenario at the top level or a list of them under
//! `[[scenarios]]`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ergolab::groups::{build_group, generated_subgroup, permutation_index, FiniteGroup, GroupSpec};
use ergolab::measures::{FiniteMeasure, IntMeasure};
use ergolab::weights::{WeightKind, WeightSequence};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const DEFAULT_HORIZON: u64 = 10_000;
pub const DEFAULT_TOL: f64 = 1e-3;

/// A configuration or validation failure, reported with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub scenario: Option<String>,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            scenario: None,
            field: field.into(),
            message: message.into(),
        }
    }

    fn in_scenario(mut self, name: &str) -> Self {
        self.scenario = Some(name.to_string());
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.scenario {
            Some(s) => write!(f, "scenario `{s}`, field `{}`: {}", self.field, self.message),
            None => write!(f, "field `{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> Complex64 {
        match self {
            Scalar::Real(x) => Complex64::new(x, 0.0),
            Scalar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// An element index, or a permutation in one-line notation for `S_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Element {
    Index(i64),
    Permutation(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupConfig {
    Integers { z: bool },
    Finite(GroupSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    Dirac(Element),
    Uniform(Vec<Element>),
    /// Haar measure of the whole group (the flag must be `true`).
    Haar(bool),
    /// Haar measure of the subgroup generated by the listed elements.
    HaarSubgroup(Vec<Element>),
    /// One coefficient per element, in index order.
    Weights(Vec<Scalar>),
    /// `(point, coefficient)` pairs for measures on ℤ.
    Points(Vec<(i64, Scalar)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    Constant(Scalar),
    /// `a_n = e^{2πi·turns·n}`.
    Character(f64),
    Periodic(Vec<Scalar>),
    Rotation {
        theta: f64,
        #[serde(default)]
        omega: f64,
        coeffs: Vec<(i64, Scalar)>,
    },
    Custom {
        table: Vec<Scalar>,
        bound: f64,
    },
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig::Constant(Scalar::Real(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Classify,
    Spectrum,
    Dual,
    Kt,
    Cesaro,
    #[serde(rename = "theorem_2_2")]
    Theorem2_2,
    KawadaIto,
    PowerLimit,
    Smoothing,
    #[serde(rename = "theorem_2_13")]
    Theorem2_13,
    ZDecay,
    AbsPairing,
}

impl CheckKind {
    pub const ALL: [CheckKind; 12] = [
        CheckKind::Classify,
        CheckKind::Spectrum,
        CheckKind::Dual,
        CheckKind::Kt,
        CheckKind::Cesaro,
        CheckKind::Theorem2_2,
        CheckKind::KawadaIto,
        CheckKind::PowerLimit,
        CheckKind::Smoothing,
        CheckKind::Theorem2_13,
        CheckKind::ZDecay,
        CheckKind::AbsPairing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Classify => "classify",
            CheckKind::Spectrum => "spectrum",
            CheckKind::Dual => "dual",
            CheckKind::Kt => "kt",
            CheckKind::Cesaro => "cesaro",
            CheckKind::Theorem2_2 => "theorem_2_2",
            CheckKind::KawadaIto => "kawada_ito",
            CheckKind::PowerLimit => "power_limit",
            CheckKind::Smoothing => "smoothing",
            CheckKind::Theorem2_13 => "theorem_2_13",
            CheckKind::ZDecay => "z_decay",
            CheckKind::AbsPairing => "abs_pairing",
        }
    }

    fn finite_only(self) -> bool {
        matches!(
            self,
            CheckKind::Spectrum
                | CheckKind::Dual
                | CheckKind::Kt
                | CheckKind::KawadaIto
                | CheckKind::PowerLimit
                | CheckKind::Smoothing
                | CheckKind::Theorem2_13
        )
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Emit {
    pub json: Option<String>,
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub group: GroupConfig,
    pub measure: MeasureConfig,
    #[serde(default)]
    pub weight: WeightConfig,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
    pub checks: Vec<CheckKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit: Option<Emit>,
}

fn default_horizon() -> u64 {
    DEFAULT_HORIZON
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Bundle {
    scenarios: Vec<Scenario>,
}

/// Parses a scenario document.
pub fn parse(text: &str) -> Result<Vec<Scenario>, ConfigError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| ConfigError::new(field_of(text, &e), e.message()))?;
    let scenarios = if table.contains_key("scenarios") {
        toml::from_str::<Bundle>(text)
            .map_err(|e| ConfigError::new(field_of(text, &e), e.message()))?
            .scenarios
    } else {
        vec![toml::from_str::<Scenario>(text).map_err(|e| ConfigError::new(field_of(text, &e), e.message()))?]
    };
    if scenarios.is_empty() {
        return Err(ConfigError::new("scenarios", "the list is empty"));
    }
    Ok(scenarios)
}

/// The key on the line a deserialization error points at, or the field a
/// "missing field" message names.
fn field_of(text: &str, err: &toml::de::Error) -> String {
    if let Some(rest) = err.message().strip_prefix("missing field `") {
        if let Some(name) = rest.split('`').next() {
            return name.to_string();
        }
    }
    let Some(span) = err.span() else {
        return "<document>".into();
    };
    let line_start = text[..span.start].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next().unwrap_or("");
    match line.split_once('=') {
        Some((key, _)) if !line.trim_start().starts_with('[') => key.trim().to_string(),
        _ => "<document>".into(),
    }
}

/// The algebra a scenario's measure lives in.
#[derive(Debug, Clone)]
pub enum Setting {
    Finite(FiniteMeasure),
    Integers(IntMeasure),
}

/// A validated scenario with its measure and weight built.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub setting: Setting,
    pub weight: WeightSequence,
}

fn element_index(group: &FiniteGroup, e: &Element, field: &str) -> Result<usize, ConfigError> {
    match e {
        Element::Index(i) => usize::try_from(*i)
            .ok()
            .filter(|&i| i < group.order())
            .ok_or_else(|| ConfigError::new(field, format!("element {i} is outside 0..{}", group.order()))),
        Element::Permutation(p) => permutation_index(p)
            .filter(|&i| i < group.order())
            .ok_or_else(|| ConfigError::new(field, format!("{p:?} is not an element of {}", group.label()))),
    }
}

fn build_weight(w: &WeightConfig) -> Result<WeightSequence, ConfigError> {
    let values = |v: &[Scalar]| v.iter().map(|s| s.value()).collect::<Vec<_>>();
    let kind = match w {
        WeightConfig::Constant(c) => WeightKind::Constant(c.value()),
        WeightConfig::Character(t) => WeightKind::Character { turns: *t },
        WeightConfig::Periodic(v) => WeightKind::Periodic(values(v)),
        WeightConfig::Rotation { theta, omega, coeffs } => WeightKind::Rotation {
            theta: *theta,
            omega: *omega,
            coeffs: coeffs.iter().map(|(k, c)| (*k, c.value())).collect(),
        },
        WeightConfig::Custom { table, bound } => WeightKind::Custom {
            table: values(table),
            bound: *bound,
        },
    };
    WeightSequence::new(kind).map_err(|e| ConfigError::new("weight", e.to_string()))
}

fn build_finite(group: &Arc<FiniteGroup>, m: &MeasureConfig) -> Result<FiniteMeasure, ConfigError> {
    let err = |e: ergolab::Error| ConfigError::new("measure", e.to_string());
    let indices = |v: &[Element]| v.iter().map(|e| element_index(group, e, "measure")).collect::<Result<Vec<_>, _>>();
    match m {
        MeasureConfig::Dirac(e) => FiniteMeasure::dirac(group, element_index(group, e, "measure")?).map_err(err),
        MeasureConfig::Uniform(v) => FiniteMeasure::uniform_on_set(group, &indices(v)?).map_err(err),
        MeasureConfig::Haar(true) => Ok(FiniteMeasure::haar(group)),
        MeasureConfig::Haar(false) => Err(ConfigError::new("measure", "`haar` must be true")),
        MeasureConfig::HaarSubgroup(v) => {
            let h = generated_subgroup(group, &indices(v)?).map_err(err)?;
            FiniteMeasure::haar_on_subgroup(group, &h).map_err(err)
        }
        MeasureConfig::Weights(v) => {
            FiniteMeasure::from_weights(group, v.iter().map(|s| s.value()).collect()).map_err(err)
        }
        MeasureConfig::Points(_) => Err(ConfigError::new("measure", "`points` is only valid on ℤ")),
    }
}

fn build_integer(m: &MeasureConfig) -> Result<IntMeasure, ConfigError> {
    let err = |e: ergolab::Error| ConfigError::new("measure", e.to_string());
    let int = |e: &Element| match e {
        Element::Index(i) => Ok(*i),
        Element::Permutation(_) => Err(ConfigError::new("measure", "permutations are not points of ℤ")),
    };
    match m {
        MeasureConfig::Dirac(e) => Ok(IntMeasure::dirac(int(e)?)),
        MeasureConfig::Uniform(v) => {
            let w = 1.0 / v.len().max(1) as f64;
            let pairs = v.iter().map(|e| int(e).map(|k| (k, w))).collect::<Result<Vec<_>, _>>()?;
            IntMeasure::from_real_pairs(&pairs).map_err(err)
        }
        MeasureConfig::Points(v) => IntMeasure::from_pairs(v.iter().map(|(k, c)| (*k, c.value()))).map_err(err),
        _ => Err(ConfigError::new("measure", "only `dirac`, `uniform` and `points` are valid on ℤ")),
    }
}

/// Validates a scenario and builds its measure and weight.
pub fn prepare(s: &Scenario) -> Result<Prepared, ConfigError> {
    let wrap = |e: ConfigError| e.in_scenario(&s.name);
    if s.name.is_empty() {
        return Err(ConfigError::new("name", "must be nonempty"));
    }
    if s.horizon < 1 {
        return Err(wrap(ConfigError::new("horizon", "must be at least 1")));
    }
    if !(s.tolerance.is_finite() && s.tolerance > 0.0) {
        return Err(wrap(ConfigError::new("tolerance", "must be a positive number")));
    }
    if s.checks.is_empty() {
        return Err(wrap(ConfigError::new("checks", "at least one check is required")));
    }
    if let Some((lo, hi)) = s.window {
        if lo > hi {
            return Err(wrap(ConfigError::new("window", format!("empty window {lo}..{hi}"))));
        }
    }
    let weight = build_weight(&s.weight).map_err(wrap)?;
    let setting = match &s.group {
        GroupConfig::Integers { z: true } => Setting::Integers(build_integer(&s.measure).map_err(wrap)?),
        GroupConfig::Integers { z: false } => return Err(wrap(ConfigError::new("group", "`z` must be true"))),
        GroupConfig::Finite(spec) => {
            if s.window.is_some() {
                return Err(wrap(ConfigError::new("window", "windows apply to ℤ only")));
            }
            let g = Arc::new(build_group(spec).map_err(|e| wrap(ConfigError::new("group", e.to_string())))?);
            Setting::Finite(build_finite(&g, &s.measure).map_err(wrap)?)
        }
    };
    for &c in &s.checks {
        let bad = |msg: String| Err(wrap(ConfigError::new("checks", msg)));
        match (&setting, c) {
            (Setting::Integers(_), c) if c.finite_only() => return bad(format!("`{c}` requires a finite group")),
            (Setting::Finite(_), CheckKind::ZDecay) => return bad("`z_decay` requires ℤ".into()),
            (Setting::Finite(mu), CheckKind::Dual) if mu.group().cyclic_factors().is_none() => {
                return bad(format!("`dual` requires an abelian group, got {}", mu.group().label()))
            }
            _ => {}
        }
    }
    Ok(Prepared {
        scenario: s.clone(),
        setting,
        weight,
    })
}

/// Command-line overrides applied to every scenario.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub horizon: Option<u64>,
    pub tol: Option<f64>,
    pub window: Option<(i64, i64)>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) {
        if let Some(h) = self.horizon {
            s.horizon = h;
        }
        if let Some(t) = self.tol {
            s.tolerance = t;
        }
        if let (Some(w), GroupConfig::Integers { .. }) = (self.window, &s.group) {
            s.window = Some(w);
        }
    }
}

/// Parses `A..B`.
pub fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad window start `{a}`: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad window end `{b}`: {e}"))?;
    if a > b {
        return Err(format!("empty window {a}..{b}"));
    }
    Ok((a, b))
}
