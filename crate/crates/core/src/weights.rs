//! Weight sequences `{a_n}` and their Cesàro circle limits
//! `a(ξ) = lim (1/n) Σ_{i≤n} a_i ξ^i`.
//!
//! The built-in kinds have closed-form limits. Rotation weights
//! `a_n = Σ_k c_k e^{2πik(ω+nθ)}` take `θ` as a double; whether that double
//! "is irrational" is meaningless at machine precision, so rotation limits
//! are certified through the decomposition into character weights, which is
//! valid for every `θ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Two unit complex numbers closer than this are treated as equal.
pub const UNIT_MATCH_TOL: f64 = 1e-9;
/// Default residual threshold for numerically estimated limits.
pub const NUMERICAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Constant(Complex64),
    /// `a_n = ξ₀^n` with `ξ₀ = e^{2πi·turns}`.
    Character { turns: f64 },
    /// `a_n = values[(n - 1) mod p]`.
    Periodic(Vec<Complex64>),
    Rotation {
        theta: f64,
        omega: f64,
        coeffs: Vec<(i64, Complex64)>,
    },
    /// `a_n = table[n - 1]`, with a declared bound.
    Custom { table: Vec<Complex64>, bound: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    kind: WeightKind,
    bound: f64,
}

impl WeightSequence {
    pub fn new(kind: WeightKind) -> Result<Self> {
        let bound = match &kind {
            WeightKind::Constant(c) => c.norm(),
            WeightKind::Character { turns } => {
                if !turns.is_finite() {
                    return Err(Error::InvalidArgument("character angle must be finite".into()));
                }
                1.0
            }
            WeightKind::Periodic(values) => {
                if values.is_empty() {
                    return Err(Error::InvalidArgument("periodic weight needs at least one value".into()));
                }
                values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
            WeightKind::Rotation { theta, omega, coeffs } => {
                if !theta.is_finite() || !omega.is_finite() {
                    return Err(Error::InvalidArgument("rotation angles must be finite".into()));
                }
                coeffs.iter().map(|(_, c)| c.norm()).sum()
            }
            WeightKind::Custom { table, bound } => {
                if let Some((i, v)) = table.iter().enumerate().find(|(_, v)| v.norm() > *bound) {
                    return Err(Error::InvalidArgument(format!(
                        "custom weight a_{} = {v} exceeds the declared bound {bound}",
                        i + 1
                    )));
                }
                *bound
            }
        };
        Ok(WeightSequence { kind, bound })
    }

    pub fn constant(c: f64) -> Self {
        WeightSequence {
            kind: WeightKind::Constant(Complex64::new(c, 0.0)),
            bound: c.abs(),
        }
    }

    /// `a_n = ξ₀^n` with `ξ₀ = e^{2πi·turns}`.
    pub fn character(turns: f64) -> Self {
        WeightSequence {
            kind: WeightKind::Character { turns },
            bound: 1.0,
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// `sup_n |a_n|`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.kind, WeightKind::Custom { .. })
    }

    pub fn weight_at(&self, n: u64) -> Result<Complex64> {
        if n == 0 {
            return Err(Error::InvalidArgument("weights are indexed from n = 1".into()));
        }
        Ok(match &self.kind {
            WeightKind::Constant(c) => *c,
            WeightKind::Character { turns } => turn(turns * n as f64),
            WeightKind::Periodic(values) => values[((n - 1) % values.len() as u64) as usize],
            WeightKind::Rotation { theta, omega, coeffs } => coeffs
                .iter()
                .map(|&(k, c)| c * turn(k as f64 * (omega + n as f64 * theta)))
                .sum(),
            WeightKind::Custom { table, .. } => *table
                .get((n - 1) as usize)
                .ok_or(Error::CustomOutOfRange { n, len: table.len() })?,
        })
    }

    /// Number of terms available (`None` for infinite sequences).
    pub fn available_terms(&self) -> Option<u64> {
        match &self.kind {
            WeightKind::Custom { table, .. } => Some(table.len() as u64),
            _ => None,
        }
    }
}

/// `e^{2πi x}` with the argument reduced to `[0, 1)` first.
fn turn(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x.rem_euclid(1.0))
}

fn unit_eq(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= UNIT_MATCH_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMode {
    Exact { derivation: &'static str },
    Numerical { residual: f64, n: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightLimit {
    #[serde(serialize_with = "crate::spectral::ser_complex")]
    pub xi: Complex64,
    #[serde(serialize_with = "crate::spectral::ser_complex")]
    pub value: Complex64,
    pub mode: LimitMode,
}

pub fn weight_limit(w: &WeightSequence, xi: Complex64) -> Result<WeightLimit> {
    weight_limit_with_tol(w, xi, NUMERICAL_TOL)
}

/// `a(ξ)`; built-in kinds in closed form, custom tables numerically with a
/// Cauchy-stagnation residual over `n ∈ {2^10, …, 2^20}`.
pub fn weight_limit_with_tol(w: &WeightSequence, xi: Complex64, tol: f64) -> Result<WeightLimit> {
    if (xi.norm() - 1.0).abs() > UNIT_MATCH_TOL {
        return Err(Error::InvalidArgument(format!("|ξ| = {} is not 1", xi.norm())));
    }
    let exact = |value, derivation| WeightLimit {
        xi,
        value,
        mode: LimitMode::Exact { derivation },
    };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(match &w.kind {
        WeightKind::Constant(c) => {
            let v = if unit_eq(xi, one) { *c } else { zero };
            exact(v, "geometric series: (1/n)Σ ξ^i → [ξ = 1]")
        }
        WeightKind::Character { turns } => {
            let v = if unit_eq(xi * turn(*turns), one) { one } else { zero };
            exact(v, "character: (1/n)Σ (ξ₀ξ)^i → [ξ₀ξ = 1]")
        }
        WeightKind::Periodic(values) => {
            let p = values.len() as i32;
            let v = if unit_eq(xi.powi(p), one) {
                values
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * xi.powi(j as i32 + 1))
                    .sum::<Complex64>()
                    / p as f64
            } else {
                zero
            };
            exact(v, "periodic: block sums over one period")
        }
        WeightKind::Rotation { theta, omega, coeffs } => {
            let v = coeffs
                .iter()
                .filter(|&&(k, _)| unit_eq(xi * turn(k as f64 * theta), one))
                .map(|&(k, c)| c * turn(k as f64 * omega))
                .sum();
            exact(v, "rotation: sum of character weights e^{2πikθ}")
        }
        WeightKind::Custom { table, .. } => {
            let (value, residual, n) = numerical_limit(table, xi)?;
            if residual > tol {
                return Err(Error::Inconclusive { residual });
            }
            WeightLimit {
                xi,
                value,
                mode: LimitMode::Numerical { residual, n },
            }
        }
    })
}

/// Cesàro averages at `2^10 … 2^20` (capped by the table length); returns
/// the last average, the difference between the last two, and the last `n`.
fn numerical_limit(table: &[Complex64], xi: Complex64) -> Result<(Complex64, f64, u64)> {
    let trace = cesaro_trace(table, xi, &default_schedule(table.len() as u64));
    match trace.as_slice() {
        [.., (_, a), (n, b)] => Ok((*b, (b - a).norm(), *n)),
        _ => Err(Error::CustomOutOfRange {
            n: 1 << 11,
            len: table.len(),
        }),
    }
}

fn default_schedule(len: u64) -> Vec<u64> {
    (10..=20).map(|k| 1u64 << k).filter(|&n| n <= len).collect()
}

/// `(n, (1/n) Σ_{i≤n} a_i ξ^i)` at each `n` of the schedule.
fn cesaro_trace(table: &[Complex64], xi: Complex64, schedule: &[u64]) -> Vec<(u64, Complex64)> {
    let mut out = Vec::with_capacity(schedule.len());
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut next = schedule.iter().peekable();
    for (i, a) in table.iter().enumerate() {
        let n = i as u64 + 1;
        power *= xi;
        sum += a * power;
        if next.peek() == Some(&&n) {
            out.push((n, sum / n as f64));
            next.next();
        }
    }
    out
}

/// Numerical Cesàro average `(1/n) Σ_{i≤n} a_i ξ^i` for any weight kind.
pub fn cesaro_average(w: &WeightSequence, xi: Complex64, n: u64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for i in 1..=n {
        power *= xi;
        sum += w.weight_at(i)? * power;
    }
    Ok(sum / n as f64)
}

/// `a = a(1)`.
pub fn mean_weight(w: &WeightSequence) -> Result<Complex64> {
    Ok(weight_limit(w, Complex64::new(1.0, 0.0))?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Goodness {
    /// Closed-form `a(ξ)` exists for every `ξ`.
    Certified,
    /// Finite data consistent with a limit at every sampled `ξ`; never a
    /// proof of goodness.
    NumericallyConsistent { max_residual: f64 },
    Inconclusive { residual_trace: Vec<(f64, f64)> },
}

impl Goodness {
    pub fn is_usable(&self) -> bool {
        !matches!(self, Goodness::Inconclusive { .. })
    }
}

/// Roots of unity of order at most 12 together with 16 pseudorandom points.
pub fn default_samples() -> Vec<Complex64> {
    let mut fractions: Vec<(u32, u32)> = Vec::new();
    for q in 1..=12u32 {
        for p in 0..q {
            if crate::groups::gcd(p as u64, q as u64) == 1 || (p == 0 && q == 1) {
                fractions.push((p, q));
            }
        }
    }
    let mut samples: Vec<Complex64> = fractions
        .into_iter()
        .map(|(p, q)| turn(p as f64 / q as f64))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    samples.extend((0..16).map(|_| turn(rng.gen::<f64>())));
    samples
}

/// Probes whether `w` behaves like a good weight at the sampled points.
/// The trace records `(arg ξ / 2π, residual)` for custom weights.
pub fn goodness_probe(w: &WeightSequence, samples: &[Complex64], schedule: &[u64], tol: f64) -> Result<Goodness> {
    let WeightKind::Custom { table, .. } = &w.kind else {
        return Ok(Goodness::Certified);
    };
    let schedule: Vec<u64> = schedule
        .iter()
        .copied()
        .filter(|&n| n <= table.len() as u64)
        .collect();
    let mut residual_trace = Vec::with_capacity(samples.len());
    for &xi in samples {
        let trace = cesaro_trace(table, xi, &schedule);
        let residual = match trace.as_slice() {
            [.., (_, a), (_, b)] => (b - a).norm(),
            _ => f64::INFINITY,
        };
        residual_trace.push((xi.arg() / (2.0 * PI), residual));
    }
    let max_residual = residual_trace.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(if max_residual <= tol {
        Goodness::NumericallyConsistent { max_residual }
    } else {
        Goodness::Inconclusive { residual_trace }
    })
}

/// Probe with the default samples and the `2^10 … 2^20` schedule.
pub fn goodness(w: &WeightSequence) -> Result<Goodness> {
    let schedule = default_schedule(w.available_terms().unwrap_or(1 << 20));
    goodness_probe(w, &default_samples(), &schedule, NUMERICAL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn pointwise_values() {
        let w = WeightSequence::character(0.25);
        assert!(close(w.weight_at(2).unwrap(), c(-1., 0.)));
        let p = WeightSequence::new(WeightKind::Periodic(vec![c(1., 0.), c(0., 0.)])).unwrap();
        assert!(close(p.weight_at(3).unwrap(), c(1., 0.)));
        let theta = 0.5f64.sqrt();
        let r = WeightSequence::new(WeightKind::Rotation {
            theta,
            omega: 0.0,
            coeffs: vec![(1, c(1., 0.))],
        })
        .unwrap();
        assert!(close(r.weight_at(1).unwrap(), turn(theta)));
        assert!(w.weight_at(0).is_err());
        let custom = WeightSequence::new(WeightKind::Custom {
            table: vec![c(1., 0.)],
            bound: 1.0,
        })
        .unwrap();
        assert_eq!(
            custom.weight_at(2),
            Err(Error::CustomOutOfRange { n: 2, len: 1 })
        );
    }

    #[test]
    fn closed_form_limits() {
        let one = c(1., 0.);
        let minus = c(-1., 0.);
        let k = WeightSequence::constant(1.0);
        assert!(close(weight_limit(&k, one).unwrap().value, one));
        assert!(close(weight_limit(&k, minus).unwrap().value, c(0., 0.)));

        let xi0 = turn(0.3);
        let ch = WeightSequence::character(0.3);
        assert!(close(weight_limit(&ch, xi0.conj()).unwrap().value, one));
        assert!(close(weight_limit(&ch, xi0).unwrap().value, c(0., 0.)));

        let p = WeightSequence::new(WeightKind::Periodic(vec![one, c(0., 0.)])).unwrap();
        assert!(close(weight_limit(&p, one).unwrap().value, c(0.5, 0.)));
        assert!(close(weight_limit(&p, minus).unwrap().value, c(-0.5, 0.)));
    }

    #[test]
    fn mean_weights() {
        assert!(close(mean_weight(&WeightSequence::constant(2.5)).unwrap(), c(2.5, 0.)));
        assert!(close(mean_weight(&WeightSequence::character(0.5)).unwrap(), c(0., 0.)));
        let p = WeightSequence::new(WeightKind::Periodic(vec![c(1., 0.), c(0., 0.)])).unwrap();
        assert!(close(mean_weight(&p).unwrap(), c(0.5, 0.)));
    }

    #[test]
    fn probe_verdicts() {
        let samples = default_samples();
        assert_eq!(samples.len(), 46 + 16);
        let ch = WeightSequence::character(0.125);
        assert_eq!(goodness(&ch).unwrap(), Goodness::Certified);
        let rot = WeightSequence::new(WeightKind::Rotation {
            theta: 2f64.sqrt() - 1.0,
            omega: 0.1,
            coeffs: vec![(-1, c(0.5, 0.)), (1, c(0.5, 0.))],
        })
        .unwrap();
        assert_eq!(goodness(&rot).unwrap(), Goodness::Certified);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let table: Vec<Complex64> = (0..1 << 20)
            .map(|_| c(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.))
            .collect();
        let custom = WeightSequence::new(WeightKind::Custom { table, bound: 1.0 }).unwrap();
        match goodness(&custom).unwrap() {
            Goodness::Inconclusive { residual_trace } => {
                assert_eq!(residual_trace.len(), samples.len());
                assert!(residual_trace.iter().any(|p| p.1 > NUMERICAL_TOL));
            }
            other => panic!("random signs must not look good: {other:?}"),
        }
        assert!(matches!(
            weight_limit(&custom, c(1., 0.)),
            Err(Error::Inconclusive { .. })
        ));
    }

    #[test]
    fn custom_periodic_table_is_consistent() {
        let table: Vec<Complex64> = (0..1 << 12).map(|i| c((i % 2) as f64, 0.)).collect();
        let w = WeightSequence::new(WeightKind::Custom { table, bound: 1.0 }).unwrap();
        let lim = weight_limit(&w, c(1., 0.)).unwrap();
        assert!((lim.value - c(0.5, 0.)).norm() < 1e-12);
        assert!(matches!(lim.mode, LimitMode::Numerical { .. }));
    }

    #[test]
    fn bound_is_enforced_for_custom() {
        assert!(WeightSequence::new(WeightKind::Custom {
            table: vec![c(2., 0.)],
            bound: 1.0
        })
        .is_err());
    }
}
