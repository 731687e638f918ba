//! Complex measures on finite groups and finitely supported measures on ℤ,
//! with the convolution algebra operations shared by both.

mod classify;
mod integer;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, Subgroup};

pub use classify::{classify, classify_int, classify_with, GeneratedGroup, MeasureClass, PowerBoundCertificate};
pub use integer::{IntMeasure, DEFAULT_WIDTH_CAP};

/// Default threshold below which a coefficient is treated as outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Operations the Cesàro machinery needs from a measure algebra.
pub trait Measure: Clone {
    /// The unit `δ_e` of the algebra this measure lives in.
    fn unit(&self) -> Self;
    fn zero(&self) -> Self;
    fn convolve(&self, other: &Self) -> Result<Self>;
    fn scale(&self, c: Complex64) -> Self;
    fn add_scaled(&mut self, other: &Self, c: Complex64) -> Result<()>;
    fn tv_norm(&self) -> f64;
    fn is_probability(&self, tol: f64) -> bool;
    /// Coordinates on which weak* convergence is observed: every element on a
    /// finite group, the given window on ℤ.
    fn observe(&self, window: Option<(i64, i64)>) -> Vec<Complex64>;
    /// Labels of the coordinates returned by [`Measure::observe`].
    fn observe_indices(&self, window: Option<(i64, i64)>) -> Vec<i64>;
    /// `Err(NotPowerBounded)` unless `sup_n ‖μ^n‖₁ < ∞` can be certified.
    fn ensure_power_bounded(&self) -> Result<()>;

    fn power(&self, n: u64) -> Result<Self> {
        let mut cache = PowerCache::new(self.clone());
        while cache.exponent() < n {
            cache.advance()?;
        }
        Ok(cache.current().clone())
    }
}

/// Successive powers `μ^0, μ^1, ...` computed incrementally.
#[derive(Debug, Clone)]
pub struct PowerCache<M> {
    base: M,
    current: M,
    exponent: u64,
}

impl<M: Measure> PowerCache<M> {
    pub fn new(base: M) -> Self {
        let current = base.unit();
        PowerCache {
            base,
            current,
            exponent: 0,
        }
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn current(&self) -> &M {
        &self.current
    }

    /// Moves to the next power and returns it.
    pub fn advance(&mut self) -> Result<&M> {
        self.current = if self.exponent == 0 {
            self.base.clone()
        } else {
            self.current.convolve(&self.base)?
        };
        self.exponent += 1;
        Ok(&self.current)
    }
}

/// A complex measure on a finite group, one coefficient per element.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    group: Arc<FiniteGroup>,
    coeffs: Vec<Complex64>,
}

impl serde::Serialize for FiniteMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coeffs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        let mut st = s.serialize_struct("FiniteMeasure", 2)?;
        st.serialize_field("group", self.group.label())?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

/// Constructors accepted by [`make_measure`].
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    Dirac(usize),
    HaarOnSubgroup(Subgroup),
    FromWeights(Vec<Complex64>),
    UniformOnSet(Vec<usize>),
}

pub fn make_measure(group: &Arc<FiniteGroup>, kind: MeasureKind) -> Result<FiniteMeasure> {
    match kind {
        MeasureKind::Dirac(g) => FiniteMeasure::dirac(group, g),
        MeasureKind::HaarOnSubgroup(h) => FiniteMeasure::haar_on_subgroup(group, &h),
        MeasureKind::FromWeights(w) => FiniteMeasure::from_weights(group, w),
        MeasureKind::UniformOnSet(s) => FiniteMeasure::uniform_on_set(group, &s),
    }
}

fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl FiniteMeasure {
    pub fn zeros(group: &Arc<FiniteGroup>) -> Self {
        FiniteMeasure {
            group: Arc::clone(group),
            coeffs: vec![ZERO; group.order()],
        }
    }

    pub fn dirac(group: &Arc<FiniteGroup>, g: usize) -> Result<Self> {
        let mut m = Self::zeros(group);
        *m.coeffs.get_mut(g).ok_or(Error::IndexOutOfRange {
            index: g,
            len: group.order(),
        })? = ONE;
        Ok(m)
    }

    /// Normalised counting measure on `h`, zero off `h`.
    pub fn haar_on_subgroup(group: &Arc<FiniteGroup>, h: &Subgroup) -> Result<Self> {
        if h.parent_order() != group.order() {
            return Err(Error::GroupMismatch);
        }
        Self::uniform_on_set(group, h.elements())
    }

    /// Haar measure `m_G` of the whole group.
    pub fn haar(group: &Arc<FiniteGroup>) -> Self {
        let w = Complex64::new(1.0 / group.order() as f64, 0.0);
        FiniteMeasure {
            group: Arc::clone(group),
            coeffs: vec![w; group.order()],
        }
    }

    pub fn uniform_on_set(group: &Arc<FiniteGroup>, set: &[usize]) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut m = Self::zeros(group);
        let mut distinct = set.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let w = Complex64::new(1.0 / distinct.len() as f64, 0.0);
        for g in distinct {
            *m.coeffs.get_mut(g).ok_or(Error::IndexOutOfRange {
                index: g,
                len: group.order(),
            })? = w;
        }
        Ok(m)
    }

    pub fn from_weights(group: &Arc<FiniteGroup>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::IndexOutOfRange {
                index: coeffs.len(),
                len: group.order(),
            });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite measure coefficient".into()));
        }
        Ok(FiniteMeasure {
            group: Arc::clone(group),
            coeffs,
        })
    }

    pub fn from_real(group: &Arc<FiniteGroup>, coeffs: &[f64]) -> Result<Self> {
        Self::from_weights(group, coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, g: usize) -> Complex64 {
        self.coeffs[g]
    }

    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(g, c)| (c.norm() > tol).then_some(g))
            .collect()
    }

    /// `μ̃(g) = conj μ(g⁻¹)`.
    pub fn involution(&self) -> Self {
        let coeffs = self
            .group
            .elements()
            .map(|g| self.coeffs[self.group.inv(g)].conj())
            .collect();
        FiniteMeasure {
            group: Arc::clone(&self.group),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(other, -ONE)?;
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        sup_distance(&self.coeffs, &other.coeffs)
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .sum()
    }

    /// `Σ_g f(g) μ(g)`.
    pub fn pairing(&self, f: &GroupFunction) -> Result<Complex64> {
        if !same_group(&self.group, &f.group) {
            return Err(Error::GroupMismatch);
        }
        Ok(self.coeffs.iter().zip(&f.values).map(|(m, v)| m * v).sum())
    }

    /// `(μ∗f)(g) = Σ_h μ(h) f(h⁻¹g)`.
    pub fn act_on_function(&self, f: &GroupFunction) -> Result<GroupFunction> {
        if !same_group(&self.group, &f.group) {
            return Err(Error::GroupMismatch);
        }
        let group = &self.group;
        let mut values = vec![ZERO; group.order()];
        for (h, &m) in self.coeffs.iter().enumerate() {
            if m == ZERO {
                continue;
            }
            for (s, &v) in f.values.iter().enumerate() {
                // h · s ranges over all g as s does.
                values[group.mul(h, s)] += m * v;
            }
        }
        let out = GroupFunction {
            group: Arc::clone(group),
            values,
        };
        debug_assert!(
            [1.0, 2.0, f64::INFINITY].iter().all(|&p| {
                out.norm(p) <= self.tv_norm() * f.norm(p) * (1.0 + 1e-12) + 1e-12
            }),
            "Young's inequality violated"
        );
        Ok(out)
    }
}

impl Measure for FiniteMeasure {
    fn unit(&self) -> Self {
        let mut m = Self::zeros(&self.group);
        m.coeffs[self.group.identity()] = ONE;
        m
    }

    fn zero(&self) -> Self {
        Self::zeros(&self.group)
    }

    fn convolve(&self, other: &Self) -> Result<Self> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        let group = &self.group;
        let mut coeffs = vec![ZERO; group.order()];
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for (b, &y) in other.coeffs.iter().enumerate() {
                coeffs[group.mul(a, b)] += x * y;
            }
        }
        let out = FiniteMeasure {
            group: Arc::clone(group),
            coeffs,
        };
        debug_assert!(
            out.tv_norm() <= self.tv_norm() * other.tv_norm() * (1.0 + 1e-12) + 1e-15,
            "total variation is submultiplicative"
        );
        Ok(out)
    }

    fn scale(&self, c: Complex64) -> Self {
        FiniteMeasure {
            group: Arc::clone(&self.group),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    fn add_scaled(&mut self, other: &Self, c: Complex64) -> Result<()> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        self.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += b * c);
        Ok(())
    }

    fn tv_norm(&self) -> f64 {
        let n: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        assert!(!n.is_nan(), "NaN total variation");
        n
    }

    fn is_probability(&self, tol: f64) -> bool {
        is_probability(&self.coeffs, tol)
    }

    fn observe(&self, _window: Option<(i64, i64)>) -> Vec<Complex64> {
        self.coeffs.clone()
    }

    fn observe_indices(&self, _window: Option<(i64, i64)>) -> Vec<i64> {
        (0..self.coeffs.len() as i64).collect()
    }

    fn ensure_power_bounded(&self) -> Result<()> {
        if self.tv_norm() <= 1.0 + SUPPORT_TOL {
            return Ok(());
        }
        let pb = crate::spectral::power_boundedness(self)?;
        if pb.bounded {
            Ok(())
        } else {
            Err(Error::NotPowerBounded(pb.certificate))
        }
    }
}

pub(crate) fn is_probability(coeffs: &[Complex64], tol: f64) -> bool {
    coeffs.iter().all(|c| c.im.abs() <= tol && c.re >= -tol)
        && (coeffs.iter().map(|c| c.re).sum::<f64>() - 1.0).abs() <= tol
}

pub(crate) fn sup_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// A complex-valued function on a finite group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    group: Arc<FiniteGroup>,
    values: Vec<Complex64>,
}

impl GroupFunction {
    pub fn new(group: &Arc<FiniteGroup>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::IndexOutOfRange {
                index: values.len(),
                len: group.order(),
            });
        }
        Ok(GroupFunction {
            group: Arc::clone(group),
            values,
        })
    }

    pub fn from_real(group: &Arc<FiniteGroup>, values: &[f64]) -> Result<Self> {
        Self::new(group, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn constant(group: &Arc<FiniteGroup>, c: Complex64) -> Self {
        GroupFunction {
            group: Arc::clone(group),
            values: vec![c; group.order()],
        }
    }

    pub fn indicator(group: &Arc<FiniteGroup>, set: &[usize]) -> Result<Self> {
        let mut values = vec![ZERO; group.order()];
        for &g in set {
            *values.get_mut(g).ok_or(Error::IndexOutOfRange {
                index: g,
                len: group.order(),
            })? = ONE;
        }
        Ok(GroupFunction {
            group: Arc::clone(group),
            values,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Left translate `f_g(s) = f(g⁻¹s)`.
    pub fn translate(&self, g: usize) -> Self {
        let ginv = self.group.inv(g);
        let values = self
            .group
            .elements()
            .map(|s| self.values[self.group.mul(ginv, s)])
            .collect();
        GroupFunction {
            group: Arc::clone(&self.group),
            values,
        }
    }

    /// `ℓ^p` norm for `p ∈ [1, ∞]`.
    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
        } else {
            self.values
                .iter()
                .map(|v| v.norm().powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
    }

    /// `Σ_g u(g) conj v(g)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if !same_group(&self.group, &other.group) {
            return Err(Error::GroupMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u * v.conj())
            .sum())
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        sup_distance(&self.values, &other.values)
    }
}
