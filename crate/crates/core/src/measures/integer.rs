use num_complex::Complex64;

use super::{is_probability, Measure, ZERO};
use crate::error::{Error, Result};

/// Default cap on the number of lattice points a ℤ measure may span.
pub const DEFAULT_WIDTH_CAP: usize = 1_000_000;

/// A finitely supported complex measure on ℤ.
///
/// Stored as a dense window `coeffs[k] = μ({base + k})`, trimmed so that the
/// first and last stored coefficients are nonzero. Powers of a measure whose
/// support is an interval stay intervals, which makes convolution a plain
/// sliding dot product.
#[derive(Debug, Clone, PartialEq)]
pub struct IntMeasure {
    base: i64,
    coeffs: Vec<Complex64>,
    width_cap: usize,
}

impl IntMeasure {
    /// Builds a measure from `(offset, weight)` pairs; repeated offsets add up.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let pairs: Vec<(i64, Complex64)> = pairs.into_iter().collect();
        if pairs.iter().any(|(_, c)| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite measure coefficient".into()));
        }
        let (lo, hi) = match (
            pairs.iter().map(|p| p.0).min(),
            pairs.iter().map(|p| p.0).max(),
        ) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return Ok(Self::zero_measure()),
        };
        let width = (hi - lo) as usize + 1;
        if width > DEFAULT_WIDTH_CAP {
            return Err(Error::SupportOverflow {
                width,
                cap: DEFAULT_WIDTH_CAP,
            });
        }
        let mut coeffs = vec![ZERO; width];
        for (k, c) in pairs {
            coeffs[(k - lo) as usize] += c;
        }
        Ok(Self::trimmed(lo, coeffs, DEFAULT_WIDTH_CAP))
    }

    pub fn from_real_pairs(pairs: &[(i64, f64)]) -> Result<Self> {
        Self::from_pairs(pairs.iter().map(|&(k, w)| (k, Complex64::new(w, 0.0))))
    }

    pub fn dirac(k: i64) -> Self {
        IntMeasure {
            base: k,
            coeffs: vec![Complex64::new(1.0, 0.0)],
            width_cap: DEFAULT_WIDTH_CAP,
        }
    }

    pub fn zero_measure() -> Self {
        IntMeasure {
            base: 0,
            coeffs: Vec::new(),
            width_cap: DEFAULT_WIDTH_CAP,
        }
    }

    pub fn with_width_cap(mut self, cap: usize) -> Self {
        self.width_cap = cap;
        self
    }

    fn trimmed(mut base: i64, mut coeffs: Vec<Complex64>, width_cap: usize) -> Self {
        let first = coeffs.iter().position(|c| *c != ZERO);
        match first {
            None => coeffs.clear(),
            Some(first) => {
                let last = coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(first);
                coeffs.truncate(last + 1);
                coeffs.drain(..first);
                base += first as i64;
            }
        }
        IntMeasure {
            base,
            coeffs,
            width_cap,
        }
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let idx = k - self.base;
        if idx < 0 {
            return ZERO;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(ZERO)
    }

    /// Stored range `[lo, hi]`, or `None` for the zero measure.
    pub fn range(&self) -> Option<(i64, i64)> {
        (!self.coeffs.is_empty()).then(|| (self.base, self.base + self.coeffs.len() as i64 - 1))
    }

    /// Nonzero `(offset, coefficient)` pairs in increasing offset order.
    pub fn entries(&self) -> Vec<(i64, Complex64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(i, &c)| (self.base + i as i64, c))
            .collect()
    }

    pub fn support(&self, tol: f64) -> Vec<i64> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(i, _)| self.base + i as i64)
            .collect()
    }

    /// `μ̃(k) = conj μ(-k)`.
    pub fn involution(&self) -> Self {
        match self.range() {
            None => self.clone(),
            Some((_, hi)) => IntMeasure {
                base: -hi,
                coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
                width_cap: self.width_cap,
            },
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn window_values(&self, lo: i64, hi: i64) -> Vec<Complex64> {
        (lo..=hi).map(|k| self.get(k)).collect()
    }

    pub fn window_sup(&self, lo: i64, hi: i64) -> f64 {
        (lo..=hi).map(|k| self.get(k).norm()).fold(0.0, f64::max)
    }

    /// `Σ_k u(k) conj v(k)`, treating both as finitely supported functions.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.entries()
            .into_iter()
            .map(|(k, u)| u * other.get(k).conj())
            .sum()
    }
}

impl serde::Serialize for IntMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coeffs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        let mut st = s.serialize_struct("IntMeasure", 2)?;
        st.serialize_field("base", &self.base)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl Measure for IntMeasure {
    fn unit(&self) -> Self {
        IntMeasure::dirac(0).with_width_cap(self.width_cap)
    }

    fn zero(&self) -> Self {
        IntMeasure::zero_measure().with_width_cap(self.width_cap)
    }

    fn convolve(&self, other: &Self) -> Result<Self> {
        let cap = self.width_cap.max(other.width_cap);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(IntMeasure::zero_measure().with_width_cap(cap));
        }
        let width = self.coeffs.len() + other.coeffs.len() - 1;
        if width > cap {
            return Err(Error::SupportOverflow { width, cap });
        }
        // Slide the shorter operand over the longer one.
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (&self.coeffs, &other.coeffs)
        } else {
            (&other.coeffs, &self.coeffs)
        };
        let mut out = vec![ZERO; width];
        for (j, &s) in short.iter().enumerate() {
            if s == ZERO {
                continue;
            }
            for (slot, &l) in out[j..j + long.len()].iter_mut().zip(long.iter()) {
                *slot += s * l;
            }
        }
        Ok(Self::trimmed(self.base + other.base, out, cap))
    }

    fn scale(&self, c: Complex64) -> Self {
        Self::trimmed(
            self.base,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.width_cap,
        )
    }

    fn add_scaled(&mut self, other: &Self, c: Complex64) -> Result<()> {
        let Some((olo, ohi)) = other.range() else {
            return Ok(());
        };
        let (lo, hi) = match self.range() {
            None => (olo, ohi),
            Some((slo, shi)) => (slo.min(olo), shi.max(ohi)),
        };
        let width = (hi - lo) as usize + 1;
        if width > self.width_cap {
            return Err(Error::SupportOverflow {
                width,
                cap: self.width_cap,
            });
        }
        let mut coeffs = vec![ZERO; width];
        for (i, &x) in self.coeffs.iter().enumerate() {
            coeffs[(self.base - lo) as usize + i] = x;
        }
        for (i, &x) in other.coeffs.iter().enumerate() {
            coeffs[(other.base - lo) as usize + i] += x * c;
        }
        *self = Self::trimmed(lo, coeffs, self.width_cap);
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

    fn observe(&self, window: Option<(i64, i64)>) -> Vec<Complex64> {
        let (lo, hi) = window.unwrap_or((-8, 8));
        self.window_values(lo, hi)
    }

    fn observe_indices(&self, window: Option<(i64, i64)>) -> Vec<i64> {
        let (lo, hi) = window.unwrap_or((-8, 8));
        (lo..=hi).collect()
    }

    fn ensure_power_bounded(&self) -> Result<()> {
        let tv = self.tv_norm();
        if tv <= 1.0 + super::SUPPORT_TOL {
            Ok(())
        } else {
            Err(Error::NotPowerBounded(format!(
                "total variation {tv} > 1 is not certified on ℤ"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_square() {
        let mu = IntMeasure::from_real_pairs(&[(0, 0.5), (1, 0.5)]).unwrap();
        let sq = mu.convolve(&mu).unwrap();
        assert_eq!(
            sq.entries(),
            vec![
                (0, Complex64::new(0.25, 0.)),
                (1, Complex64::new(0.5, 0.)),
                (2, Complex64::new(0.25, 0.))
            ]
        );
        assert_eq!(mu.power(0).unwrap(), IntMeasure::dirac(0));
    }

    #[test]
    fn symmetric_walk_keeps_parity_gaps() {
        let mu = IntMeasure::from_real_pairs(&[(-1, 0.5), (1, 0.5)]).unwrap();
        let sq = mu.power(2).unwrap();
        assert_eq!(sq.range(), Some((-2, 2)));
        assert_eq!(sq.support(1e-12), vec![-2, 0, 2]);
        assert_eq!(sq.get(1), ZERO);
        assert_eq!(sq.get(0).re, 0.5);
    }

    #[test]
    fn involution_reflects() {
        let mu = IntMeasure::from_pairs([(2, Complex64::new(0.0, 1.0)), (5, Complex64::new(1.0, 0.0))])
            .unwrap();
        let inv = mu.involution();
        assert_eq!(inv.get(-2), Complex64::new(0.0, -1.0));
        assert_eq!(inv.get(-5), Complex64::new(1.0, 0.0));
        assert_eq!(inv.involution(), mu);
    }

    #[test]
    fn width_cap_is_enforced() {
        let mu = IntMeasure::from_real_pairs(&[(0, 0.5), (1, 0.5)])
            .unwrap()
            .with_width_cap(10);
        assert!(mu.power(9).is_ok());
        assert!(matches!(mu.power(10), Err(Error::SupportOverflow { .. })));
    }

    #[test]
    fn add_scaled_merges_ranges() {
        let mut a = IntMeasure::dirac(-3);
        a.add_scaled(&IntMeasure::dirac(4), Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(a.range(), Some((-3, 4)));
        assert_eq!(a.tv_norm(), 3.0);
        a.add_scaled(&IntMeasure::dirac(-3), Complex64::new(-1.0, 0.0)).unwrap();
        assert_eq!(a.range(), Some((4, 4)));
    }
}
