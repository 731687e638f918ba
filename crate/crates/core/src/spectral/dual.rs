use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{difference_subgroup, gcd, generated_subgroup, FiniteGroup, Subgroup};
use crate::measures::{FiniteMeasure, SUPPORT_TOL};

use super::ser_complex_vec;

/// Characters are indexed like elements: `χ_k(g) = exp(2πi Σ_j k_j g_j / n_j)`
/// where `k` and `g` are coordinates in the cyclic factors.
#[derive(Debug, Clone, Serialize)]
pub struct DualTable {
    pub factors: Vec<usize>,
    /// `μ̂(χ_k) = Σ_g μ(g) χ_k(g)`, one entry per character index `k`.
    #[serde(serialize_with = "ser_complex_vec")]
    pub transform: Vec<Complex64>,
    /// `{χ : |μ̂(χ) − 1| ≤ tol}`.
    pub f_set: Vec<usize>,
    /// `{χ : ||μ̂(χ)| − 1| ≤ tol}`.
    pub e_set: Vec<usize>,
    pub tol: f64,
}

fn factors(group: &FiniteGroup) -> Result<&[usize]> {
    group.cyclic_factors().ok_or(Error::NotAbelian)
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Phase of `χ_k(g)` as an exact fraction `num / den` of a full turn.
fn phase(factors: &[usize], group: &FiniteGroup, k: usize, g: usize) -> (u64, u64) {
    let den = factors.iter().fold(1u64, |acc, &n| lcm(acc, n as u64));
    let kc = group.coordinates(k).unwrap_or_default();
    let gc = group.coordinates(g).unwrap_or_default();
    let num = factors
        .iter()
        .zip(kc.iter().zip(&gc))
        .map(|(&n, (&kj, &gj))| (kj as u64 * gj as u64 % n as u64) * (den / n as u64))
        .sum::<u64>()
        % den;
    (num, den)
}

pub fn character_value(group: &FiniteGroup, k: usize, g: usize) -> Result<Complex64> {
    let factors = factors(group)?;
    let (num, den) = phase(factors, group, k, g);
    Ok(Complex64::from_polar(1.0, 2.0 * PI * num as f64 / den as f64))
}

/// `μ̂(χ_k)` for every character.
pub fn fourier_transform(mu: &FiniteMeasure) -> Result<Vec<Complex64>> {
    let group = mu.group();
    factors(group)?;
    group
        .elements()
        .map(|k| {
            group.elements().try_fold(Complex64::new(0.0, 0.0), |acc, g| {
                Ok(acc + mu.get(g) * character_value(group, k, g)?)
            })
        })
        .collect()
}

pub fn dual_table(mu: &FiniteMeasure, tol: f64) -> Result<DualTable> {
    let factors = factors(mu.group())?.to_vec();
    let transform = fourier_transform(mu)?;
    let f_set = (0..transform.len())
        .filter(|&k| (transform[k] - 1.0).norm() <= tol)
        .collect();
    let e_set = (0..transform.len())
        .filter(|&k| (transform[k].norm() - 1.0).abs() <= tol)
        .collect();
    Ok(DualTable {
        factors,
        transform,
        f_set,
        e_set,
        tol,
    })
}

/// `H^⊥ = {χ : χ(h) = 1 for all h ∈ H}`, decided with exact integer phases.
pub fn annihilator(group: &FiniteGroup, h: &Subgroup) -> Result<Vec<usize>> {
    let factors = factors(group)?;
    Ok(group
        .elements()
        .filter(|&k| h.elements().iter().all(|&x| phase(factors, group, k, x).0 == 0))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualIdentities {
    pub f_set: Vec<usize>,
    pub expected_f: Vec<usize>,
    pub e_set: Vec<usize>,
    pub expected_e: Vec<usize>,
    pub f_matches: bool,
    pub e_matches: bool,
}

impl DualTable {
    /// Checks `F_μ = [supp μ]^⊥` and `E_μ = [supp(μ̃∗μ)]^⊥` for a probability
    /// measure `μ`.
    pub fn check_identities(&self, mu: &FiniteMeasure) -> Result<DualIdentities> {
        let group = mu.group();
        let support = mu.support(SUPPORT_TOL);
        let expected_f = annihilator(group, &generated_subgroup(group, &support)?)?;
        let expected_e = annihilator(group, &difference_subgroup(group, &support)?)?;
        Ok(DualIdentities {
            f_matches: self.f_set == expected_f,
            e_matches: self.e_set == expected_e,
            f_set: self.f_set.clone(),
            expected_f,
            e_set: self.e_set.clone(),
            expected_e,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_group, GroupSpec};
    use crate::measures::Measure;
    use std::sync::Arc;

    fn grp(spec: GroupSpec) -> Arc<FiniteGroup> {
        Arc::new(build_group(&spec).unwrap())
    }

    #[test]
    fn z4_odd_walk() {
        let z4 = grp(GroupSpec::Cyclic(4));
        let mu = FiniteMeasure::from_real(&z4, &[0., 0.5, 0., 0.5]).unwrap();
        let t = dual_table(&mu, 1e-9).unwrap();
        for (k, want) in [1.0, 0.0, -1.0, 0.0].iter().enumerate() {
            assert!((t.transform[k] - want).norm() < 1e-12);
        }
        assert_eq!(t.f_set, vec![0]);
        assert_eq!(t.e_set, vec![0, 2]);
        let id = t.check_identities(&mu).unwrap();
        assert!(id.f_matches && id.e_matches);
    }

    #[test]
    fn dirac_identity_and_biased_coin() {
        let g = grp(GroupSpec::Product(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(4)]));
        let t = dual_table(&FiniteMeasure::dirac(&g, g.identity()).unwrap(), 1e-9).unwrap();
        assert!(t.transform.iter().all(|z| (z - 1.0).norm() < 1e-15));
        assert_eq!(t.f_set.len(), 8);
        assert_eq!(t.e_set.len(), 8);

        let z2 = grp(GroupSpec::Cyclic(2));
        let t = dual_table(&FiniteMeasure::from_real(&z2, &[0.25, 0.75]).unwrap(), 1e-9).unwrap();
        assert!((t.transform[1] + 0.5).norm() < 1e-15);
        assert_eq!((t.f_set.clone(), t.e_set.clone()), (vec![0], vec![0]));
    }

    #[test]
    fn transform_is_multiplicative() {
        let g = grp(GroupSpec::Cyclic(6));
        let a = FiniteMeasure::from_real(&g, &[0.1, 0.2, 0.3, 0.0, 0.15, 0.25]).unwrap();
        let b = FiniteMeasure::from_real(&g, &[0.5, 0.0, 0.0, 0.5, 0.0, 0.0]).unwrap();
        let ab = fourier_transform(&a.convolve(&b).unwrap()).unwrap();
        let (fa, fb) = (fourier_transform(&a).unwrap(), fourier_transform(&b).unwrap());
        for k in 0..6 {
            assert!((ab[k] - fa[k] * fb[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn nonabelian_is_rejected() {
        let s3 = grp(GroupSpec::Symmetric(3));
        let mu = FiniteMeasure::haar(&s3);
        assert!(matches!(dual_table(&mu, 1e-9), Err(Error::NotAbelian)));
    }
}
