mod common;

use std::collections::BTreeSet;

use common::*;
use ergolab::groups::{
    all_subgroups, difference_subgroup, generated_subgroup, z_subgroup, FiniteGroup,
};
use ergolab::measures::{classify, FiniteMeasure, Measure, SUPPORT_TOL};
use num_complex::Complex64;
use proptest::prelude::*;

fn subset_of(g: &FiniteGroup, mask: &[bool]) -> Vec<usize> {
    let mut s: Vec<usize> = (0..g.order()).filter(|&i| mask[i % mask.len()]).collect();
    if s.is_empty() {
        s.push(mask.len() % g.order());
    }
    s
}

/// Extended Euclid: returns `(d, x, y)` with `a·x + b·y = d`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (d, x, y) = ext_gcd(b, a.rem_euclid(b));
        (d, y, x - a.div_euclid(b) * y)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn single_entry_mutation_is_rejected(
        g in group_from(families(24)),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        shift in 1usize..24,
    ) {
        let n = g.order();
        prop_assume!(n > 1);
        let mut rows = g.rows();
        let (a, b) = (a.index(n), b.index(n));
        rows[a][b] = (rows[a][b] + shift % (n - 1) + 1) % n;
        prop_assert!(FiniteGroup::from_table(rows, "mutated").is_err());
    }

    #[test]
    fn generated_subgroup_is_a_fixed_point(
        g in group_from(families(24)),
        mask in proptest::collection::vec(prop::bool::weighted(0.15), 24),
        pick in any::<prop::sample::Index>(),
    ) {
        let s = subset_of(&g, &mask);
        let h = generated_subgroup(&g, &s).unwrap();
        let extra = h.elements()[pick.index(h.order())];
        let mut t = s.clone();
        t.push(extra);
        prop_assert_eq!(generated_subgroup(&g, &t).unwrap(), h);
    }

    #[test]
    fn difference_subgroup_is_base_point_free(
        g in group_from(families(24)),
        mask in proptest::collection::vec(prop::bool::weighted(0.2), 24),
    ) {
        let s = subset_of(&g, &mask);
        let d = difference_subgroup(&g, &s).unwrap();
        for &s0 in &s {
            let shifted: Vec<usize> = s.iter().map(|&x| g.mul(g.inv(s0), x)).collect();
            prop_assert_eq!(generated_subgroup(&g, &shifted).unwrap(), d.clone());
        }
    }

    #[test]
    fn z_subgroup_is_the_gcd(set in proptest::collection::vec(-60i64..60, 1..6)) {
        let d = z_subgroup(&set).unwrap().d as i64;
        let divides = set.iter().all(|&x| if d == 0 { x == 0 } else { x % d == 0 });
        prop_assert!(divides);
        // Fold Bezout coefficients through the set and check the combination.
        let mut acc = (0i64, vec![0i64; set.len()]);
        for (i, &x) in set.iter().enumerate() {
            let (g, p, q) = ext_gcd(acc.0, x);
            let mut coeffs: Vec<i64> = acc.1.iter().map(|c| c * p).collect();
            coeffs[i] += q;
            acc = (g, coeffs);
        }
        let combo: i64 = set.iter().zip(&acc.1).map(|(x, c)| x * c).sum();
        prop_assert_eq!(combo, d);
    }

    #[test]
    fn convolution_is_associative_with_unit(
        (a, b, c) in group_from(families(24)).prop_flat_map(|g| (complex_on(g.clone()), complex_on(g.clone()), complex_on(g)))
    ) {
        let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        let scale = a.tv_norm() * b.tv_norm() * c.tv_norm();
        prop_assert!(left.l1_distance(&right) <= 1e-12 * scale.max(1.0));
        let e = FiniteMeasure::dirac(a.group(), a.group().identity()).unwrap();
        prop_assert_eq!(e.convolve(&a).unwrap(), a.clone());
        prop_assert_eq!(a.convolve(&e).unwrap(), a.clone());
        prop_assert!(a.convolve(&b).unwrap().tv_norm() <= a.tv_norm() * b.tv_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn involution_reverses_products(
        (a, b) in group_from(families(24)).prop_flat_map(|g| (complex_on(g.clone()), complex_on(g)))
    ) {
        let lhs = a.convolve(&b).unwrap().involution();
        let rhs = b.involution().convolve(&a.involution()).unwrap();
        prop_assert!(lhs.l1_distance(&rhs) <= 1e-12 * (a.tv_norm() * b.tv_norm()).max(1.0));
        prop_assert_eq!(a.involution().involution(), a);
    }

    #[test]
    fn support_of_symmetrization(mu in any_probability(24)) {
        let g = mu.group().clone();
        let supp = mu.support(SUPPORT_TOL);
        let got: BTreeSet<usize> = mu.involution().convolve(&mu).unwrap().support(SUPPORT_TOL).into_iter().collect();
        let want: BTreeSet<usize> = supp
            .iter()
            .flat_map(|&x| supp.iter().map(move |&y| (x, y)))
            .map(|(x, y)| g.mul(g.inv(x), y))
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn strict_aperiodicity_implies_adapted(mu in any_probability(24)) {
        let c = classify(&mu, 1e-9).unwrap();
        prop_assert!(!c.strictly_aperiodic || c.adapted);
        let sym = classify(&mu.involution().convolve(&mu).unwrap(), 1e-9).unwrap();
        prop_assert_eq!(c.strictly_aperiodic, sym.adapted);
    }
}

#[test]
fn family_tables_validate() {
    for g in families(24) {
        g.validate().unwrap();
        FiniteGroup::from_table(g.rows(), g.label()).unwrap();
    }
}

#[test]
fn haar_on_every_subgroup_is_idempotent() {
    for g in families(24) {
        for h in all_subgroups(&g).unwrap() {
            let m = FiniteMeasure::haar_on_subgroup(&g, &h).unwrap();
            let sq = m.convolve(&m).unwrap();
            assert!(sq.l1_distance(&m) < 1e-13, "{} subgroup of order {}", g.label(), h.order());
            assert!(classify(&m, 1e-9).unwrap().idempotent);
        }
    }
}

#[test]
fn complex_scaling_commutes_with_convolution() {
    let g = families(6).into_iter().find(|g| g.order() == 6 && g.cyclic_factors().is_none()).unwrap();
    let a = FiniteMeasure::uniform_on_set(&g, &[1, 2]).unwrap();
    let c = Complex64::new(0.3, -0.4);
    let lhs = a.scale(c).convolve(&a).unwrap();
    let rhs = a.convolve(&a).unwrap().scale(c);
    assert!(lhs.l1_distance(&rhs) < 1e-15);
}
