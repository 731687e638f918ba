#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use ergolab::groups::{build_group, builtin_families, permutation_index, FiniteGroup, GroupSpec};
use ergolab::measures::FiniteMeasure;
use num_complex::Complex64;
use proptest::prelude::*;

pub fn families(max_order: usize) -> Vec<Arc<FiniteGroup>> {
    static ALL: OnceLock<Vec<Arc<FiniteGroup>>> = OnceLock::new();
    ALL.get_or_init(|| {
        builtin_families(24)
            .iter()
            .map(|s| Arc::new(build_group(s).unwrap()))
            .collect()
    })
    .iter()
    .filter(|g| g.order() <= max_order)
    .cloned()
    .collect()
}

pub fn abelian_families(max_order: usize) -> Vec<Arc<FiniteGroup>> {
    families(max_order)
        .into_iter()
        .filter(|g| g.cyclic_factors().is_some())
        .collect()
}

pub fn group_from(list: Vec<Arc<FiniteGroup>>) -> impl Strategy<Value = Arc<FiniteGroup>> {
    (0..list.len()).prop_map(move |i| Arc::clone(&list[i]))
}

/// A probability measure whose mass sits on a random nonempty subset.
pub fn probability_on(g: Arc<FiniteGroup>) -> impl Strategy<Value = FiniteMeasure> {
    let n = g.order();
    (
        proptest::collection::vec(any::<bool>(), n),
        proptest::collection::vec(0.05f64..1.0, n),
        0..n,
    )
        .prop_map(move |(mask, w, forced)| {
            let raw: Vec<f64> = (0..n)
                .map(|i| if mask[i] || i == forced { w[i] } else { 0.0 })
                .collect();
            let total: f64 = raw.iter().sum();
            let coeffs: Vec<f64> = raw.iter().map(|x| x / total).collect();
            FiniteMeasure::from_real(&g, &coeffs).unwrap()
        })
}

/// Probability measure with masses in multiples of 1/64, so every partial
/// sum of coefficients is exact.
pub fn dyadic_probability_on(g: Arc<FiniteGroup>) -> impl Strategy<Value = FiniteMeasure> {
    let n = g.order();
    proptest::collection::vec(0..n, 64).prop_map(move |picks| {
        let mut coeffs = vec![0.0; n];
        for p in picks {
            coeffs[p] += 1.0 / 64.0;
        }
        FiniteMeasure::from_real(&g, &coeffs).unwrap()
    })
}

pub fn complex_on(g: Arc<FiniteGroup>) -> impl Strategy<Value = FiniteMeasure> {
    let n = g.order();
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |v| {
        FiniteMeasure::from_weights(&g, v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap()
    })
}

pub fn any_probability(max_order: usize) -> impl Strategy<Value = FiniteMeasure> {
    group_from(families(max_order)).prop_flat_map(probability_on)
}

pub fn any_complex(max_order: usize) -> impl Strategy<Value = FiniteMeasure> {
    group_from(families(max_order)).prop_flat_map(complex_on)
}

pub fn group(spec: GroupSpec) -> Arc<FiniteGroup> {
    Arc::new(build_group(&spec).unwrap())
}

pub fn real(g: &Arc<FiniteGroup>, coeffs: &[f64]) -> FiniteMeasure {
    FiniteMeasure::from_real(g, coeffs).unwrap()
}

fn perm(g: &FiniteGroup, p: &[usize]) -> usize {
    let i = permutation_index(p).unwrap();
    assert!(i < g.order());
    i
}

/// A measure with a hand-derived Katznelson–Tzafriri predicate
/// (`σ(λ(μ)) ∩ 𝕋 ⊆ {1}`).
pub struct KtCase {
    pub label: &'static str,
    pub mu: FiniteMeasure,
    pub predicate: bool,
}

pub fn kt_curated() -> Vec<KtCase> {
    let z1 = group(GroupSpec::Cyclic(1));
    let z2 = group(GroupSpec::Cyclic(2));
    let z3 = group(GroupSpec::Cyclic(3));
    let z4 = group(GroupSpec::Cyclic(4));
    let z5 = group(GroupSpec::Cyclic(5));
    let z6 = group(GroupSpec::Cyclic(6));
    let z8 = group(GroupSpec::Cyclic(8));
    let v4 = group(GroupSpec::Product(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(2)]));
    let d4 = group(GroupSpec::Dihedral(4));
    let s3 = group(GroupSpec::Symmetric(3));
    let s4 = group(GroupSpec::Symmetric(4));
    let (t12, t13, t23, c123) = (
        perm(&s3, &[1, 0, 2]),
        perm(&s3, &[2, 1, 0]),
        perm(&s3, &[0, 2, 1]),
        perm(&s3, &[1, 2, 0]),
    );
    let s4_t = perm(&s4, &[1, 0, 2, 3]);
    let s4_c = perm(&s4, &[1, 2, 3, 0]);
    let i = Complex64::new(0.0, 1.0);
    let case = |label, mu, predicate| KtCase { label, mu, predicate };
    vec![
        case("Z2 (1/4,3/4)", real(&z2, &[0.25, 0.75]), true),
        case("Z2 delta_1", real(&z2, &[0.0, 1.0]), false),
        case("Z2 delta_e", real(&z2, &[1.0, 0.0]), true),
        case("Z1 delta_e", real(&z1, &[1.0]), true),
        case("Z6 delta_e", FiniteMeasure::dirac(&z6, 0).unwrap(), true),
        case("Z2 Haar", FiniteMeasure::haar(&z2), true),
        case("Z3 delta_1", real(&z3, &[0.0, 1.0, 0.0]), false),
        case("Z3 (1/2)(delta_0+delta_1)", real(&z3, &[0.5, 0.5, 0.0]), true),
        case("Z4 (1/2)(delta_1+delta_3)", real(&z4, &[0.0, 0.5, 0.0, 0.5]), false),
        case("Z4 (1/2)(delta_0+delta_1)", real(&z4, &[0.5, 0.5, 0.0, 0.0]), true),
        case("Z5 uniform{1,2}", real(&z5, &[0.0, 0.5, 0.5, 0.0, 0.0]), true),
        case("Z6 uniform{1,2}", real(&z6, &[0.0, 0.5, 0.5, 0.0, 0.0, 0.0]), true),
        case("Z6 uniform{1,3,5}", real(&z6, &[0.0, 1.0 / 3.0, 0.0, 1.0 / 3.0, 0.0, 1.0 / 3.0]), false),
        case("Z6 Haar", FiniteMeasure::haar(&z6), true),
        case("Z8 (1/4,1/2,1/4) on {0,1,2}", real(&z8, &[0.25, 0.5, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0]), true),
        case("Z8 uniform{2,6}", real(&z8, &[0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0]), false),
        case("Z2xZ2 uniform{(0,1),(1,0)}", real(&v4, &[0.0, 0.5, 0.5, 0.0]), false),
        case("Z2xZ2 uniform{e,(0,1),(1,0)}", real(&v4, &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]), true),
        case("S3 uniform transpositions", FiniteMeasure::uniform_on_set(&s3, &[t12, t13, t23]).unwrap(), false),
        case("S3 uniform{(12),(123)}", FiniteMeasure::uniform_on_set(&s3, &[t12, c123]).unwrap(), true),
        case("S3 delta_(123)", FiniteMeasure::dirac(&s3, c123).unwrap(), false),
        case("S3 uniform{e,(12),(123)}", FiniteMeasure::uniform_on_set(&s3, &[0, t12, c123]).unwrap(), true),
        case("S4 uniform{(12),(1234)}", FiniteMeasure::uniform_on_set(&s4, &[s4_t, s4_c]).unwrap(), false),
        case("S4 uniform{e,(12),(1234)}", FiniteMeasure::uniform_on_set(&s4, &[0, s4_t, s4_c]).unwrap(), true),
        case("D4 uniform{e,r,s}", FiniteMeasure::uniform_on_set(&d4, &[0, 1, 4]).unwrap(), true),
        case(
            "Z2 i*delta_e",
            FiniteMeasure::from_weights(&z2, vec![i, Complex64::new(0.0, 0.0)]).unwrap(),
            false,
        ),
        case(
            "Z2 (i/2)delta_0 + (1/2)delta_1",
            FiniteMeasure::from_weights(&z2, vec![i * 0.5, Complex64::new(0.5, 0.0)]).unwrap(),
            true,
        ),
        case(
            "Z4 0.3 delta_0 - 0.4 delta_2",
            real(&z4, &[0.3, 0.0, -0.4, 0.0]),
            true,
        ),
    ]
}
