mod common;

use common::*;
use ergolab::ergodic::{detect_limit, limit_measure, weighted_cesaro, weighted_mean_check};
use ergolab::measures::{classify, FiniteMeasure, Measure};
use ergolab::spectral::linalg::{max_abs, multiset_distance, rank, CMatrix};
use ergolab::spectral::{dual_table, ergodic_projection, fourier_transform, regular_matrix, spectrum};
use ergolab::weights::{cesaro_average, default_samples, weight_limit, WeightKind, WeightSequence};
use num_complex::Complex64;
use proptest::prelude::*;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn turn(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x)
}

/// Weight kinds with closed-form limits and arbitrary frequencies.
fn builtin_weight() -> impl Strategy<Value = WeightSequence> {
    let c = (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im));
    prop_oneof![
        grid_weight(),
        c.clone().prop_map(|c| WeightSequence::new(WeightKind::Constant(c)).unwrap()),
        (0u32..12, 1u32..=12).prop_map(|(p, q)| WeightSequence::character(f64::from(p % q) / f64::from(q))),
        (-1.0f64..1.0).prop_map(WeightSequence::character),
        proptest::collection::vec(c.clone(), 1..5)
            .prop_map(|v| WeightSequence::new(WeightKind::Periodic(v)).unwrap()),
        (0.0f64..1.0, 0.0f64..1.0, proptest::collection::vec((-3i64..=3, c), 1..4)).prop_map(
            |(theta, omega, coeffs)| WeightSequence::new(WeightKind::Rotation { theta, omega, coeffs }).unwrap()
        ),
    ]
}

/// Weight kinds whose frequencies are fractions `p/q` with `q ≤ 12`.
fn grid_weight() -> impl Strategy<Value = WeightSequence> {
    let c = (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im));
    let frac = (0u32..12, 1u32..=12).prop_map(|(p, q)| f64::from(p % q) / f64::from(q));
    prop_oneof![
        c.clone().prop_map(|c| WeightSequence::new(WeightKind::Constant(c)).unwrap()),
        frac.clone().prop_map(WeightSequence::character),
        proptest::collection::vec(c.clone(), 1..5)
            .prop_map(|v| WeightSequence::new(WeightKind::Periodic(v)).unwrap()),
        (frac, 0.0f64..1.0, proptest::collection::vec((-1i64..=1, c), 1..3)).prop_map(
            |(theta, omega, coeffs)| WeightSequence::new(WeightKind::Rotation { theta, omega, coeffs }).unwrap()
        ),
    ]
}

/// Frequencies `f` (in turns) and amplitudes with `a_n = Σ amp·e^{2πi f n}`.
fn spectrum_of_weight(w: &WeightSequence) -> Vec<(f64, f64)> {
    match w.kind() {
        WeightKind::Constant(c) => vec![(0.0, c.norm())],
        WeightKind::Character { turns } => vec![(*turns, 1.0)],
        WeightKind::Periodic(v) => {
            let p = v.len();
            (0..p)
                .map(|k| {
                    // a_n = Σ_k b_k e^{2πi k n / p} with b_k from the DFT of the period.
                    let b: Complex64 = v
                        .iter()
                        .enumerate()
                        .map(|(j, a)| a * turn(-((k * (j + 1)) as f64) / p as f64))
                        .sum::<Complex64>()
                        / p as f64;
                    (k as f64 / p as f64, b.norm())
                })
                .collect()
        }
        WeightKind::Rotation { theta, coeffs, .. } => coeffs.iter().map(|(k, c)| (*k as f64 * theta, c.norm())).collect(),
        WeightKind::Custom { .. } => unreachable!(),
    }
}

fn frac_dist(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    r.min(1.0 - r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_match_fourier_transform(
        mu in group_from(abelian_families(20)).prop_flat_map(|g| prop_oneof![probability_on(g.clone()), complex_on(g)])
    ) {
        let eig = spectrum(&mu).unwrap().eigenvalues;
        let fourier = fourier_transform(&mu).unwrap();
        prop_assert!(multiset_distance(&eig, &fourier).unwrap() <= 1e-8);
    }

    #[test]
    fn projection_laws(mu in any_probability(12)) {
        let report = spectrum(&mu).unwrap();
        let n = mu.group().order();
        let projections: Vec<(Complex64, CMatrix)> = report
            .unitary
            .iter()
            .map(|u| (u.value, ergodic_projection(&mu, u.value.conj()).unwrap().projection))
            .collect();
        for (i, (_, p)) in projections.iter().enumerate() {
            prop_assert!(max_abs(&(p * p - p)) <= 1e-8);
            for (_, q) in projections.iter().skip(i + 1) {
                prop_assert!(max_abs(&(p * q)) <= 1e-8);
            }
        }
        let total = projections.iter().fold(CMatrix::zeros(n, n), |acc, (_, p)| acc + p);
        let multiplicity: usize = report.unitary.iter().map(|u| u.algebraic_multiplicity).sum();
        prop_assert_eq!(rank(&total, 1e-8).unwrap(), multiplicity);
    }

    #[test]
    fn stochastic_rows_and_fixed_constants(mu in group_from(families(24)).prop_flat_map(dyadic_probability_on)) {
        let m = regular_matrix(&mu);
        for row in m.matrix().row_iter() {
            prop_assert_eq!(row.iter().sum::<Complex64>(), ONE);
        }
        let p = ergodic_projection(&mu, ONE).unwrap().projection;
        for row in p.row_iter() {
            prop_assert!((row.iter().sum::<Complex64>() - ONE).norm() <= 1e-10);
        }
    }

    #[test]
    fn dual_identities_on_small_abelian_groups(
        mu in group_from(abelian_families(8).into_iter().filter(|g| [6, 8].contains(&g.order())).collect())
            .prop_flat_map(probability_on)
    ) {
        let t = dual_table(&mu, 1e-9).unwrap();
        let id = t.check_identities(&mu).unwrap();
        prop_assert!(id.f_matches && id.e_matches, "{:?}", id);
        let sq = fourier_transform(&mu.convolve(&mu).unwrap()).unwrap();
        for (a, b) in sq.iter().zip(&t.transform) {
            prop_assert!((a - b * b).norm() <= 1e-12);
        }
    }

    #[test]
    fn weight_limits_are_bounded_and_sparse(w in builtin_weight()) {
        let samples = default_samples();
        let mut nonzero = 0;
        for &xi in &samples {
            let a = weight_limit(&w, xi).unwrap().value;
            prop_assert!(a.norm() <= w.bound() * (1.0 + 1e-12) + 1e-15);
            nonzero += usize::from(a.norm() > 1e-12);
        }
        prop_assert!(nonzero <= spectrum_of_weight(&w).len());
    }

    #[test]
    fn closed_forms_match_numerical_cesaro(w in builtin_weight()) {
        // |(1/n) Σ e^{2πi f i}| ≤ 1/(n·sin(π·dist(f, ℤ))), so the closed form is
        // reached within 10·sup|a|/n once every frequency is at least 1/(10π)
        // turns away from resonance; nearer frequencies get the exact bound.
        let n = 1u64 << 16;
        for &xi in &default_samples() {
            let s = xi.arg() / (2.0 * std::f64::consts::PI);
            let exact = weight_limit(&w, xi).unwrap().value;
            let numeric = cesaro_average(&w, xi, n).unwrap();
            let resonance: f64 = spectrum_of_weight(&w)
                .iter()
                .map(|&(f, amp)| {
                    let d = frac_dist(f + s);
                    if d < 1e-9 { 0.0 } else { amp / (std::f64::consts::PI * d).sin() }
                })
                .sum();
            let allowance = (10.0 * w.bound()).max(resonance) / n as f64 + 1e-9;
            prop_assert!((exact - numeric).norm() <= allowance, "ξ = {} exact {} numeric {}", xi, exact, numeric);
        }
    }

    #[test]
    fn rotation_limit_is_linear_in_characters(
        theta in 0.0f64..1.0,
        omega in 0.0f64..1.0,
        coeffs in proptest::collection::vec((-3i64..=3, (-1.0f64..1.0, -1.0f64..1.0)), 1..4),
    ) {
        let coeffs: Vec<(i64, Complex64)> = coeffs.into_iter().map(|(k, (re, im))| (k, Complex64::new(re, im))).collect();
        let rot = WeightSequence::new(WeightKind::Rotation { theta, omega, coeffs: coeffs.clone() }).unwrap();
        for &xi in &default_samples() {
            let combined: Complex64 = coeffs
                .iter()
                .map(|&(k, c)| c * turn(k as f64 * omega) * weight_limit(&WeightSequence::character(k as f64 * theta), xi).unwrap().value)
                .sum();
            prop_assert!((weight_limit(&rot, xi).unwrap().value - combined).norm() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn limit_measure_laws(mu in any_probability(12)) {
        let report = spectrum(&mu).unwrap();
        for u in &report.unitary {
            let xi = u.value;
            let rep = limit_measure(&mu, xi, None, 1e-9).unwrap();
            let theta = rep.limit().unwrap();
            prop_assert!(theta.convolve(theta).unwrap().l1_distance(theta) <= 1e-8);
            prop_assert!(rep.diagnostics["operator_gap"] <= 1e-7);
        }
    }

    #[test]
    fn cesaro_limit_agrees_with_limit_measure(mu in any_probability(12)) {
        let tol = 1e-3;
        let traj = weighted_cesaro(&mu, &WeightSequence::constant(1.0), 4096, None).unwrap();
        prop_assert!(traj.max_norm <= 1.0 + 1e-9);
        let rep = detect_limit(&traj, tol);
        let theta = limit_measure(&mu, ONE, None, 1e-9).unwrap().limit().unwrap().clone();
        prop_assert!(rep.final_value.max_abs_diff(&theta) <= (10.0 * tol).max(10.0 / 4096.0));
        let proj = ergodic_projection(&mu, ONE).unwrap();
        prop_assert!(max_abs(&(regular_matrix(&theta).matrix() - &proj.projection)) <= 1e-7);
    }

    #[test]
    fn fourier_of_limit_is_indicator_of_f(mu in group_from(abelian_families(12)).prop_flat_map(probability_on)) {
        let theta = limit_measure(&mu, ONE, None, 1e-9).unwrap().limit().unwrap().clone();
        let f_set = dual_table(&mu, 1e-9).unwrap().f_set;
        for (k, z) in fourier_transform(&theta).unwrap().iter().enumerate() {
            let want = if f_set.contains(&k) { ONE } else { Complex64::new(0.0, 0.0) };
            prop_assert!((z - want).norm() <= 1e-8);
        }
    }

    #[test]
    fn weighted_limit_is_mean_times_haar(mu in any_probability(12), w in grid_weight()) {
        let class = classify(&mu, 1e-9).unwrap();
        prop_assume!(class.strictly_aperiodic);
        let v = weighted_mean_check(&mu, &w, 2048, 1e-9).unwrap();
        prop_assert!(v.pass, "{:?}", v);
        let a = Complex64::new(v.metrics["mean_weight_re"], v.metrics["mean_weight_im"]);
        let target = FiniteMeasure::haar(mu.group()).scale(a);
        let obs = v.observation.unwrap();
        for (x, t) in obs.empirical.iter().zip(target.coeffs()) {
            prop_assert!((x - t).norm() <= v.metrics["allowance"]);
        }
    }
}
