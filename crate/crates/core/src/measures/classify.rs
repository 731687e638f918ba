use serde::Serialize;

use super::{FiniteMeasure, IntMeasure, Measure};
use crate::error::{Error, Result};
use crate::groups::{
    all_subgroups, difference_subgroup, find_witness, generated_subgroup, z_coset_witness,
    z_difference_subgroup, z_subgroup, Subgroup, ZSubgroup, SUBGROUP_ENUMERATION_CAP,
};
use crate::spectral::power_boundedness;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratedGroup {
    Finite(Subgroup),
    Integer(ZSubgroup),
}

impl GeneratedGroup {
    pub fn is_whole(&self) -> bool {
        match self {
            GeneratedGroup::Finite(h) => h.is_whole(),
            GeneratedGroup::Integer(z) => z.is_whole(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerBoundCertificate {
    /// `‖μ^n‖₁ = 1` for every `n`.
    TvNormOne,
    /// `‖μ^n‖₁ ≤ ‖μ‖₁^n ≤ 1`.
    Contraction,
    Spectral { spectral_radius: f64 },
    Unbounded { reason: String },
}

/// The support-based and algebraic predicates of a measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureClass {
    pub probability: bool,
    pub adapted: bool,
    pub strictly_aperiodic: bool,
    pub idempotent: bool,
    pub power_bounded: bool,
    pub power_bound_certificate: PowerBoundCertificate,
    /// Element indices on a finite group, offsets on ℤ.
    pub support: Vec<i64>,
    pub generated: GeneratedGroup,
    pub difference_generated: GeneratedGroup,
    /// Human-readable coset `g·H ⊇ supp μ` with `H` proper, when one exists.
    pub coset_witness: Option<String>,
    /// Whether the brute-force coset search ran and agreed with the fast test.
    pub oracle_checked: bool,
}

/// Classifies a measure on a finite group. Strict aperiodicity is decided by
/// the difference-subgroup criterion and, for orders within the enumeration
/// cap, confirmed against an exhaustive coset search.
pub fn classify(mu: &FiniteMeasure, tol: f64) -> Result<MeasureClass> {
    let subgroups = if mu.group().order() <= SUBGROUP_ENUMERATION_CAP {
        Some(all_subgroups(mu.group())?)
    } else {
        None
    };
    classify_with(mu, tol, subgroups.as_deref())
}

/// [`classify`] with a precomputed subgroup list (for exhaustive sweeps).
pub fn classify_with(mu: &FiniteMeasure, tol: f64, subgroups: Option<&[Subgroup]>) -> Result<MeasureClass> {
    let group = mu.group();
    let support = mu.support(tol);
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let generated = generated_subgroup(group, &support)?;
    let differences = difference_subgroup(group, &support)?;
    let strictly_aperiodic = differences.is_whole();

    let (coset_witness, oracle_checked) = match subgroups {
        Some(list) => {
            let witness = find_witness(group, &support, list);
            if witness.is_none() != strictly_aperiodic {
                return Err(Error::OracleDisagreement(format!(
                    "support {support:?} on {}: difference subgroup of order {} but coset witness {:?}",
                    group.label(),
                    differences.order(),
                    witness
                )));
            }
            let text = witness.map(|w| {
                format!(
                    "{}·{:?} = {:?}",
                    w.representative,
                    w.subgroup.elements(),
                    w.coset(group)
                )
            });
            (text, true)
        }
        None => (None, false),
    };

    let probability = mu.is_probability(tol);
    let idempotent = mu.convolve(mu)?.l1_distance(mu) <= tol;
    let (power_bounded, power_bound_certificate) = if probability {
        (true, PowerBoundCertificate::TvNormOne)
    } else if mu.tv_norm() <= 1.0 + tol {
        (true, PowerBoundCertificate::Contraction)
    } else {
        let pb = power_boundedness(mu)?;
        let cert = if pb.bounded {
            PowerBoundCertificate::Spectral {
                spectral_radius: pb.spectral_radius,
            }
        } else {
            PowerBoundCertificate::Unbounded {
                reason: pb.certificate.clone(),
            }
        };
        (pb.bounded, cert)
    };

    let class = MeasureClass {
        probability,
        adapted: generated.is_whole(),
        strictly_aperiodic,
        idempotent,
        power_bounded,
        power_bound_certificate,
        support: support.iter().map(|&g| g as i64).collect(),
        generated: GeneratedGroup::Finite(generated),
        difference_generated: GeneratedGroup::Finite(differences),
        coset_witness,
        oracle_checked,
    };
    assert!(
        !class.strictly_aperiodic || class.adapted,
        "strict aperiodicity must imply adaptedness"
    );
    Ok(class)
}

/// Classifies a finitely supported measure on ℤ: `[S] = dℤ` with `d` the gcd
/// of the support, and the brute-force oracle searches residue classes.
pub fn classify_int(mu: &IntMeasure, tol: f64) -> Result<MeasureClass> {
    let support = mu.support(tol);
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let generated = z_subgroup(&support)?;
    let differences = z_difference_subgroup(&support)?;
    let strictly_aperiodic = differences.is_whole();
    let witness = z_coset_witness(&support)?;
    if witness.is_none() != strictly_aperiodic {
        return Err(Error::OracleDisagreement(format!(
            "support {support:?}: difference gcd {} but residue witness {witness:?}",
            differences.d
        )));
    }
    let probability = mu.is_probability(tol);
    let tv = mu.tv_norm();
    let (power_bounded, power_bound_certificate) = if probability {
        (true, PowerBoundCertificate::TvNormOne)
    } else if tv <= 1.0 + tol {
        (true, PowerBoundCertificate::Contraction)
    } else {
        // On ℤ the Fourier transform is a trigonometric polynomial; its sup
        // is not computed here, so only contractions are certified.
        (
            false,
            PowerBoundCertificate::Unbounded {
                reason: format!("total variation {tv} > 1 is not certified on ℤ"),
            },
        )
    };
    let class = MeasureClass {
        probability,
        adapted: generated.is_whole(),
        strictly_aperiodic,
        idempotent: mu.convolve(mu)?.l1_distance_to(mu) <= tol,
        power_bounded,
        power_bound_certificate,
        support,
        generated: GeneratedGroup::Integer(generated),
        difference_generated: GeneratedGroup::Integer(differences),
        coset_witness: witness.map(|(g, m)| format!("{g} + {m}ℤ")),
        oracle_checked: true,
    };
    assert!(
        !class.strictly_aperiodic || class.adapted,
        "strict aperiodicity must imply adaptedness"
    );
    Ok(class)
}

impl IntMeasure {
    pub fn l1_distance_to(&self, other: &IntMeasure) -> f64 {
        let mut diff = self.clone();
        // Cannot overflow: the union of two capped ranges is checked inside.
        match diff.add_scaled(other, num_complex::Complex64::new(-1.0, 0.0)) {
            Ok(()) => diff.tv_norm(),
            Err(_) => f64::INFINITY,
        }
    }
}
