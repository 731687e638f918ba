//! The convolution operator `f ↦ μ∗f` as an explicit matrix: spectrum,
//! unitary eigenspaces, mean ergodic projections, power-boundedness and the
//! Katznelson–Tzafriri criterion, plus Fourier duality on abelian groups.
//!
//! Convention: with `(μ∗f)(g) = Σ_h μ(h) f(h⁻¹g)`, the Cesàro limit of
//! `(1/n) Σ (ξ λ(μ))^i` is the spectral projection at eigenvalue `ξ̄`, and a
//! character `χ` is an eigenvector with eigenvalue `μ̂(χ̄)`.

mod dual;
pub mod linalg;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::measures::{FiniteMeasure, GroupFunction, Measure, SUPPORT_TOL};
use linalg::{eigenvalues, max_abs, null_space, rank, subspace_gap, CMatrix};

pub use dual::{annihilator, character_value, dual_table, fourier_transform, DualIdentities, DualTable};

/// Largest order handled by the dense eigensolver.
pub const DEFAULT_EIGEN_CAP: usize = 1024;
/// Base tolerance for calling an eigenvalue unitary.
pub const TOL_UNIT: f64 = 1e-8;
/// Eigenvalues closer than this are one cluster (defective blocks split by
/// roughly the square root of machine precision).
pub const CLUSTER_TOL: f64 = 1e-6;
/// Relative singular-value cutoff for kernels and ranks.
pub const RANK_TOL: f64 = 1e-8;
/// Algebraic and iterative projections must agree to this.
pub const PROJECTION_AGREEMENT: f64 = 1e-7;
/// Stagnation threshold for block Cesàro averages.
pub const CESARO_TOL: f64 = 1e-11;
/// Doublings allowed after the first block; bounds `n` (and rounding) at
/// `B·2^24`.
pub const MAX_DOUBLINGS: u32 = 24;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Matrix of `f ↦ μ∗f`: `M[g, s] = μ(g s⁻¹)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularMatrix {
    group: Arc<FiniteGroup>,
    matrix: CMatrix,
}

impl RegularMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn apply(&self, f: &GroupFunction) -> Result<GroupFunction> {
        if f.group().as_ref() != self.group.as_ref() {
            return Err(Error::GroupMismatch);
        }
        let v = nalgebra::DVector::from_column_slice(f.values());
        let out = &self.matrix * v;
        GroupFunction::new(&self.group, out.iter().copied().collect())
    }
}

pub fn regular_matrix(mu: &FiniteMeasure) -> RegularMatrix {
    let group = mu.group();
    let n = group.order();
    let matrix = DMatrix::from_fn(n, n, |g, s| mu.get(group.mul(g, group.inv(s))));
    RegularMatrix {
        group: Arc::clone(group),
        matrix,
    }
}

/// Reads a measure back from an operator in the image of `λ`: since
/// `λ(θ) δ_e = θ`, the column at the identity is `θ`.
pub fn measure_from_operator(group: &Arc<FiniteGroup>, op: &CMatrix) -> Result<FiniteMeasure> {
    FiniteMeasure::from_weights(group, op.column(group.identity()).iter().copied().collect())
}

/// A cluster of (numerically) unitary eigenvalues.
#[derive(Debug, Clone, Serialize)]
pub struct UnitaryEigenvalue {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
    pub semisimple: bool,
    #[serde(skip)]
    pub eigenspace: CMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    /// All eigenvalues with multiplicity, sorted by `(re, im)`.
    #[serde(serialize_with = "ser_complex_vec")]
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    pub tol_unit: f64,
    pub unitary: Vec<UnitaryEigenvalue>,
}

impl SpectralReport {
    pub fn unitary_values(&self) -> Vec<Complex64> {
        self.unitary.iter().map(|u| u.value).collect()
    }

    /// The cluster containing `z`, if any.
    pub fn find_unitary(&self, z: Complex64) -> Option<&UnitaryEigenvalue> {
        self.unitary.iter().find(|u| (u.value - z).norm() <= CLUSTER_TOL)
    }

    /// `σ ∩ 𝕋 ⊆ {1}`.
    pub fn unitary_subset_of_one(&self) -> bool {
        self.unitary.iter().all(|u| (u.value - ONE).norm() <= CLUSTER_TOL)
    }
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub(crate) fn ser_complex_vec<S: serde::Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

pub fn spectrum(mu: &FiniteMeasure) -> Result<SpectralReport> {
    spectrum_of(&regular_matrix(mu).matrix, DEFAULT_EIGEN_CAP)
}

pub fn spectrum_of(m: &CMatrix, cap: usize) -> Result<SpectralReport> {
    let n = m.nrows();
    if n > cap {
        return Err(Error::SizeLimit {
            what: "dense eigensolver",
            size: n,
            cap,
        });
    }
    let mut eig = eigenvalues(m)?;
    if eig.len() != n || eig.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigensolverFailure(format!(
            "expected {n} finite eigenvalues, got {}",
            eig.len()
        )));
    }
    sort_complex(&mut eig);
    let norm1 = (0..n)
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let tol_unit = TOL_UNIT.max(n as f64 * f64::EPSILON * norm1);
    let spectral_radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);

    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for &z in eig.iter().filter(|z| z.norm() >= 1.0 - tol_unit) {
        match clusters
            .iter_mut()
            .find(|c| (mean(c) - z).norm() <= CLUSTER_TOL)
        {
            Some(c) => c.push(z),
            None => clusters.push(vec![z]),
        }
    }
    let mut unitary = Vec::with_capacity(clusters.len());
    for c in clusters {
        let mut value = mean(&c);
        if (value.norm() - 1.0).abs() <= CLUSTER_TOL {
            value /= value.norm();
        }
        let shifted = shift(m, value);
        let eigenspace = null_space(&shifted, RANK_TOL)?;
        let r1 = n - eigenspace.ncols();
        let r2 = rank(&(&shifted * &shifted), RANK_TOL)?;
        unitary.push(UnitaryEigenvalue {
            value,
            algebraic_multiplicity: c.len(),
            geometric_multiplicity: eigenspace.ncols(),
            semisimple: r1 == r2 && eigenspace.ncols() == c.len(),
            eigenspace,
        });
    }
    unitary.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(SpectralReport {
        eigenvalues: eig,
        spectral_radius,
        tol_unit,
        unitary,
    })
}

fn mean(v: &[Complex64]) -> Complex64 {
    v.iter().sum::<Complex64>() / v.len() as f64
}

fn shift(m: &CMatrix, z: Complex64) -> CMatrix {
    let mut a = m.clone();
    for i in 0..a.nrows() {
        a[(i, i)] -= z;
    }
    a
}

/// Compares the kernel of `λ(μ) − ξI` with the solutions of the translation
/// equations `f(g⁻¹s) = ξ f(s)` for all `g ∈ supp μ`.
#[derive(Debug, Clone, Serialize)]
pub struct EigenspaceComparison {
    pub kernel_dim: usize,
    pub translation_dim: usize,
    pub gap: f64,
    pub agree: bool,
}

pub fn unitary_eigenspace_check(mu: &FiniteMeasure, xi: Complex64) -> Result<EigenspaceComparison> {
    if (xi.norm() - 1.0).abs() > CLUSTER_TOL {
        return Err(Error::InvalidArgument(format!("|ξ| = {} is not 1", xi.norm())));
    }
    let group = mu.group();
    let n = group.order();
    let m = regular_matrix(mu);
    let kernel = null_space(&shift(&m.matrix, xi), RANK_TOL)?;

    let support = mu.support(SUPPORT_TOL);
    let mut stacked = CMatrix::zeros(n * support.len(), n);
    for (block, &g) in support.iter().enumerate() {
        let ginv = group.inv(g);
        for s in 0..n {
            let row = block * n + s;
            stacked[(row, group.mul(ginv, s))] += ONE;
            stacked[(row, s)] -= xi;
        }
    }
    let translations = null_space(&stacked, RANK_TOL)?;
    let gap = subspace_gap(&kernel, &translations)?;
    Ok(EigenspaceComparison {
        kernel_dim: kernel.ncols(),
        translation_dim: translations.ncols(),
        gap,
        agree: gap < 1e-7,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerBoundedness {
    pub bounded: bool,
    pub spectral_radius: f64,
    pub radius_ok: bool,
    /// Unitary eigenvalues whose Jordan blocks are nontrivial.
    #[serde(serialize_with = "ser_complex_vec")]
    pub defective: Vec<Complex64>,
    /// `max_{n ≤ 64} ‖μ^n‖₁`, a sanity trace for the spectral verdict.
    pub empirical_sup: f64,
    pub certificate: String,
}

const RADIUS_TOL: f64 = 1e-6;
const EMPIRICAL_HORIZON: u64 = 64;

/// Finite-dimensional criterion: `sup ‖μ^n‖₁ < ∞` iff the spectral radius is
/// at most one and every unitary eigenvalue is semisimple.
pub fn power_boundedness(mu: &FiniteMeasure) -> Result<PowerBoundedness> {
    let mut empirical_sup: f64 = 0.0;
    let mut p = mu.unit();
    for _ in 0..EMPIRICAL_HORIZON {
        p = p.convolve(mu)?;
        empirical_sup = empirical_sup.max(p.tv_norm());
    }
    if mu.is_probability(SUPPORT_TOL) {
        return Ok(PowerBoundedness {
            bounded: true,
            spectral_radius: 1.0,
            radius_ok: true,
            defective: Vec::new(),
            empirical_sup,
            certificate: "probability measure: ‖μ^n‖₁ = 1".into(),
        });
    }
    let report = spectrum(mu)?;
    let radius_ok = report.spectral_radius <= 1.0 + RADIUS_TOL;
    let defective: Vec<Complex64> = report
        .unitary
        .iter()
        .filter(|u| !u.semisimple)
        .map(|u| u.value)
        .collect();
    let bounded = radius_ok && defective.is_empty();
    let certificate = if !radius_ok {
        format!("spectral radius {} > 1", report.spectral_radius)
    } else if !defective.is_empty() {
        format!("non-semisimple unitary eigenvalues {defective:?}")
    } else {
        format!(
            "spectral radius {} ≤ 1 with semisimple unitary eigenvalues",
            report.spectral_radius
        )
    };
    Ok(PowerBoundedness {
        bounded,
        spectral_radius: report.spectral_radius,
        radius_ok,
        defective,
        empirical_sup,
        certificate,
    })
}

fn require_power_bounded(mu: &FiniteMeasure) -> Result<()> {
    if mu.tv_norm() <= 1.0 + SUPPORT_TOL {
        return Ok(());
    }
    let pb = power_boundedness(mu)?;
    if pb.bounded {
        Ok(())
    } else {
        Err(Error::NotPowerBounded(pb.certificate))
    }
}

/// Spectral projection at `ξ̄` computed two ways.
#[derive(Debug, Clone)]
pub struct EigenprojData {
    pub xi: Complex64,
    /// Eigenvalue of `λ(μ)` whose eigenspace is the range: `ξ̄`.
    pub eigenvalue: Complex64,
    /// Projection onto `ker(λ(μ) − ξ̄I)` along `range(λ(μ) − ξ̄I)`.
    pub projection: CMatrix,
    /// Block Cesàro limit of `(ξλ(μ))^i` obtained by doubling.
    pub cesaro: CMatrix,
    pub cesaro_n: u64,
    pub cesaro_residual: f64,
    pub agreement: f64,
    pub rank: usize,
}

/// Mean ergodic projection of `ξλ(μ)`. The algebraic projection is built
/// from left and right kernels; the independent route is
/// [`cesaro_by_doubling`], which never touches an eigendecomposition.
pub fn ergodic_projection(mu: &FiniteMeasure, xi: Complex64) -> Result<EigenprojData> {
    require_power_bounded(mu)?;
    let m = regular_matrix(mu).matrix;
    let report = spectrum_of(&m, DEFAULT_EIGEN_CAP)?;
    let target = xi.conj();
    let projection = algebraic_projection(&m, &report, target)?;
    let t = m.map(|z| z * xi);
    let (cesaro, cesaro_n, cesaro_residual) =
        cesaro_by_doubling(&t, mu.group().order() as u64, CESARO_TOL, MAX_DOUBLINGS)?;
    let agreement = max_abs(&(&projection - &cesaro));
    if agreement > PROJECTION_AGREEMENT {
        return Err(Error::OracleDisagreement(format!(
            "algebraic and Cesàro projections at ξ = {xi} differ by {agreement:.3e}"
        )));
    }
    let rank = report.find_unitary(target).map_or(0, |u| u.geometric_multiplicity);
    Ok(EigenprojData {
        xi,
        eigenvalue: target,
        projection,
        cesaro,
        cesaro_n,
        cesaro_residual,
        agreement,
        rank,
    })
}

fn algebraic_projection(m: &CMatrix, report: &SpectralReport, z: Complex64) -> Result<CMatrix> {
    let n = m.nrows();
    let Some(cluster) = report.find_unitary(z) else {
        return Ok(CMatrix::zeros(n, n));
    };
    if !cluster.semisimple {
        return Err(Error::NotPowerBounded(format!(
            "eigenvalue {} is not semisimple",
            cluster.value
        )));
    }
    let shifted = shift(m, cluster.value);
    let right = &cluster.eigenspace;
    let left = null_space(&shifted.adjoint(), RANK_TOL)?;
    if left.ncols() != right.ncols() {
        return Err(Error::EigensolverFailure(format!(
            "left/right kernel dimensions {} vs {} at {}",
            left.ncols(),
            right.ncols(),
            cluster.value
        )));
    }
    let gram = left.adjoint() * right;
    let gram_inv = gram
        .try_inverse()
        .ok_or_else(|| Error::EigensolverFailure("singular biorthogonal Gram matrix".into()))?;
    Ok(right * gram_inv * left.adjoint())
}

/// Block Cesàro averages `W_n = (1/n) Σ_{i=n+1..2n} T^i` for `n = B·2^k`,
/// accumulated by doubling (`S_{2n} = S_n + T^n S_n`). With `B` a multiple of
/// the order of every unitary eigenvalue the unitary part is averaged exactly
/// and the rest decays geometrically, so the block average reaches the mean
/// ergodic projection long before rounding (which grows like `n·ε`) matters.
/// Stops once two consecutive doublings move `W_n` by at most `tol`; returns
/// the average, `n` and the last residual.
pub fn cesaro_by_doubling(t: &CMatrix, block: u64, tol: f64, max_doublings: u32) -> Result<(CMatrix, u64, f64)> {
    let block = block.max(1);
    let mut power = t.clone();
    let mut sum = t.clone();
    for _ in 1..block {
        power = &power * t;
        sum += &power;
    }
    let mut n = block;
    let mut prev = (&power * &sum).map(|z| z / n as f64);
    let mut quiet = 0;
    let mut residual = f64::INFINITY;
    for _ in 0..max_doublings {
        sum = &sum + &power * &sum;
        power = &power * &power;
        n *= 2;
        let avg = (&power * &sum).map(|z| z / n as f64);
        residual = max_abs(&(&avg - &prev));
        prev = avg;
        quiet = if residual <= tol { quiet + 1 } else { 0 };
        if quiet >= 2 {
            return Ok((prev, n, residual));
        }
    }
    Err(Error::CesaroNotConverged { residual, n })
}

#[derive(Debug, Clone, Serialize)]
pub struct KtReport {
    /// `(n, ‖μ^{n+1} − μ^n‖₁)` at geometric checkpoints up to `n_max`.
    pub d_trajectory: Vec<(u64, f64)>,
    pub spectral_predicate: bool,
    pub decayed: bool,
    pub agree: bool,
    #[serde(serialize_with = "ser_complex_vec")]
    pub unitary_eigenvalues: Vec<Complex64>,
}

impl KtReport {
    pub fn d_final(&self) -> f64 {
        self.d_trajectory.last().map_or(0.0, |p| p.1)
    }
}

/// Katznelson–Tzafriri equivalence: `‖μ^{n+1} − μ^n‖₁ → 0` iff the unitary
/// spectrum is contained in `{1}`.
pub fn kt_report(mu: &FiniteMeasure, n_max: u64, tol: f64) -> Result<KtReport> {
    require_power_bounded(mu)?;
    let report = spectrum(mu)?;
    let spectral_predicate = report.unitary_subset_of_one();
    let checkpoints = geometric_checkpoints(n_max);
    let mut d_trajectory = Vec::with_capacity(checkpoints.len());
    let mut prev = mu.clone();
    let mut next_cp = checkpoints.iter().peekable();
    for n in 1..=n_max {
        let cur = prev.convolve(mu)?;
        if next_cp.peek() == Some(&&n) {
            d_trajectory.push((n, cur.l1_distance(&prev)));
            next_cp.next();
        }
        prev = cur;
    }
    let decayed = d_trajectory.last().map_or(true, |p| p.1 <= tol);
    Ok(KtReport {
        d_trajectory,
        spectral_predicate,
        decayed,
        agree: decayed == spectral_predicate,
        unitary_eigenvalues: report.unitary_values(),
    })
}

/// `1, 2, 4, …` up to and including `n_max`.
pub fn geometric_checkpoints(n_max: u64) -> Vec<u64> {
    let mut cps: Vec<u64> = std::iter::successors(Some(1u64), |&n| n.checked_mul(2))
        .take_while(|&n| n <= n_max)
        .collect();
    if cps.last() != Some(&n_max) && n_max >= 1 {
        cps.push(n_max);
    }
    cps
}
