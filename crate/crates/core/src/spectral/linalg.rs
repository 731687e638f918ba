//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const SVD_EPS: f64 = 1e-15;
const MAX_ITER: usize = 10_000;

fn svd(a: &CMatrix, want_v: bool) -> Result<SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>> {
    // nalgebra returns min(m, n) right singular vectors; pad short matrices
    // with zero rows so the full right space is available.
    let a = if a.nrows() < a.ncols() {
        let mut padded = CMatrix::zeros(a.ncols(), a.ncols());
        padded.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
        padded
    } else {
        a.clone()
    };
    SVD::try_new(a, false, want_v, SVD_EPS, MAX_ITER)
        .ok_or_else(|| Error::EigensolverFailure("SVD did not converge".into()))
}

/// Orthonormal basis (as columns) of the null space of `a`. Singular values
/// at most `rel_tol · max(1, σ_max)` count as zero.
pub fn null_space(a: &CMatrix, rel_tol: f64) -> Result<CMatrix> {
    let n = a.ncols();
    let dec = svd(a, true)?;
    let v_t = dec
        .v_t
        .as_ref()
        .ok_or_else(|| Error::EigensolverFailure("SVD returned no right vectors".into()))?;
    let sigma_max = dec.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_tol * sigma_max.max(1.0);
    let cols: Vec<_> = dec
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        return Ok(CMatrix::zeros(n, 0));
    }
    Ok(CMatrix::from_columns(&cols))
}

pub fn rank(a: &CMatrix, rel_tol: f64) -> Result<usize> {
    let dec = svd(a, false)?;
    let sigma_max = dec.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_tol * sigma_max.max(1.0);
    Ok(dec.singular_values.iter().filter(|&&s| s > cutoff).count())
}

pub fn spectral_norm(a: &CMatrix) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let dec = svd(a, false)?;
    Ok(dec.singular_values.iter().cloned().fold(0.0, f64::max))
}

/// All eigenvalues of a square matrix from its complex Schur form.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    // Highly symmetric circulants can stall the shifted QR iteration; a
    // different deflation threshold or a complex diagonal shift breaks the
    // cycle without changing the eigenvalues beyond rounding.
    let attempts = [
        (1e-15, Complex64::new(0.0, 0.0)),
        (f64::EPSILON, Complex64::new(0.0, 0.0)),
        (f64::EPSILON, Complex64::new(0.1234, 0.0567)),
        (f64::EPSILON, Complex64::new(-0.0731, 0.2113)),
    ];
    for (eps, c) in attempts {
        let mut shifted = a.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += c;
        }
        if let Some(schur) = Schur::try_new(shifted, eps, MAX_ITER) {
            let (_, t) = schur.unpack();
            return Ok(t.diagonal().iter().map(|z| z - c).collect());
        }
    }
    Err(Error::EigensolverFailure("Schur iteration did not converge".into()))
}

/// Sine of the largest principal angle between the column spans of two
/// orthonormal bases, or `+∞` when the dimensions differ.
pub fn subspace_gap(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.ncols() != b.ncols() {
        return Ok(f64::INFINITY);
    }
    if a.ncols() == 0 {
        return Ok(0.0);
    }
    let residual = b - a * (a.adjoint() * b);
    spectral_norm(&residual)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Bottleneck-optimal matching distance between two equally sized multisets
/// of complex numbers: the smallest `t` such that a bijection moves every
/// point by at most `t`. Exact dynamic programme over subsets, so limited to
/// 20 points.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Ok(f64::INFINITY);
    }
    let n = a.len();
    if n > 20 {
        return Err(Error::SizeLimit {
            what: "multiset matching",
            size: n,
            cap: 20,
        });
    }
    // best[mask] = minimal bottleneck assigning a[0..popcount(mask)] to the
    // b-indices in mask.
    let mut best = vec![f64::INFINITY; 1 << n];
    best[0] = 0.0;
    for mask in 0usize..(1 << n) {
        let cur = best[mask];
        if cur.is_infinite() {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for j in (0..n).filter(|j| mask & (1 << j) == 0) {
            let next = mask | (1 << j);
            let cost = cur.max((a[i] - b[j]).norm());
            if cost < best[next] {
                best[next] = cost;
            }
        }
    }
    Ok(best[(1 << n) - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn stalled_circulant_still_has_eigenvalues() {
        let n = 8;
        let m = CMatrix::from_fn(n, n, |g, s| if matches!((g + n - s) % n, 2 | 6) { c(0.5, 0.0) } else { c(0.0, 0.0) });
        let want: Vec<Complex64> = (0..n).map(|k| c((std::f64::consts::PI * k as f64 / 2.0).cos(), 0.0)).collect();
        assert!(multiset_distance(&eigenvalues(&m).unwrap(), &want).unwrap() < 1e-12);
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(1., 0.), c(1., 0.)]);
        let k = null_space(&a, 1e-10).unwrap();
        assert_eq!(k.ncols(), 1);
        assert!(max_abs(&(&a * &k)) < 1e-14);
        assert_eq!(rank(&a, 1e-10).unwrap(), 1);
    }

    #[test]
    fn wide_matrix_null_space() {
        let a = CMatrix::from_row_slice(1, 3, &[c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert_eq!(null_space(&a, 1e-10).unwrap().ncols(), 2);
    }

    #[test]
    fn eigenvalues_of_rotation() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(-1., 0.), c(1., 0.), c(0., 0.)]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((ev[0] - c(0., -1.)).norm() < 1e-12);
        assert!((ev[1] - c(0., 1.)).norm() < 1e-12);
    }

    #[test]
    fn matching_is_permutation_invariant() {
        let a = [c(1., 0.), c(-1., 0.), c(0., 1.)];
        let b = [c(0., 1.), c(1., 0.), c(-1., 1e-9)];
        assert!(multiset_distance(&a, &b).unwrap() <= 1e-9 + 1e-15);
        assert!(multiset_distance(&a, &b[..2]).unwrap().is_infinite());
    }

    #[test]
    fn gap_detects_rotation() {
        let e1 = CMatrix::from_column_slice(2, 1, &[c(1., 0.), c(0., 0.)]);
        let theta: f64 = 1e-3;
        let v = CMatrix::from_column_slice(2, 1, &[c(theta.cos(), 0.), c(theta.sin(), 0.)]);
        assert!((subspace_gap(&e1, &v).unwrap() - theta.sin()).abs() < 1e-12);
    }
}
