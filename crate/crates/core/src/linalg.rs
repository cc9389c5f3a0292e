//! Complex dense linear algebra helpers used throughout the crate.
//!
//! Everything is built on Hermitian eigendecomposition and SVD from LAPACK.
//! Empty matrices (zero rows or columns) are handled explicitly so that
//! zero-dimensional spaces flow through the higher-level constructions.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, SVD, UPLO};

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::eye(n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros((rows, cols))
}

/// Conjugate transpose.
pub fn adj(m: &CMat) -> CMat {
    let mut out = CMat::zeros((m.ncols(), m.nrows()));
    for ((i, j), v) in m.indexed_iter() {
        out[(j, i)] = v.conj();
    }
    out
}

pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator 2-norm (largest singular value). Zero for empty matrices.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let (_, s, _) = standard_copy(m).svd(false, false).expect("svd failed");
    s.iter().cloned().fold(0.0, f64::max)
}

/// Fresh C-order copy. The LAPACK wrappers reject the degenerate strides
/// that `dot` and slicing can produce (including zero strides on length-one
/// axes, which `as_standard_layout` leaves alone).
fn standard_copy(m: &CMat) -> CMat {
    let mut out = CMat::zeros((m.nrows(), m.ncols()));
    out.assign(m);
    out
}

pub fn hermitian_part(m: &CMat) -> CMat {
    let a = adj(m);
    m.mapv(|v| v * 0.5) + a.mapv(|v| v * 0.5)
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors as columns of the returned matrix.
pub fn eigh_ascending(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let (vals, vecs) = hermitian_part(m).eigh(UPLO::Lower)?;
    // the backend hands back the conjugated eigenvector matrix for
    // row-major complex input; undo that so columns are eigenvectors
    Ok((vals.to_vec(), vecs.mapv(|v| v.conj())))
}

/// Largest eigenvalue of a Hermitian matrix. Zero-dimensional input gives 0.
pub fn lambda_max_hermitian(m: &CMat) -> Result<f64> {
    let (vals, _) = eigh_ascending(m)?;
    Ok(vals.last().copied().unwrap_or(0.0))
}

/// PSD square root together with its rank-revealed factorization.
#[derive(Debug, Clone)]
pub struct PsdRoot {
    /// The PSD square root of the input.
    pub sqrt: CMat,
    /// Numerical rank of the input (eigenvalues above `rank_tol`).
    pub rank: usize,
    /// Isometric factor: orthonormal columns spanning the range of `sqrt`.
    pub factor: CMat,
    /// Singular values of `sqrt` on the retained columns: `sqrt * factor = factor * diag(sigma)`.
    pub sigma: Vec<f64>,
}

/// PSD square root of a Hermitian matrix by eigendecomposition.
///
/// Eigenvalues in `[-neg_tol, 0)` are clipped to zero; an eigenvalue below
/// `-neg_tol` is an error, not a clip. Rank is decided by the absolute cutoff
/// `rank_tol` on the eigenvalues of the input, which is appropriate for the
/// defect-type matrices used here (spectrum contained in `[0, 1]`).
pub fn psd_sqrt_factor(m: &CMat, neg_tol: f64, rank_tol: f64) -> Result<PsdRoot> {
    let n = m.nrows();
    let (vals, vecs) = eigh_ascending(m)?;
    if let Some(&lo) = vals.first() {
        if lo < -neg_tol {
            return Err(Error::NotPsd {
                value: lo,
                tol: neg_tol,
            });
        }
    }
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let mut scaled = vecs.clone();
    for (k, &lam) in clipped.iter().enumerate() {
        let s = lam.sqrt();
        scaled.column_mut(k).mapv_inplace(|v| v * s);
    }
    let sqrt = scaled.dot(&adj(&vecs));
    let kept: Vec<usize> = (0..n).filter(|&k| clipped[k] > rank_tol).collect();
    let rank = kept.len();
    let mut factor = zeros(n, rank);
    let mut sigma = Vec::with_capacity(rank);
    for (out, &k) in kept.iter().enumerate() {
        factor.column_mut(out).assign(&vecs.column(k));
        sigma.push(clipped[k].sqrt());
    }
    Ok(PsdRoot {
        sqrt,
        rank,
        factor,
        sigma,
    })
}

/// Full SVD: `(u, s, vh)` with unitary `u`, `vh` and descending `s`.
pub fn svd_full(m: &CMat) -> Result<(CMat, Vec<f64>, CMat)> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows == 0 || cols == 0 {
        return Ok((eye(rows), Vec::new(), eye(cols)));
    }
    let (u, s, vh) = standard_copy(m).svd(true, true)?;
    Ok((u.unwrap(), s.to_vec(), vh.unwrap()))
}

/// Orthonormal basis (columns) of the column space.
///
/// Rank cutoff is `rel_tol * max(sigma_max, 1)`: relative for matrices of
/// scale above one, absolute below it. Everything fed through here is built
/// from contractions and unit vectors (scale at most one), so a numerically
/// zero matrix must have rank zero rather than promoting its rounding noise.
pub fn orthonormal_range(m: &CMat, rel_tol: f64) -> Result<CMat> {
    let (u, s, _) = svd_full(m)?;
    let cutoff = rel_tol * s.first().copied().unwrap_or(0.0).max(1.0);
    let rank = s.iter().filter(|&&x| x > cutoff).count();
    Ok(u.slice(s![.., ..rank]).to_owned())
}

/// Orthonormal basis (columns) of the right null space; same cutoff
/// convention as [`orthonormal_range`].
pub fn nullspace(m: &CMat, rel_tol: f64) -> Result<CMat> {
    Ok(nullspace_with_gaps(m, rel_tol)?.0)
}

/// Null space together with the singular values within a factor of ten of
/// the rank cutoff. Borderline values land in the null side (the larger
/// subspace) and are surfaced so that near-threshold rank decisions stay
/// auditable.
pub fn nullspace_with_gaps(m: &CMat, rel_tol: f64) -> Result<(CMat, Vec<f64>)> {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return Ok((eye(cols), Vec::new()));
    }
    let (_, s, vh) = svd_full(m)?;
    let cutoff = rel_tol * s.first().copied().unwrap_or(0.0).max(1.0);
    let rank = s.iter().filter(|&&x| x > cutoff).count();
    let borderline = s
        .iter()
        .copied()
        .filter(|&x| x > cutoff / 10.0 && x < cutoff * 10.0)
        .collect();
    let v = adj(&vh);
    Ok((v.slice(s![.., rank..]).to_owned(), borderline))
}

/// Closest unitary in Frobenius norm (polar factor via SVD).
pub fn closest_unitary(m: &CMat) -> Result<CMat> {
    let (u, _, vh) = svd_full(m)?;
    Ok(u.dot(&vh))
}

pub fn hstack(mats: &[&CMat]) -> CMat {
    if mats.is_empty() {
        return zeros(0, 0);
    }
    let rows = mats[0].nrows();
    let cols: usize = mats.iter().map(|m| m.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut off = 0;
    for m in mats {
        out.slice_mut(s![.., off..off + m.ncols()]).assign(m);
        off += m.ncols();
    }
    out
}

pub fn vstack(mats: &[&CMat]) -> CMat {
    if mats.is_empty() {
        return zeros(0, 0);
    }
    let cols = mats[0].ncols();
    let rows: usize = mats.iter().map(|m| m.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut off = 0;
    for m in mats {
        out.slice_mut(s![off..off + m.nrows(), ..]).assign(m);
        off += m.nrows();
    }
    out
}

pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.slice_mut(s![..a.nrows(), ..a.ncols()]).assign(a);
    out.slice_mut(s![a.nrows().., a.ncols()..]).assign(b);
    out
}

/// Assemble `[[a, b], [c, d]]`.
pub fn block_2x2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let (p, q) = (a.nrows(), d.nrows());
    let (pc, qc) = (a.ncols(), d.ncols());
    let mut out = zeros(p + q, pc + qc);
    out.slice_mut(s![..p, ..pc]).assign(a);
    out.slice_mut(s![..p, pc..]).assign(b);
    out.slice_mut(s![p.., ..pc]).assign(c);
    out.slice_mut(s![p.., pc..]).assign(d);
    out
}
