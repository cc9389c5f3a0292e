//! Contractive liftings of a row contraction and their classification.
//!
//! A lifting of `C` (on `H_C`) by `A` (on `H_A`) is a row contraction
//! `E = (E_1, ..., E_d)` on `H_C (+) H_A` with block-lower-triangular
//! entries
//!
//! ```text
//! E_i = | C_i  0   |
//!       | B_i  A_i |
//! ```
//!
//! The contractive `B`-blocks are exactly those of the form
//! `B* = D_C gamma D_{*,A}` for a contraction `gamma` from the star-defect
//! space of `A` into the defect space of `C`; `gamma` is stored in defect
//! coordinates (through the rank-revealed isometric factors), never in
//! ambient coordinates.

use ndarray::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{adj, block_2x2, nullspace, op_norm, zeros, CMat};
use crate::rowcon::{
    defects, star_stability, DefectData, RowContraction, StabilityReport, StarStability,
    Tolerances, WoldData,
};
use crate::Verdict;

/// A block-lower-triangular row contraction over `H_C (+) H_A`.
#[derive(Clone, Debug)]
pub struct Lifting {
    c: RowContraction,
    a: RowContraction,
    b: Vec<CMat>,
    e: RowContraction,
}

impl Lifting {
    /// Assembles and validates the lifting. The upper-right blocks are zero
    /// by construction; the assembled tuple must pass the row-contraction
    /// test at tolerance `tol`.
    pub fn new(c: RowContraction, a: RowContraction, b: Vec<CMat>, tol: f64) -> Result<Self> {
        let d = c.d();
        if a.d() != d || b.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "tuple sizes disagree: C has {d}, A has {}, B has {}",
                a.d(),
                b.len()
            )));
        }
        let (p, q) = (c.dim(), a.dim());
        for (i, bi) in b.iter().enumerate() {
            if bi.nrows() != q || bi.ncols() != p {
                return Err(Error::ShapeMismatch(format!(
                    "B_{i} is {}x{}, expected {q}x{p}",
                    bi.nrows(),
                    bi.ncols()
                )));
            }
        }
        let ops: Vec<CMat> = (0..d)
            .map(|i| block_2x2(c.op(i), &zeros(p, q), &b[i], a.op(i)))
            .collect();
        let e = RowContraction::new(ops, tol)?;
        Ok(Lifting { c, a, b, e })
    }

    pub fn c(&self) -> &RowContraction {
        &self.c
    }

    pub fn a(&self) -> &RowContraction {
        &self.a
    }

    pub fn b(&self) -> &[CMat] {
        &self.b
    }

    /// The assembled tuple on `H_C (+) H_A`.
    pub fn e(&self) -> &RowContraction {
        &self.e
    }

    pub fn dim_c(&self) -> usize {
        self.c.dim()
    }

    pub fn dim_a(&self) -> usize {
        self.a.dim()
    }

    pub fn dim(&self) -> usize {
        self.c.dim() + self.a.dim()
    }

    /// Orthogonal projection onto `H_C` inside `H_E`.
    pub fn p_c(&self) -> CMat {
        let mut out = zeros(self.dim(), self.dim());
        for k in 0..self.dim_c() {
            out[(k, k)] = crate::linalg::c(1.0, 0.0);
        }
        out
    }

    /// Embeds an `H_C` operator as `diag(x, 0)` on `H_E`.
    pub fn embed_c(&self, x: &CMat) -> CMat {
        let mut out = zeros(self.dim(), self.dim());
        out.slice_mut(s![..self.dim_c(), ..self.dim_c()]).assign(x);
        out
    }

    /// The ambient matrix of `B* : H_A -> H_C^d` (block `i` in rows
    /// `i*p..(i+1)*p`).
    pub fn b_star_ambient(&self) -> CMat {
        let p = self.dim_c();
        let q = self.dim_a();
        let mut out = zeros(self.c.d() * p, q);
        for (i, bi) in self.b.iter().enumerate() {
            out.slice_mut(s![i * p..(i + 1) * p, ..]).assign(&adj(bi));
        }
        out
    }
}

/// The contraction `gamma` of a lifting in defect coordinates, with the
/// diagnostics of its extraction.
#[derive(Clone, Debug)]
pub struct GammaData {
    /// `rank(D_C) x rank(D_{*,A})` matrix.
    pub gamma: CMat,
    pub norm: f64,
    /// Reconstruction residual `||B* - D_C gamma D_{*,A}||`.
    pub residual: f64,
    pub is_contraction: bool,
    pub is_isometry: bool,
    /// `||gamma* gamma - 1||`.
    pub isometry_defect: f64,
}

/// Builds the lifting of `C` by `A` parametrized by a contraction `gamma`
/// from the star-defect coordinates of `A` (dimension `rank_star(A)`) to the
/// defect coordinates of `C` (dimension `rank(C)`):
/// `B* = D_C . iota_C . gamma . iota_star_A* . D_{*,A}`.
pub fn lifting_from_gamma(
    c: &RowContraction,
    a: &RowContraction,
    gamma: &CMat,
    cfg: &Tolerances,
) -> Result<Lifting> {
    let cd = defects(c, cfg)?;
    let ad = defects(a, cfg)?;
    lifting_from_gamma_with(c, &cd, a, &ad, gamma, cfg)
}

/// Same as [`lifting_from_gamma`] with precomputed defect data.
pub fn lifting_from_gamma_with(
    c: &RowContraction,
    cd: &DefectData,
    a: &RowContraction,
    ad: &DefectData,
    gamma: &CMat,
    cfg: &Tolerances,
) -> Result<Lifting> {
    if gamma.nrows() != cd.rank || gamma.ncols() != ad.rank_star {
        return Err(Error::DimensionMismatch(format!(
            "gamma is {}x{}, expected rank(D_C) x rank(D_*,A) = {}x{}",
            gamma.nrows(),
            gamma.ncols(),
            cd.rank,
            ad.rank_star
        )));
    }
    let norm = op_norm(gamma);
    if norm > 1.0 + cfg.tol {
        return Err(Error::GammaNotContractive { norm });
    }
    let p = c.dim();
    // B* = iota_C diag(sigma_C) gamma (iota_star_A* D_{*,A}) : H_A -> H_C^d
    let star_coords_a = ad.star_coords(); // rank_star x q
    let mut scaled = gamma.dot(&star_coords_a); // rank x q
    for (k, &s) in cd.sigma.iter().enumerate() {
        scaled.row_mut(k).mapv_inplace(|v| v * s);
    }
    let b_star = cd.iota.dot(&scaled); // d*p x q
    let b: Vec<CMat> = (0..c.d())
        .map(|i| adj(&b_star.slice(s![i * p..(i + 1) * p, ..]).to_owned()))
        .collect();
    Lifting::new(c.clone(), a.clone(), b, cfg.tol.max(1e-10))
}

/// Recovers `gamma` in defect coordinates from a validated lifting by least
/// squares on the defect ranges, with pseudo-inverse cutoff tied to the
/// defect rank threshold. A reconstruction residual above `cfg.resid_tol`
/// means `B` is incompatible with every `gamma` and the lifting is reported
/// as malformed.
pub fn gamma_from_lifting(l: &Lifting, cfg: &Tolerances) -> Result<GammaData> {
    let cd = defects(l.c(), cfg)?;
    let ad = defects(l.a(), cfg)?;
    gamma_from_lifting_with(l, &cd, &ad, cfg)
}

/// Same as [`gamma_from_lifting`] with precomputed defect data.
pub fn gamma_from_lifting_with(
    l: &Lifting,
    cd: &DefectData,
    ad: &DefectData,
    cfg: &Tolerances,
) -> Result<GammaData> {
    let b_star = l.b_star_ambient(); // d*p x q
                                     // gamma = diag(1/sigma_C) iota_C* B* iota_star_A diag(1/sigma_star_A)
    let mut mid = adj(&cd.iota).dot(&b_star).dot(&ad.iota_star); // rank x rank_star
    for (k, &s) in cd.sigma.iter().enumerate() {
        mid.row_mut(k).mapv_inplace(|v| v / s);
    }
    for (k, &s) in ad.sigma_star.iter().enumerate() {
        mid.column_mut(k).mapv_inplace(|v| v / s);
    }
    let gamma = mid;

    // reconstruction residual
    let star_coords_a = ad.star_coords();
    let mut scaled = gamma.dot(&star_coords_a);
    for (k, &s) in cd.sigma.iter().enumerate() {
        scaled.row_mut(k).mapv_inplace(|v| v * s);
    }
    let back = cd.iota.dot(&scaled);
    let residual = op_norm(&(&back - &b_star));
    if residual > cfg.resid_tol {
        return Err(Error::MalformedLifting { residual });
    }

    let norm = op_norm(&gamma);
    let gram = adj(&gamma).dot(&gamma);
    let mut defect = gram;
    for k in 0..ad.rank_star {
        defect[(k, k)] -= crate::linalg::c(1.0, 0.0);
    }
    let isometry_defect = op_norm(&defect);
    Ok(GammaData {
        norm,
        residual,
        is_contraction: norm <= 1.0 + cfg.tol,
        is_isometry: isometry_defect <= cfg.tol,
        isometry_defect,
        gamma,
    })
}

/// Conditions for a lifting to be coisometric: `C` coisometric,
/// `sum B_i C_i* = 0`, and `sum A_i A_i* + sum B_i B_i* = 1`.
#[derive(Clone, Debug)]
pub struct CoisometricLiftingReport {
    pub is_coisometric: bool,
    pub c_coisometric: bool,
    /// `|| sum B_i C_i* ||`.
    pub cross_norm: f64,
    /// `|| sum A_i A_i* + sum B_i B_i* - 1 ||`.
    pub unital_defect: f64,
}

pub fn is_coisometric_lifting(l: &Lifting, tol: f64) -> CoisometricLiftingReport {
    let q = l.dim_a();
    let mut cross = zeros(q, l.dim_c());
    let mut gram = zeros(q, q);
    for i in 0..l.c().d() {
        cross = cross + l.b()[i].dot(&adj(l.c().op(i)));
        gram = gram + l.a().op(i).dot(&adj(l.a().op(i))) + l.b()[i].dot(&adj(&l.b()[i]));
    }
    for k in 0..q {
        gram[(k, k)] -= crate::linalg::c(1.0, 0.0);
    }
    let cross_norm = op_norm(&cross);
    let unital_defect = op_norm(&gram);
    let c_coisometric = l.c().is_coisometric(tol);
    CoisometricLiftingReport {
        is_coisometric: c_coisometric && cross_norm <= tol && unital_defect <= tol,
        c_coisometric,
        cross_norm,
        unital_defect,
    }
}

/// Evidence for the subisometry test: `A` star-stable and `gamma` isometric.
#[derive(Clone, Debug)]
pub struct SubisometricReport {
    pub verdict: Verdict,
    pub stability: StabilityReport,
    pub gamma: GammaData,
}

impl SubisometricReport {
    pub fn is_subisometric(&self) -> bool {
        self.verdict == Verdict::True
    }
}

/// A lifting is subisometric iff `A` is star-stable and the extracted
/// `gamma` is an isometry. An inconclusive stability iteration propagates
/// into an inconclusive verdict.
pub fn is_subisometric(l: &Lifting, cfg: &Tolerances) -> Result<SubisometricReport> {
    let gamma = gamma_from_lifting(l, cfg)?;
    let stability = star_stability(l.a(), cfg.tol, cfg.max_iter);
    let verdict = match stability.verdict {
        StarStability::Inconclusive => Verdict::Inconclusive,
        StarStability::NotStable => Verdict::False,
        StarStability::Stable { .. } => {
            if gamma.isometry_defect <= cfg.eig_one_tol {
                Verdict::True
            } else {
                Verdict::False
            }
        }
    };
    Ok(SubisometricReport {
        verdict,
        stability,
        gamma,
    })
}

/// Result of the resolving test for a `gamma` against a tuple `A`.
#[derive(Clone, Debug)]
pub struct ResolvingReport {
    pub is_resolving: bool,
    /// Orthonormal basis of `S*`, the largest `A*`-invariant subspace of
    /// `ker(gamma D_{*,A})`.
    pub kernel_basis: CMat,
    /// Orthonormal basis of the part of `S*` outside `H1_A` (empty iff
    /// resolving).
    pub offending_basis: CMat,
    /// Singular values within a factor of ten of the rank cutoff seen
    /// during the subspace iteration; ties go to the larger subspace, and
    /// this makes such decisions auditable.
    pub borderline: Vec<f64>,
}

/// Largest subspace of the column span of `k0` invariant under every
/// operator in `ops_adj`, by exact subspace iteration with rank decisions at
/// `rank_tol`. Stabilizes in at most `dim` steps; borderline singular values
/// are kept in the subspace (resolved toward the larger space).
fn largest_invariant_subspace(
    k0: CMat,
    ops_adj: &[CMat],
    rank_tol: f64,
    borderline: &mut Vec<f64>,
) -> Result<CMat> {
    let mut basis = k0;
    loop {
        let s = basis.ncols();
        if s == 0 {
            return Ok(basis);
        }
        let proj_compl = {
            // 1 - Q Q*
            let mut p = basis.dot(&adj(&basis)).mapv(|v| -v);
            for k in 0..p.nrows() {
                p[(k, k)] += crate::linalg::c(1.0, 0.0);
            }
            p
        };
        let mut stacked: Vec<CMat> = Vec::with_capacity(ops_adj.len());
        for op in ops_adj {
            stacked.push(proj_compl.dot(&op.dot(&basis)));
        }
        let refs: Vec<&CMat> = stacked.iter().collect();
        let constraint = crate::linalg::vstack(&refs);
        let (coeff, gaps) = crate::linalg::nullspace_with_gaps(&constraint, rank_tol)?;
        borderline.extend(gaps);
        if coeff.ncols() == s {
            return Ok(basis);
        }
        basis = basis.dot(&coeff);
    }
}

/// Resolving test: the largest `A*`-invariant subspace of
/// `ker(gamma D_{*,A})` must be contained in `H1_A`. The subspace iteration
/// is exact (no truncation parameter).
pub fn resolving_report(
    gamma: &CMat,
    a: &RowContraction,
    ad: &DefectData,
    wold: &WoldData,
    cfg: &Tolerances,
) -> Result<ResolvingReport> {
    let gd = gamma.dot(&ad.star_coords()); // rank_C x q
    let (k0, mut borderline) = crate::linalg::nullspace_with_gaps(&gd, cfg.rank_tol)?;
    let ops_adj: Vec<CMat> = a.ops().iter().map(adj).collect();
    let kernel_basis = largest_invariant_subspace(k0, &ops_adj, cfg.rank_tol, &mut borderline)?;
    // offending part: component of S* orthogonal to H1
    let h1 = &wold.h1_basis;
    let outside = if h1.ncols() == 0 {
        kernel_basis.clone()
    } else {
        let proj = h1.dot(&adj(h1));
        let mut compl = proj.mapv(|v| -v);
        for k in 0..compl.nrows() {
            compl[(k, k)] += crate::linalg::c(1.0, 0.0);
        }
        compl.dot(&kernel_basis)
    };
    let offending_basis = crate::linalg::orthonormal_range(&outside, 1e-7)?;
    Ok(ResolvingReport {
        is_resolving: offending_basis.ncols() == 0,
        kernel_basis,
        offending_basis,
        borderline,
    })
}

pub fn is_resolving(
    gamma: &CMat,
    a: &RowContraction,
    ad: &DefectData,
    wold: &WoldData,
    cfg: &Tolerances,
) -> Result<bool> {
    Ok(resolving_report(gamma, a, ad, wold, cfg)?.is_resolving)
}

#[derive(Clone, Debug)]
pub struct ReducedReport {
    pub is_reduced: bool,
    /// Dimension of `{h : gamma D_{*,A} A_alpha* h = 0 for all words}`;
    /// reduced means this space is trivial.
    pub kernel_dim: usize,
    pub gamma: GammaData,
}

/// Reduced means `A` c.n.c. and `gamma` resolving; equivalently the full
/// invariant kernel of `gamma D_{*,A}` is `{0}`, which is what is checked.
pub fn is_reduced(l: &Lifting, cfg: &Tolerances) -> Result<ReducedReport> {
    let ad = defects(l.a(), cfg)?;
    let gamma = gamma_from_lifting_with(l, &defects(l.c(), cfg)?, &ad, cfg)?;
    let gd = gamma.gamma.dot(&ad.star_coords());
    let k0 = nullspace(&gd, cfg.rank_tol)?;
    let ops_adj: Vec<CMat> = l.a().ops().iter().map(adj).collect();
    let mut borderline = Vec::new();
    let kernel = largest_invariant_subspace(k0, &ops_adj, cfg.rank_tol, &mut borderline)?;
    Ok(ReducedReport {
        is_reduced: kernel.ncols() == 0,
        kernel_dim: kernel.ncols(),
        gamma,
    })
}

/// Existence test for subisometric (and coisometric) liftings of `C` by `A`:
/// possible iff `rank(D_{*,A}) <= rank(D_C)`. The star-stability of `A` is
/// reported alongside since the subisometric reading requires it.
#[derive(Clone, Debug)]
pub struct ExistsReport {
    pub exists: bool,
    pub rank_star_a: usize,
    pub rank_c: usize,
    pub a_star_stable: Verdict,
}

pub fn exists_subisometric(
    c: &RowContraction,
    a: &RowContraction,
    cfg: &Tolerances,
) -> Result<ExistsReport> {
    let cd = defects(c, cfg)?;
    let ad = defects(a, cfg)?;
    let stab = star_stability(a, cfg.tol, cfg.max_iter);
    Ok(ExistsReport {
        exists: ad.rank_star <= cd.rank,
        rank_star_a: ad.rank_star,
        rank_c: cd.rank,
        a_star_stable: match stab.verdict {
            StarStability::Stable { .. } => Verdict::True,
            StarStability::NotStable => Verdict::False,
            StarStability::Inconclusive => Verdict::Inconclusive,
        },
    })
}

/// Range-projection comparison of two isometries into the same defect
/// space: equivalent iff `gamma gamma* = gamma' gamma'*` within `tol`.
pub fn gammas_same_range(g1: &CMat, g2: &CMat, tol: f64) -> (bool, f64) {
    if g1.nrows() != g2.nrows() {
        return (false, f64::INFINITY);
    }
    let p1 = g1.dot(&adj(g1));
    let p2 = g2.dot(&adj(g2));
    let dist = op_norm(&(&p1 - &p2));
    (dist <= tol, dist)
}

/// Convenience: the reduced-lifting invariant kernel from raw pieces, used
/// by the brute-force cross-checks in the test suites.
pub fn invariant_kernel_dim(
    gamma: &CMat,
    a: &RowContraction,
    ad: &DefectData,
    cfg: &Tolerances,
) -> Result<usize> {
    let gd = gamma.dot(&ad.star_coords());
    let k0 = nullspace(&gd, cfg.rank_tol)?;
    let ops_adj: Vec<CMat> = a.ops().iter().map(adj).collect();
    let mut borderline = Vec::new();
    Ok(largest_invariant_subspace(k0, &ops_adj, cfg.rank_tol, &mut borderline)?.ncols())
}
