//! Completely positive maps from Kraus tuples, their lifting structure,
//! fixed-point sets, the compression correspondence for subisometric
//! coisometric liftings, ergodicity, invariant-state support compression,
//! and the word-indexed moment matrix of a fixed point.

use ndarray::prelude::*;

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::lifting::{is_subisometric, Lifting};
use crate::linalg::{adj, eigh_ascending, fro_norm, op_norm, orthonormal_range, zeros, CMat};
use crate::rowcon::{star_stability, RowContraction, Tolerances};
use crate::Verdict;

/// The map `X -> sum_i T_i X T_i*` for a row contraction `T`; contractive
/// (`Phi(1) <= 1`), and unital exactly when the tuple is coisometric.
#[derive(Clone, Debug)]
pub struct CPMap {
    kraus: RowContraction,
}

impl CPMap {
    pub fn new(kraus: RowContraction) -> Self {
        CPMap { kraus }
    }

    pub fn kraus(&self) -> &RowContraction {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus.dim()
    }

    pub fn d(&self) -> usize {
        self.kraus.d()
    }

    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.dim() || x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "argument is {}x{}, map acts on {}x{}",
                x.nrows(),
                x.ncols(),
                self.dim(),
                self.dim()
            )));
        }
        Ok(self.kraus.apply_phi(x))
    }

    /// Trace dual `X -> sum_i T_i* X T_i`: `tr(psi Phi(X)) = tr(Phi*(psi) X)`.
    pub fn apply_dual(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.dim() || x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "argument is {}x{}, map acts on {}x{}",
                x.nrows(),
                x.ncols(),
                self.dim(),
                self.dim()
            )));
        }
        Ok(self.kraus.apply_phi_adjoint(x))
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.kraus.is_coisometric(tol)
    }

    /// Choi matrix `sum_ij e_ij (x) Phi(e_ij)`; PSD for every Kraus tuple.
    pub fn choi(&self) -> CMat {
        let n = self.dim();
        let mut out = zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e_ij = zeros(n, n);
                e_ij[(i, j)] = crate::linalg::c(1.0, 0.0);
                let img = self.kraus.apply_phi(&e_ij);
                out.slice_mut(s![i * n..(i + 1) * n, j * n..(j + 1) * n])
                    .assign(&img);
            }
        }
        out
    }

    /// Matrix of `Phi` on column-stacked matrices: `vec(T X T*) =
    /// (conj(T) (x) T) vec(X)`.
    pub fn linearization(&self) -> CMat {
        let n = self.dim();
        let mut out = zeros(n * n, n * n);
        for t in self.kraus.ops() {
            // kron(conj(T), T)
            for bi in 0..n {
                for bj in 0..n {
                    let factor = t[(bi, bj)].conj();
                    if factor.norm_sqr() == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        for j in 0..n {
                            out[(bi * n + i, bj * n + j)] += factor * t[(i, j)];
                        }
                    }
                }
            }
        }
        out
    }
}

/// Orthonormal (Hilbert-Schmidt) basis of the fixed-point set `{X : Phi(X) = X}`.
#[derive(Clone, Debug)]
pub struct FixedPointSet {
    pub basis: Vec<CMat>,
    /// Orthonormal basis of the real subspace of selfadjoint fixed points;
    /// its length equals the complex dimension of the fixed-point set.
    pub selfadjoint_basis: Vec<CMat>,
    /// Singular values of `Phi - id` within a factor 10 of the rank cutoff,
    /// reported as a conditioning warning.
    pub near_threshold: Vec<f64>,
}

impl FixedPointSet {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Diagnostic only: the largest distance of a pairwise product of basis
    /// elements from the span of the set. The fixed-point set of a map
    /// without a faithful invariant state need not be an algebra, so no
    /// multiplicative closure is ever computed from this.
    pub fn multiplicativity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for x in &self.basis {
            for y in &self.basis {
                let prod = x.dot(y);
                let mut residual = prod.clone();
                for b in &self.basis {
                    let inner: crate::linalg::C64 =
                        b.iter().zip(prod.iter()).map(|(u, w)| u.conj() * w).sum();
                    residual = &residual - &b.mapv(|v| v * inner);
                }
                worst = worst.max(fro_norm(&residual));
            }
        }
        worst
    }
}

fn vec_to_mat(v: ArrayView1<crate::linalg::C64>, n: usize) -> CMat {
    let mut out = zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            out[(i, j)] = v[j * n + i];
        }
    }
    out
}

/// Fixed points via the nullspace of the linearized `Phi - id` on the
/// `dim^2`-dimensional matrix space, singular values cut at `1e-8` relative.
pub fn fixed_points(phi: &CPMap, _cfg: &Tolerances) -> Result<FixedPointSet> {
    let n = phi.dim();
    let mut lin = phi.linearization();
    for k in 0..n * n {
        lin[(k, k)] -= crate::linalg::c(1.0, 0.0);
    }
    let (_, sv, vh) = crate::linalg::svd_full(&lin)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let cutoff = 1e-8 * smax.max(1.0);
    let near_threshold: Vec<f64> = sv
        .iter()
        .copied()
        .filter(|&s| s > cutoff / 10.0 && s < cutoff * 10.0)
        .collect();
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    let v = adj(&vh);
    let basis: Vec<CMat> = (rank..n * n).map(|k| vec_to_mat(v.column(k), n)).collect();

    // selfadjoint spanning set, orthonormalized over the reals
    let mut selfadjoint_basis: Vec<CMat> = Vec::new();
    for x in &basis {
        let h1 = crate::linalg::hermitian_part(x);
        let h2 = crate::linalg::hermitian_part(&x.mapv(|v| v * crate::linalg::c(0.0, 1.0)));
        for cand in [h1, h2] {
            // real Gram-Schmidt against the already-kept matrices
            let mut r = cand;
            for b in &selfadjoint_basis {
                let inner: f64 = b.iter().zip(r.iter()).map(|(u, w)| (u.conj() * w).re).sum();
                r = &r - &b.mapv(|v| v * inner);
            }
            let norm = fro_norm(&r);
            if norm > 1e-8 {
                selfadjoint_basis.push(r.mapv(|v| v / norm));
            }
        }
    }

    Ok(FixedPointSet {
        basis,
        selfadjoint_basis,
        near_threshold,
    })
}

/// Block-structure test for a CP map to be a lifting across the projection
/// `p_c`: all Kraus blocks from `ker(p_c)` into `range(p_c)` must vanish
/// (equivalently, `Phi` of a `ker(p_c)`-supported operator stays there).
#[derive(Clone, Debug)]
pub struct CpLiftingReport {
    pub is_lifting: bool,
    /// Largest norm of an upper-right Kraus block.
    pub offdiag: f64,
    /// Compression to `range(p_c)` (present iff `is_lifting`).
    pub phi_c: Option<CPMap>,
    /// Restriction to `ker(p_c)` (present iff `is_lifting`).
    pub phi_a: Option<CPMap>,
}

pub fn is_cp_lifting(phi: &CPMap, p_c: &CMat, tol: f64) -> Result<CpLiftingReport> {
    let n = phi.dim();
    if p_c.nrows() != n || p_c.ncols() != n {
        return Err(Error::DimensionMismatch(
            "projection has wrong dimension".into(),
        ));
    }
    let idem = op_norm(&(&p_c.dot(p_c) - p_c));
    let herm = op_norm(&(&adj(p_c) - p_c));
    if idem > 1e-10 || herm > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "p_c is not an orthogonal projection (idempotency {idem:.2e}, hermiticity {herm:.2e})"
        )));
    }
    let u = orthonormal_range(p_c, 1e-9)?;
    let mut compl = p_c.mapv(|v| -v);
    for k in 0..n {
        compl[(k, k)] += crate::linalg::c(1.0, 0.0);
    }
    let ua = orthonormal_range(&compl, 1e-9)?;

    let mut offdiag = 0.0f64;
    let mut c_ops = Vec::with_capacity(phi.d());
    let mut a_ops = Vec::with_capacity(phi.d());
    for t in phi.kraus().ops() {
        offdiag = offdiag.max(op_norm(&adj(&u).dot(t).dot(&ua)));
        c_ops.push(adj(&u).dot(t).dot(&u));
        a_ops.push(adj(&ua).dot(t).dot(&ua));
    }
    let is_lifting = offdiag <= tol;
    Ok(CpLiftingReport {
        is_lifting,
        offdiag,
        phi_c: if is_lifting {
            Some(CPMap::new(RowContraction::new(c_ops, 1e-8)?))
        } else {
            None
        },
        phi_a: if is_lifting {
            Some(CPMap::new(RowContraction::new(a_ops, 1e-8)?))
        } else {
            None
        },
    })
}

/// Compression of a fixed point of the lifted map to the `C`-corner.
#[derive(Clone, Debug)]
pub struct KappaResult {
    pub compressed: CMat,
    /// `||Phi_C(kappa X) - kappa X||`, checked to confirm the compression
    /// is again a fixed point.
    pub fixed_residual: f64,
}

pub fn kappa(x: &CMat, phi_e: &CPMap, p_c: &CMat, tol: f64) -> Result<KappaResult> {
    let residual = op_norm(&(&phi_e.apply(x)? - x));
    if residual > tol {
        return Err(Error::NotFixed { residual });
    }
    let rep = is_cp_lifting(phi_e, p_c, 1e-8)?;
    let u = orthonormal_range(p_c, 1e-9)?;
    let compressed = adj(&u).dot(x).dot(&u);
    let fixed_residual = match &rep.phi_c {
        Some(phi_c) => op_norm(&(&phi_c.apply(&compressed)? - &compressed)),
        None => f64::NAN,
    };
    Ok(KappaResult {
        compressed,
        fixed_residual,
    })
}

#[derive(Clone, Debug)]
pub struct KappaInverse {
    pub preimage: CMat,
    pub iterations: usize,
    /// `||kappa(preimage) - x||` after convergence.
    pub roundtrip_residual: f64,
}

/// Reconstructs the fixed-point preimage of `x` under the compression by
/// iterating `Phi_E` on `diag(x, 0)` to its limit. Convergence to a genuine
/// preimage is guaranteed for subisometric coisometric liftings; outside
/// that class the iteration may stall or converge elsewhere, which shows up
/// in the reported round-trip residual.
pub fn kappa_inverse(
    x: &CMat,
    phi_e: &CPMap,
    p_c: &CMat,
    cfg: &Tolerances,
) -> Result<KappaInverse> {
    let u = orthonormal_range(p_c, 1e-9)?;
    if x.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "x is {}x{}, corner has dimension {}",
            x.nrows(),
            x.ncols(),
            u.ncols()
        )));
    }
    let mut cur = u.dot(x).dot(&adj(&u));
    let mut iterations = 0;
    loop {
        let next = phi_e.apply(&cur)?;
        let diff = op_norm(&(&next - &cur));
        cur = next;
        iterations += 1;
        if diff <= cfg.tol {
            break;
        }
        if iterations >= cfg.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                last_diff: diff,
            });
        }
    }
    let back = adj(&u).dot(&cur).dot(&u);
    let roundtrip_residual = op_norm(&(&back - x));
    Ok(KappaInverse {
        preimage: cur,
        iterations,
        roundtrip_residual,
    })
}

/// Evaluation of the four equivalent conditions for a coisometric lifting:
/// (a) subisometric, (b) `A` star-stable, (c) `Phi_E^n(p_C) -> 1`,
/// (d) the corner compression is a bijection between the fixed-point sets.
#[derive(Clone, Debug)]
pub struct Thm54Report {
    pub subisometric: Verdict,
    pub a_star_stable: Verdict,
    pub pc_iterates_to_identity: Verdict,
    pub fixed_points_isomorphic: bool,
    pub dim_fixed_e: usize,
    pub dim_fixed_c: usize,
    /// All four booleans agree (inconclusive iterations count as disagreement).
    pub all_agree: bool,
}

pub fn subisometric_equivalences(l: &Lifting, cfg: &Tolerances) -> Result<Thm54Report> {
    let sub = is_subisometric(l, cfg)?;
    let stab = star_stability(l.a(), cfg.tol, cfg.max_iter);
    let a_star_stable = match stab.verdict {
        crate::rowcon::StarStability::Stable { .. } => Verdict::True,
        crate::rowcon::StarStability::NotStable => Verdict::False,
        crate::rowcon::StarStability::Inconclusive => Verdict::Inconclusive,
    };

    // (c): iterate Phi_E on p_C; increasing for coisometric liftings
    let phi_e = CPMap::new(l.e().clone());
    let mut cur = l.p_c();
    let mut pc_verdict = Verdict::Inconclusive;
    for _ in 0..cfg.max_iter {
        let next = phi_e.apply(&cur)?;
        let diff = op_norm(&(&next - &cur));
        cur = next;
        let mut dist = cur.clone();
        for k in 0..l.dim() {
            dist[(k, k)] -= crate::linalg::c(1.0, 0.0);
        }
        if op_norm(&dist) <= cfg.eig_one_tol {
            pc_verdict = Verdict::True;
            break;
        }
        if diff <= cfg.tol {
            pc_verdict = Verdict::False;
            break;
        }
    }

    // (d): compare fixed-point sets through the corner compression
    let phi_c = CPMap::new(l.c().clone());
    let fixed_e = fixed_points(&phi_e, cfg)?;
    let fixed_c = fixed_points(&phi_c, cfg)?;
    let dim_fixed_e = fixed_e.dim();
    let dim_fixed_c = fixed_c.dim();
    let fixed_points_isomorphic = if dim_fixed_e == dim_fixed_c {
        // kappa on the basis must have full rank
        let p = l.dim_c();
        let mut stacked = zeros(p * p, dim_fixed_e);
        for (k, x) in fixed_e.basis.iter().enumerate() {
            let corner = x.slice(s![..p, ..p]).to_owned();
            for j in 0..p {
                for i in 0..p {
                    stacked[(j * p + i, k)] = corner[(i, j)];
                }
            }
        }
        let rank = orthonormal_range(&stacked, 1e-8)?.ncols();
        rank == dim_fixed_e
    } else {
        false
    };

    let all_agree = sub.verdict == a_star_stable
        && a_star_stable == pc_verdict
        && (pc_verdict == Verdict::True) == fixed_points_isomorphic
        && pc_verdict != Verdict::Inconclusive;
    Ok(Thm54Report {
        subisometric: sub.verdict,
        a_star_stable,
        pc_iterates_to_identity: pc_verdict,
        fixed_points_isomorphic,
        dim_fixed_e,
        dim_fixed_c,
        all_agree,
    })
}

/// A unital CP map is ergodic when its only fixed points are the multiples
/// of the identity.
pub fn is_ergodic(phi: &CPMap, cfg: &Tolerances) -> Result<bool> {
    if !phi.is_unital(cfg.eig_one_tol) {
        return Err(Error::InvalidInput(
            "ergodicity test requires a unital map".into(),
        ));
    }
    Ok(fixed_points(phi, cfg)?.dim() == 1)
}

/// Compression of a unital CP map to the support of an invariant state.
#[derive(Clone, Debug)]
pub struct SupportCompression {
    /// Support projection of the state.
    pub p_c: CMat,
    /// Compressed map on the support (a coisometric tuple there).
    pub compressed: CPMap,
    /// The state restricted to its support (faithful there).
    pub state: CMat,
    /// `max_i || p_C E_i (1 - p_C) ||`: the coinvariance of the support,
    /// which must hold for invariant states of unital maps.
    pub coinvariance_defect: f64,
}

pub fn support_compression(
    phi: &CPMap,
    psi: &CMat,
    cfg: &Tolerances,
) -> Result<SupportCompression> {
    let n = phi.dim();
    if psi.nrows() != n || psi.ncols() != n {
        return Err(Error::DimensionMismatch("state has wrong dimension".into()));
    }
    let herm = op_norm(&(&adj(psi) - psi));
    if herm > 1e-10 {
        return Err(Error::InvalidInput("state is not Hermitian".into()));
    }
    let (vals, vecs) = eigh_ascending(psi)?;
    if vals.iter().any(|&v| v < -1e-10) {
        return Err(Error::InvalidInput("state is not PSD".into()));
    }
    let trace: f64 = vals.iter().sum();
    if (trace - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "state trace is {trace}, expected 1"
        )));
    }
    // invariance in trace-dual form: psi o Phi = psi
    let inv_residual = op_norm(&(&phi.apply_dual(psi)? - psi));
    if inv_residual > cfg.eig_one_tol.max(cfg.tol) {
        return Err(Error::NotInvariant {
            residual: inv_residual,
        });
    }
    let vmax = vals.last().copied().unwrap_or(0.0);
    let kept: Vec<usize> = (0..n)
        .filter(|&k| vals[k] > cfg.rank_tol * vmax.max(1e-300))
        .collect();
    let mut u = zeros(n, kept.len());
    for (out, &k) in kept.iter().enumerate() {
        u.column_mut(out).assign(&vecs.column(k));
    }
    let p_c = u.dot(&adj(&u));
    // coinvariance of the support: p_C E_i* p_C = E_i* p_C
    let mut compl = p_c.mapv(|v| -v);
    for k in 0..n {
        compl[(k, k)] += crate::linalg::c(1.0, 0.0);
    }
    let mut coinvariance_defect = 0.0f64;
    let mut c_ops = Vec::with_capacity(phi.d());
    for t in phi.kraus().ops() {
        coinvariance_defect = coinvariance_defect.max(op_norm(&p_c.dot(t).dot(&compl)));
        c_ops.push(adj(&u).dot(t).dot(&u));
    }
    let state = adj(&u).dot(psi).dot(&u);
    let compressed = CPMap::new(RowContraction::new(c_ops, 1e-8)?);
    Ok(SupportCompression {
        p_c,
        compressed,
        state,
        coinvariance_defect,
    })
}

/// Word-indexed moment matrix `[R_a D R_b*]` of a fixed point `0 <= D <= 1`
/// at depth `k`. It is PSD because it factors through `R_a D^(1/2)`, and for
/// a fixed `D` each diagonal level sums back to `D`.
pub fn moment_matrix(
    d_fixed: &CMat,
    r: &RowContraction,
    depth: usize,
    cfg: &Tolerances,
) -> Result<CMat> {
    let n = r.dim();
    if d_fixed.nrows() != n || d_fixed.ncols() != n {
        return Err(Error::DimensionMismatch(
            "fixed point has wrong dimension".into(),
        ));
    }
    let (vals, _) = eigh_ascending(d_fixed)?;
    let lo = vals.first().copied().unwrap_or(0.0);
    let hi = vals.last().copied().unwrap_or(0.0);
    if lo < -cfg.eig_one_tol || hi > 1.0 + cfg.eig_one_tol {
        return Err(Error::InvalidInput(format!(
            "fixed point must satisfy 0 <= D <= 1 (spectrum [{lo:.3e}, {hi:.3e}])"
        )));
    }
    let residual = op_norm(&(&r.apply_phi(d_fixed) - d_fixed));
    if residual > cfg.eig_one_tol.max(cfg.tol) {
        return Err(Error::NotFixed { residual });
    }
    let basis = FockBasis::new(r.d(), depth, 1)?;
    // word products R_a by the append recursion over the prefix-closed order
    let mut products: Vec<CMat> = Vec::with_capacity(basis.word_count());
    for w in basis.words() {
        if w.is_empty() {
            products.push(crate::linalg::eye(n));
            continue;
        }
        let last = w.letters()[w.len() - 1];
        let prefix = crate::fock::Word::new(&w.letters()[..w.len() - 1], r.d()).expect("prefix");
        let pidx = basis.word_index(&prefix).expect("prefix enumerated");
        products.push(products[pidx].dot(r.op((last - 1) as usize)));
    }
    let count = basis.word_count();
    let mut out = zeros(count * n, count * n);
    for (ai, ra) in products.iter().enumerate() {
        let rad = ra.dot(d_fixed);
        for (bi, rb) in products.iter().enumerate() {
            let block = rad.dot(&adj(rb));
            out.slice_mut(s![ai * n..(ai + 1) * n, bi * n..(bi + 1) * n])
                .assign(&block);
        }
    }
    Ok(out)
}
