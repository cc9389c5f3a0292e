//! Row contractions: defect operators, classification, Wold data, the
//! Poisson kernel, and a truncated minimal isometric dilation.
//!
//! A row contraction is a tuple `T = (T_1, ..., T_d)` of operators on one
//! space `H` such that `sum_i T_i T_i* <= 1`; equivalently the row operator
//! `[T_1 ... T_d] : H^d -> H` is a contraction. Its defect operators are
//!
//! * `D_* = (1 - sum_i T_i T_i*)^(1/2)` on `H`,
//! * `D  = (delta_ij - T_i* T_j)^(1/2)` on `H^d`,
//!
//! and the defect spaces are their ranges, represented here by isometric
//! factors obtained from rank-revealing eigendecompositions.

use ndarray::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, Word};
use crate::linalg::{
    adj, c, eigh_ascending, lambda_max_hermitian, op_norm, psd_sqrt_factor, zeros, CMat, CVec,
};

/// Tolerances and iteration limits shared by the numerical routines.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// General comparison tolerance.
    pub tol: f64,
    /// Numerical rank cutoff for defect operators and subspace computations.
    /// Defect-type spectra live in `[0, 1]`, so this acts as an absolute
    /// cutoff on eigenvalues.
    pub rank_tol: f64,
    /// Tolerance for recognizing eigenvalue 1 of the Wold limit.
    pub eig_one_tol: f64,
    /// Residual above which a lifting's B block is declared incompatible
    /// with every defect-coordinate factorization.
    pub resid_tol: f64,
    /// Iteration cap for fixed-point style loops.
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol: 1e-9,
            rank_tol: 1e-9,
            eig_one_tol: 1e-8,
            resid_tol: 1e-6,
            max_iter: 10_000,
        }
    }
}

/// A validated `d`-tuple of square matrices on one space.
#[derive(Clone, Debug)]
pub struct RowContraction {
    ops: Vec<CMat>,
    dim: usize,
}

/// Result of the row-contraction test on a raw tuple.
#[derive(Clone, Copy, Debug)]
pub struct ContractionReport {
    pub is_contraction: bool,
    /// Largest eigenvalue of `sum_i T_i T_i*`.
    pub lambda_max: f64,
}

/// Checks shapes and the contraction condition `lambda_max(sum T_i T_i*) <= 1 + tol`.
pub fn validate_row_contraction(ops: &[CMat], tol: f64) -> Result<ContractionReport> {
    check_tuple_shapes(ops)?;
    let dim = ops[0].nrows();
    let mut gram = zeros(dim, dim);
    for t in ops {
        gram = gram + t.dot(&adj(t));
    }
    let lambda_max = lambda_max_hermitian(&gram)?;
    Ok(ContractionReport {
        is_contraction: lambda_max <= 1.0 + tol,
        lambda_max,
    })
}

fn check_tuple_shapes(ops: &[CMat]) -> Result<()> {
    if ops.is_empty() {
        return Err(Error::EmptyTuple);
    }
    let dim = ops[0].nrows();
    for (i, t) in ops.iter().enumerate() {
        if t.nrows() != t.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "entry {i} is {}x{}, expected square",
                t.nrows(),
                t.ncols()
            )));
        }
        if t.nrows() != dim {
            return Err(Error::ShapeMismatch(format!(
                "entry {i} is {}x{}, expected {dim}x{dim}",
                t.nrows(),
                t.ncols()
            )));
        }
    }
    Ok(())
}

impl RowContraction {
    /// Builds a row contraction, rejecting tuples that fail the contraction
    /// test at tolerance `tol`.
    pub fn new(ops: Vec<CMat>, tol: f64) -> Result<Self> {
        let report = validate_row_contraction(&ops, tol)?;
        if !report.is_contraction {
            return Err(Error::NotContractive {
                lambda_max: report.lambda_max,
            });
        }
        let dim = ops[0].nrows();
        Ok(RowContraction { ops, dim })
    }

    /// The zero tuple on a space of dimension `dim` (possibly 0).
    pub fn zero(d: usize, dim: usize) -> Self {
        RowContraction {
            ops: (0..d).map(|_| zeros(dim, dim)).collect(),
            dim,
        }
    }

    pub fn d(&self) -> usize {
        self.ops.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 0-based access to the tuple entries.
    pub fn op(&self, i: usize) -> &CMat {
        &self.ops[i]
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    /// The row operator `[T_1 ... T_d] : H^d -> H`.
    pub fn row_matrix(&self) -> CMat {
        let refs: Vec<&CMat> = self.ops.iter().collect();
        crate::linalg::hstack(&refs)
    }

    /// `sum_i T_i T_i*`.
    pub fn row_gram(&self) -> CMat {
        let mut gram = zeros(self.dim, self.dim);
        for t in &self.ops {
            gram = gram + t.dot(&adj(t));
        }
        gram
    }

    /// The `d*dim` square matrix `(delta_ij - T_i* T_j)`.
    pub fn column_defect_gram(&self) -> CMat {
        let d = self.d();
        let n = self.dim;
        let mut out = zeros(d * n, d * n);
        for i in 0..d {
            for j in 0..d {
                let mut block = adj(&self.ops[i]).dot(&self.ops[j]).mapv(|v| -v);
                if i == j {
                    for k in 0..n {
                        block[(k, k)] += c(1.0, 0.0);
                    }
                }
                out.slice_mut(s![i * n..(i + 1) * n, j * n..(j + 1) * n])
                    .assign(&block);
            }
        }
        out
    }

    /// The completely positive map `X -> sum_i T_i X T_i*`.
    pub fn apply_phi(&self, x: &CMat) -> CMat {
        let mut out = zeros(self.dim, self.dim);
        for t in &self.ops {
            out = out + t.dot(x).dot(&adj(t));
        }
        out
    }

    /// The adjoint map `X -> sum_i T_i* X T_i` (trace dual of `apply_phi`).
    pub fn apply_phi_adjoint(&self, x: &CMat) -> CMat {
        let mut out = zeros(self.dim, self.dim);
        for t in &self.ops {
            out = out + adj(t).dot(x).dot(t);
        }
        out
    }

    /// `T_alpha = T_{a_1} T_{a_2} ... T_{a_n}`; the empty word gives the identity.
    pub fn word_product(&self, w: &Word) -> CMat {
        let mut out = crate::linalg::eye(self.dim);
        for &l in w.letters() {
            out = out.dot(&self.ops[(l - 1) as usize]);
        }
        out
    }

    /// Adjoints `T_alpha*` for every word of length at most `max_len`,
    /// indexed like `basis.words()`. Computed by the append recursion
    /// `T_{alpha j}* = T_j* T_alpha*` over the prefix-closed enumeration.
    pub fn word_adjoints(&self, basis: &FockBasis) -> Vec<CMat> {
        let mut out: Vec<CMat> = Vec::with_capacity(basis.word_count());
        let adjs: Vec<CMat> = self.ops.iter().map(adj).collect();
        for w in basis.words() {
            if w.is_empty() {
                out.push(crate::linalg::eye(self.dim));
                continue;
            }
            let last = w.letters()[w.len() - 1];
            let prefix = Word::new(&w.letters()[..w.len() - 1], self.d()).expect("prefix");
            let pidx = basis.word_index(&prefix).expect("prefix enumerated");
            out.push(adjs[(last - 1) as usize].dot(&out[pidx]));
        }
        out
    }

    /// Coisometry defect `|| sum T_i T_i* - 1 ||`.
    pub fn coisometry_defect(&self) -> f64 {
        let mut g = self.row_gram();
        for k in 0..self.dim {
            g[(k, k)] -= c(1.0, 0.0);
        }
        op_norm(&g)
    }

    /// True iff `sum T_i T_i* = 1` within `tol`.
    pub fn is_coisometric(&self, tol: f64) -> bool {
        self.coisometry_defect() <= tol
    }
}

/// Defect operators and their rank-revealed isometric factors.
#[derive(Clone, Debug)]
pub struct DefectData {
    /// `(1 - sum T_i T_i*)^(1/2)` on `H`.
    pub dstar: CMat,
    /// `(delta_ij - T_i* T_j)^(1/2)` on `H^d`.
    pub d: CMat,
    pub rank_star: usize,
    pub rank: usize,
    /// `h x rank_star`, orthonormal columns spanning `range(dstar)`.
    pub iota_star: CMat,
    /// `d*h x rank`, orthonormal columns spanning `range(d)`.
    pub iota: CMat,
    /// Nonzero singular values: `dstar . iota_star = iota_star . diag(sigma_star)`.
    pub sigma_star: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl DefectData {
    /// Coordinate map onto the star defect space: `iota_star* . dstar`
    /// (`rank_star x h`).
    pub fn star_coords(&self) -> CMat {
        adj(&self.iota_star).dot(&self.dstar)
    }

    /// Coordinate map onto the column defect space: `iota* . d`
    /// (`rank x d*h`).
    pub fn col_coords(&self) -> CMat {
        adj(&self.iota).dot(&self.d)
    }
}

/// Computes both defect operators. An eigenvalue below `-cfg.tol` means the
/// tuple is not a contraction and is reported as an error rather than
/// clipped.
pub fn defects(t: &RowContraction, cfg: &Tolerances) -> Result<DefectData> {
    let h = t.dim();
    let mut star_gram = t.row_gram().mapv(|v| -v);
    for k in 0..h {
        star_gram[(k, k)] += c(1.0, 0.0);
    }
    let star = psd_sqrt_factor(&star_gram, cfg.tol, cfg.rank_tol)?;
    let col = psd_sqrt_factor(&t.column_defect_gram(), cfg.tol, cfg.rank_tol)?;
    Ok(DefectData {
        dstar: star.sqrt,
        d: col.sqrt,
        rank_star: star.rank,
        rank: col.rank,
        iota_star: star.factor,
        iota: col.factor,
        sigma_star: star.sigma,
        sigma: col.sigma,
    })
}

/// Outcome of the star-stability iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarStability {
    /// `||Phi^n(1)||` dropped below tolerance at step `n`.
    Stable { steps: usize },
    /// The sequence stabilized at a nonzero limit.
    NotStable,
    /// Neither happened within the iteration cap.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub verdict: StarStability,
    /// `||Phi^n(1)||` for n = 1, 2, ...
    pub norms: Vec<f64>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        matches!(self.verdict, StarStability::Stable { .. })
    }
}

/// Decides star-stability via the decreasing sequence `Phi_T^n(1)`, using
/// `sum_{|a|=n} ||T_a* h||^2 = <h, Phi_T^n(1) h>`.
pub fn star_stability(t: &RowContraction, tol: f64, max_iter: usize) -> StabilityReport {
    let mut cur = crate::linalg::eye(t.dim());
    let mut norms = Vec::new();
    if t.dim() == 0 {
        return StabilityReport {
            verdict: StarStability::Stable { steps: 0 },
            norms,
        };
    }
    for n in 1..=max_iter {
        let next = t.apply_phi(&cur);
        let norm = op_norm(&next);
        let diff = op_norm(&(&next - &cur));
        norms.push(norm);
        if norm <= tol {
            return StabilityReport {
                verdict: StarStability::Stable { steps: n },
                norms,
            };
        }
        // stall test relative to the current level: geometric decay keeps
        // shrinking by a fixed factor and never stalls, while a nonzero
        // limit makes the relative step vanish
        if diff <= tol * norm {
            return StabilityReport {
                verdict: StarStability::NotStable,
                norms,
            };
        }
        cur = next;
    }
    StabilityReport {
        verdict: StarStability::Inconclusive,
        norms,
    }
}

pub fn is_star_stable(t: &RowContraction, tol: f64, max_iter: usize) -> bool {
    star_stability(t, tol, max_iter).is_stable()
}

/// The limit `Q` of `Phi_T^n(1)` together with the eigenvalue-1 eigenspace.
#[derive(Clone, Debug)]
pub struct WoldData {
    /// Monotone limit of `Phi_T^n(1)`, `0 <= Q <= 1`, `Phi_T(Q) = Q`.
    pub q: CMat,
    /// Orthonormal basis (columns) of the eigenspace of `Q` at eigenvalue 1.
    /// This is the largest subspace on which the tuple acts coisometrically.
    pub h1_basis: CMat,
    pub converged_at: usize,
}

impl WoldData {
    pub fn h1_dim(&self) -> usize {
        self.h1_basis.ncols()
    }
}

/// Fixed-point iteration of `Phi_T` on the identity; stops when the
/// successive difference drops below `cfg.tol`. Monotonicity guarantees
/// convergence in finite dimension, but slow decay can exhaust
/// `cfg.max_iter`, which is reported as an error.
pub fn wold_data(t: &RowContraction, cfg: &Tolerances) -> Result<WoldData> {
    let h = t.dim();
    if h == 0 {
        return Ok(WoldData {
            q: zeros(0, 0),
            h1_basis: zeros(0, 0),
            converged_at: 0,
        });
    }
    let mut cur = crate::linalg::eye(h);
    let mut last_diff = f64::INFINITY;
    for n in 1..=cfg.max_iter {
        let next = t.apply_phi(&cur);
        last_diff = op_norm(&(&next - &cur));
        cur = next;
        if last_diff <= cfg.tol {
            let (vals, vecs) = eigh_ascending(&cur)?;
            let kept: Vec<usize> = (0..h)
                .filter(|&k| (vals[k] - 1.0).abs() <= cfg.eig_one_tol)
                .collect();
            let mut h1 = zeros(h, kept.len());
            for (out, &k) in kept.iter().enumerate() {
                h1.column_mut(out).assign(&vecs.column(k));
            }
            return Ok(WoldData {
                q: cur,
                h1_basis: h1,
                converged_at: n,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        last_diff,
    })
}

/// Completely non-coisometric: no nonzero vector on which the tuple acts
/// coisometrically, i.e. the eigenvalue-1 space of the Wold limit is trivial.
pub fn is_cnc(t: &RowContraction, cfg: &Tolerances) -> Result<bool> {
    Ok(wold_data(t, cfg)?.h1_dim() == 0)
}

/// Truncated Poisson kernel `h -> sum_{|a| <= N} e_a (x) D_* T_a* h`,
/// written in star-defect coordinates.
#[derive(Clone, Debug)]
pub struct PoissonKernel {
    /// `(count * rank_star) x h` matrix; the block of word `a` is
    /// `iota_star* . dstar . T_a*`.
    pub matrix: CMat,
    /// Index of the codomain `Gamma_N (x) D_*`-space.
    pub fock: FockBasis,
    /// `||Phi_T^(N+1)(1)||`: for every `h`, `||h||^2 - ||K h||^2 = <h, Phi^(N+1)(1) h>`,
    /// so this bounds the squared isometry defect of the kernel.
    pub leakage: f64,
}

pub fn poisson_kernel(
    t: &RowContraction,
    defect: &DefectData,
    max_len: usize,
) -> Result<PoissonKernel> {
    let fock = FockBasis::new(t.d(), max_len, defect.rank_star)?;
    let star_coords = defect.star_coords();
    let adjoints = t.word_adjoints(&fock);
    let h = t.dim();
    let mut matrix = zeros(fock.dim(), h);
    for (widx, wadj) in adjoints.iter().enumerate() {
        let block = star_coords.dot(wadj);
        matrix
            .slice_mut(s![
                widx * defect.rank_star..(widx + 1) * defect.rank_star,
                ..
            ])
            .assign(&block);
    }
    let mut phi_pow = crate::linalg::eye(h);
    for _ in 0..=max_len {
        phi_pow = t.apply_phi(&phi_pow);
    }
    Ok(PoissonKernel {
        matrix,
        fock,
        leakage: op_norm(&phi_pow),
    })
}

/// Truncated minimal isometric dilation on `H (+) (Gamma_N (x) D)`.
///
/// `V_i (h (+) xi) = T_i h (+) [e_0 (x) D_i h + e_i (x) xi]` with the top
/// Fock level compressed to zero. Each `V_i` is exactly isometric on vectors
/// supported on levels `< N`, and `P_H V_i |_H = T_i` exactly.
#[derive(Clone, Debug)]
pub struct SchaefferMid {
    pub tuple: Vec<CMat>,
    pub h_dim: usize,
    /// Index of the dilation's Fock block (multiplicity = rank of `D`).
    pub fock: FockBasis,
    /// `||Phi_T^(N+1)(1)||`, the truncation-leakage bound stored with the mid.
    pub phi_top_norm: f64,
}

impl SchaefferMid {
    pub fn dim(&self) -> usize {
        self.h_dim + self.fock.dim()
    }

    /// The tuple as a `RowContraction` (it is one, up to rounding).
    pub fn as_row_contraction(&self, tol: f64) -> Result<RowContraction> {
        RowContraction::new(self.tuple.clone(), tol)
    }
}

pub fn schaeffer_mid(
    t: &RowContraction,
    defect: &DefectData,
    max_len: usize,
) -> Result<SchaefferMid> {
    let h = t.dim();
    let d = t.d();
    let rank = defect.rank;
    let fock = FockBasis::new(d, max_len, rank)?;
    let total = h + fock.dim();
    let col_coords = defect.col_coords(); // rank x d*h

    let mut tuple = Vec::with_capacity(d);
    for i in 0..d {
        let mut v = zeros(total, total);
        // H-block: compression to H is T_i
        v.slice_mut(s![..h, ..h]).assign(t.op(i));
        // H -> vacuum block: defect coordinates of D_i h = D (0,..,h,..,0)
        if rank > 0 {
            let di = col_coords.slice(s![.., i * h..(i + 1) * h]).to_owned();
            v.slice_mut(s![h..h + rank, ..h]).assign(&di);
        }
        // Fock block: e_i (x) . , dropping the top level
        for (src, w) in fock.words().iter().enumerate() {
            if w.len() == max_len {
                continue;
            }
            let dst = fock
                .word_index(&w.prepend((i + 1) as u8))
                .expect("shifted word");
            for k in 0..rank {
                v[(h + dst * rank + k, h + src * rank + k)] = c(1.0, 0.0);
            }
        }
        tuple.push(v);
    }

    let mut phi_pow = crate::linalg::eye(h);
    for _ in 0..=max_len {
        phi_pow = t.apply_phi(&phi_pow);
    }
    Ok(SchaefferMid {
        tuple,
        h_dim: h,
        fock,
        phi_top_norm: op_norm(&phi_pow),
    })
}

/// Embeds a vector of `H` into the dilation space.
pub fn embed_h(mid: &SchaefferMid, h_vec: &CVec) -> CVec {
    let mut out = CVec::zeros(mid.dim());
    out.slice_mut(s![..mid.h_dim]).assign(h_vec);
    out
}
