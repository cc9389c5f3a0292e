//! Multi-analytic symbols and characteristic functions of reduced liftings.
//!
//! A multi-analytic operator `M : Gamma (x) D -> Gamma (x) D_C` commutes
//! with the creation operators and is determined by its symbol, the family
//! of coefficients `theta_a : D -> D_C` indexed by words. The induced block
//! operator on truncated Fock spaces places `theta_a` at `(b.a, b)` for
//! every input word `b` (input word prefixed, coefficient word appended).
//!
//! The characteristic function of a reduced lifting is computed from the
//! closed-form coefficient expansion of its symbol: for a defect vector
//! supported on `H_C` the coefficient at the empty word is
//! `(D_C)_i h - gamma D_{*,A} B_i h` and at a word `a` it is
//! `-gamma D_{*,A} A_a* B_i h`, while for a defect vector supported on `H_A`
//! the vacuum term is `-gamma D_{*,A} A_i h` and the coefficient at a word
//! `j.a` is `gamma D_{*,A} A_a* (delta_ji - A_j* A_i) h`. Each coefficient
//! is an exact finite matrix product; truncation only limits which words are
//! stored, and the ignored tail is tracked by an explicit leakage bound.

use std::collections::BTreeMap;

use ndarray::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, Word};
use crate::lifting::{is_reduced, Lifting};
use crate::linalg::{adj, fro_norm, op_norm, psd_sqrt_factor, svd_full, zeros, CMat};
use crate::rowcon::{defects, schaeffer_mid, wold_data, RowContraction, Tolerances};

/// Word-indexed coefficient family of a multi-analytic operator, truncated
/// at word length `max_len`.
#[derive(Clone, Debug)]
pub struct MultiAnalyticSymbol {
    d: usize,
    max_len: usize,
    dom_dim: usize,
    cod_dim: usize,
    coeffs: BTreeMap<Word, CMat>,
    leakage: f64,
}

impl MultiAnalyticSymbol {
    pub fn new(d: usize, max_len: usize, dom_dim: usize, cod_dim: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroAlphabet);
        }
        Ok(MultiAnalyticSymbol {
            d,
            max_len,
            dom_dim,
            cod_dim,
            coeffs: BTreeMap::new(),
            leakage: 0.0,
        })
    }

    /// The constant identity symbol (`theta_empty = 1`, all else zero).
    pub fn identity(d: usize, max_len: usize, dim: usize) -> Result<Self> {
        let mut s = Self::new(d, max_len, dim, dim)?;
        s.set_coeff(Word::empty(), crate::linalg::eye(dim))?;
        Ok(s)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn dom_dim(&self) -> usize {
        self.dom_dim
    }

    pub fn cod_dim(&self) -> usize {
        self.cod_dim
    }

    /// Bound on the operator norm of the ignored coefficients beyond
    /// `max_len`; zero for symbols that are exactly finitely supported.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn set_leakage(&mut self, leakage: f64) {
        self.leakage = leakage;
    }

    pub fn set_coeff(&mut self, w: Word, m: CMat) -> Result<()> {
        if w.len() > self.max_len {
            return Err(Error::InvalidInput(format!(
                "coefficient word {:?} longer than truncation {}",
                w, self.max_len
            )));
        }
        Word::new(w.letters(), self.d)?;
        if m.nrows() != self.cod_dim || m.ncols() != self.dom_dim {
            return Err(Error::DimensionMismatch(format!(
                "coefficient is {}x{}, expected {}x{}",
                m.nrows(),
                m.ncols(),
                self.cod_dim,
                self.dom_dim
            )));
        }
        self.coeffs.insert(w, m);
        Ok(())
    }

    pub fn coeff(&self, w: &Word) -> Option<&CMat> {
        self.coeffs.get(w)
    }

    pub fn coeff_or_zero(&self, w: &Word) -> CMat {
        self.coeffs
            .get(w)
            .cloned()
            .unwrap_or_else(|| zeros(self.cod_dim, self.dom_dim))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Word, &CMat)> {
        self.coeffs.iter()
    }

    pub fn truncated(&self, max_len: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(w, _)| w.len() <= max_len)
            .map(|(w, m)| (w.clone(), m.clone()))
            .collect();
        MultiAnalyticSymbol {
            d: self.d,
            max_len: max_len.min(self.max_len),
            dom_dim: self.dom_dim,
            cod_dim: self.cod_dim,
            coeffs,
            leakage: self.leakage,
        }
    }

    /// Dense block operator on the truncated Fock spaces: the block at
    /// `(b.a, b)` is `theta_a` whenever `|b.a| <= max_len`.
    pub fn block_operator(&self) -> Result<CMat> {
        let basis = FockBasis::new(self.d, self.max_len, 1)?;
        let (cod, dom) = (self.cod_dim, self.dom_dim);
        let mut out = zeros(basis.word_count() * cod, basis.word_count() * dom);
        for (widx, b) in basis.words().iter().enumerate() {
            for (a, theta) in &self.coeffs {
                if b.len() + a.len() > self.max_len {
                    continue;
                }
                let out_idx = basis.word_index(&b.concat(a)).expect("word in range");
                let mut slot = out.slice_mut(s![
                    out_idx * cod..(out_idx + 1) * cod,
                    widx * dom..(widx + 1) * dom
                ]);
                slot += theta;
            }
        }
        Ok(out)
    }

    /// All coefficients for words of length at most `upto`, stacked in
    /// length-lexicographic word order into a `(count * cod_dim) x dom_dim`
    /// matrix (missing coefficients appear as zero blocks).
    pub fn stacked(&self, upto: usize) -> Result<CMat> {
        let basis = FockBasis::new(self.d, upto.min(self.max_len), 1)?;
        let mut out = zeros(basis.word_count() * self.cod_dim, self.dom_dim);
        for (widx, w) in basis.words().iter().enumerate() {
            if let Some(theta) = self.coeffs.get(w) {
                out.slice_mut(s![widx * self.cod_dim..(widx + 1) * self.cod_dim, ..])
                    .assign(theta);
            }
        }
        Ok(out)
    }

    /// Operator norm of the truncated block operator.
    pub fn norm(&self) -> Result<f64> {
        Ok(op_norm(&self.block_operator()?))
    }

    /// Gram blocks `G_w = sum_a theta_(w.a)* theta_a` over the stored
    /// coefficients, indexed like the word enumeration. `G_empty` collects
    /// the full coefficient Gram sum.
    pub fn gram_blocks(&self) -> Result<Vec<CMat>> {
        let basis = FockBasis::new(self.d, self.max_len, 1)?;
        let mut out = Vec::with_capacity(basis.word_count());
        for w in basis.words() {
            let mut g = zeros(self.dom_dim, self.dom_dim);
            for (a_word, theta_a) in &self.coeffs {
                if w.len() + a_word.len() > self.max_len {
                    continue;
                }
                if let Some(theta_wa) = self.coeff(&w.concat(a_word)) {
                    g = g + adj(theta_wa).dot(theta_a);
                }
            }
            out.push(g);
        }
        Ok(out)
    }

    /// Compression of the full `M* M` to the truncated domain, assembled
    /// from the coefficient Gram blocks: the block at `(b, b.w)` is `G_w`,
    /// at `(b.w, b)` its adjoint, and zero unless one word prefixes the
    /// other. Unlike `adj(block_operator()) . block_operator()` this does
    /// not suffer boundary chopping; its error is controlled by the symbol
    /// tail alone, so inner symbols give the identity up to leakage.
    pub fn truncated_gram(&self) -> Result<CMat> {
        let basis = FockBasis::new(self.d, self.max_len, 1)?;
        let grams = self.gram_blocks()?;
        let dom = self.dom_dim;
        let count = basis.word_count();
        let mut out = zeros(count * dom, count * dom);
        for (bi, b) in basis.words().iter().enumerate() {
            for (widx, w) in basis.words().iter().enumerate() {
                if b.len() + w.len() > self.max_len {
                    continue;
                }
                let long_idx = basis.word_index(&b.concat(w)).expect("word in range");
                let g = &grams[widx];
                let gadj = adj(g);
                {
                    let mut slot = out.slice_mut(s![
                        bi * dom..(bi + 1) * dom,
                        long_idx * dom..(long_idx + 1) * dom
                    ]);
                    slot += g;
                }
                if widx != 0 {
                    let mut slot = out.slice_mut(s![
                        long_idx * dom..(long_idx + 1) * dom,
                        bi * dom..(bi + 1) * dom
                    ]);
                    slot += &gadj;
                }
            }
        }
        Ok(out)
    }
}

/// Characteristic function of a reduced lifting, with coefficients for all
/// words of length at most `max_len`.
///
/// The stored leakage bound is
/// `||gamma|| * (||Phi_A^(N+1)(1)||^(1/2) ||Bsum|| + ||Phi_A^N(1)||^(1/2) ||Z||)`
/// where `Bsum` and `Z` collect the `H_A`-side vectors entering the
/// coefficient formulas; it dominates the operator norm of the ignored
/// coefficient tail.
pub fn char_symbol(l: &Lifting, max_len: usize, cfg: &Tolerances) -> Result<MultiAnalyticSymbol> {
    let reduced = is_reduced(l, cfg)?;
    if !reduced.is_reduced {
        return Err(Error::NotReduced {
            kernel_dim: reduced.kernel_dim,
        });
    }
    let gamma = reduced.gamma.gamma;

    let c = l.c();
    let a = l.a();
    let d = c.d();
    let (p, q) = (c.dim(), a.dim());
    let cd = defects(c, cfg)?;
    let ad = defects(a, cfg)?;
    let ed = defects(l.e(), cfg)?;
    let dom = ed.rank;
    let cod = cd.rank;

    // gamma composed with the star-defect coordinates of A: rank_C x q
    let gamma_star = gamma.dot(&ad.star_coords());

    // per-column data from the defect basis of E
    // u_k = iota_E[:, k] / sigma_k, split into x (H_C) and y (H_A) parts
    let mut cvec = zeros(d * p, dom); // ambient H_C^d vectors
    let mut bsum = zeros(q, dom); // sum_i B_i x_i
    let mut ay = zeros(q, dom); // sum_i A_i y_i
    let mut ys: Vec<CMat> = (0..d).map(|_| zeros(q, dom)).collect();
    for k in 0..dom {
        let sigma = ed.sigma[k];
        for (i, y_slot) in ys.iter_mut().enumerate() {
            let block = ed.iota.slice(s![i * (p + q)..(i + 1) * (p + q), k]);
            let x_i: Array1<crate::linalg::C64> = block.slice(s![..p]).mapv(|v| v / sigma);
            let y_i: Array1<crate::linalg::C64> = block.slice(s![p..]).mapv(|v| v / sigma);
            cvec.slice_mut(s![i * p..(i + 1) * p, k]).assign(&x_i);
            if q > 0 {
                let bx = l.b()[i].dot(&x_i);
                let ayi = a.op(i).dot(&y_i);
                for r in 0..q {
                    bsum[(r, k)] += bx[r];
                    ay[(r, k)] += ayi[r];
                    y_slot[(r, k)] += y_i[r];
                }
            }
        }
    }
    // z_j = y_j - A_j* (sum_i A_i y_i)
    let zs: Vec<CMat> = (0..d).map(|j| &ys[j] - &adj(a.op(j)).dot(&ay)).collect();

    let basis = FockBasis::new(d, max_len, 1)?;
    let a_adjoints = a.word_adjoints(&basis);

    let mut symbol = MultiAnalyticSymbol::new(d, max_len, dom, cod)?;
    // vacuum coefficient
    let vac = adj(&cd.iota).dot(&cd.d).dot(&cvec) - gamma_star.dot(&(&bsum + &ay));
    symbol.set_coeff(Word::empty(), vac)?;
    // higher coefficients
    for (widx, w) in basis.words().iter().enumerate() {
        if w.is_empty() {
            continue;
        }
        let (j, tail) = w.split_first().expect("nonempty word");
        let tail_idx = basis.word_index(&tail).expect("tail enumerated");
        let theta = gamma_star.dot(
            &(&a_adjoints[tail_idx].dot(&zs[(j - 1) as usize]) - &a_adjoints[widx].dot(&bsum)),
        );
        symbol.set_coeff(w.clone(), theta)?;
    }

    // leakage bound for the ignored words
    let mut phi_n = crate::linalg::eye(q);
    for _ in 0..max_len {
        phi_n = a.apply_phi(&phi_n);
    }
    let phi_n1 = a.apply_phi(&phi_n);
    let z_refs: Vec<&CMat> = zs.iter().collect();
    let zstack = crate::linalg::vstack(&z_refs);
    let leak = op_norm(&gamma)
        * (op_norm(&phi_n1).sqrt() * op_norm(&bsum) + op_norm(&phi_n).sqrt() * op_norm(&zstack));
    symbol.set_leakage(leak);
    Ok(symbol)
}

/// Characteristic function of a c.n.c. row contraction, from the star-defect
/// coordinates of its column defect space: the coefficient formulas of the
/// lifting symbol with the embedding contraction omitted.
pub fn popescu_char_fn(
    a: &RowContraction,
    max_len: usize,
    cfg: &Tolerances,
) -> Result<MultiAnalyticSymbol> {
    let wold = wold_data(a, cfg)?;
    if wold.h1_dim() != 0 {
        return Err(Error::NotCnc {
            h1_dim: wold.h1_dim(),
        });
    }
    let ad = defects(a, cfg)?;
    let d = a.d();
    let q = a.dim();
    let dom = ad.rank;
    let cod = ad.rank_star;

    // xi_k = iota_A[:, k]; D_A xi_k = sigma_k xi_k (spectral factorization)
    let star_coords = ad.star_coords(); // cod x q
                                        // vacuum: -iota_star* (row A applied to xi_k)
    let mut a_xi = zeros(q, dom);
    let mut scaled_blocks: Vec<CMat> = (0..d).map(|_| zeros(q, dom)).collect();
    for k in 0..dom {
        for (j, scaled) in scaled_blocks.iter_mut().enumerate() {
            let block: Array1<crate::linalg::C64> =
                ad.iota.slice(s![j * q..(j + 1) * q, k]).to_owned();
            let img = a.op(j).dot(&block);
            for r in 0..q {
                a_xi[(r, k)] += img[r];
                scaled[(r, k)] = block[r] * ad.sigma[k];
            }
        }
    }

    let basis = FockBasis::new(d, max_len, 1)?;
    let a_adjoints = a.word_adjoints(&basis);

    let mut symbol = MultiAnalyticSymbol::new(d, max_len, dom, cod)?;
    let vac = adj(&ad.iota_star).dot(&a_xi).mapv(|v| -v);
    symbol.set_coeff(Word::empty(), vac)?;
    for w in basis.words() {
        if w.is_empty() {
            continue;
        }
        let (j, tail) = w.split_first().expect("nonempty word");
        let tail_idx = basis.word_index(&tail).expect("tail enumerated");
        let theta = star_coords
            .dot(&a_adjoints[tail_idx])
            .dot(&scaled_blocks[(j - 1) as usize]);
        symbol.set_coeff(w.clone(), theta)?;
    }

    let mut phi_n = crate::linalg::eye(q);
    for _ in 0..max_len {
        phi_n = a.apply_phi(&phi_n);
    }
    let s_refs: Vec<&CMat> = scaled_blocks.iter().collect();
    let sstack = crate::linalg::vstack(&s_refs);
    symbol.set_leakage(op_norm(&phi_n).sqrt() * op_norm(&sstack));
    Ok(symbol)
}

/// Word-convolution composition: the coefficient of the composite at `w` is
/// the sum of `theta_a . theta'_b` over all splittings `w = b.a` (`b` from
/// the inner symbol, `a` from the outer). Both factors must know their
/// coefficients up to the requested length, so the result is truncated at
/// `min(max_len, inner.max_len, outer.max_len)`; leakage bounds add.
pub fn compose_symbols(
    outer: &MultiAnalyticSymbol,
    inner: &MultiAnalyticSymbol,
    max_len: usize,
) -> Result<MultiAnalyticSymbol> {
    if outer.d != inner.d {
        return Err(Error::DimensionMismatch(format!(
            "alphabet sizes differ: {} vs {}",
            outer.d, inner.d
        )));
    }
    if outer.dom_dim != inner.cod_dim {
        return Err(Error::DimensionMismatch(format!(
            "inner codomain {} does not match outer domain {}",
            inner.cod_dim, outer.dom_dim
        )));
    }
    let len = max_len.min(outer.max_len).min(inner.max_len);
    let basis = FockBasis::new(outer.d, len, 1)?;
    let mut out = MultiAnalyticSymbol::new(outer.d, len, inner.dom_dim, outer.cod_dim)?;
    for w in basis.words() {
        let mut acc = zeros(outer.cod_dim, inner.dom_dim);
        let mut any = false;
        for (prefix, suffix) in w.splittings() {
            if let (Some(tb), Some(ta)) = (inner.coeff(&prefix), outer.coeff(&suffix)) {
                acc = acc + ta.dot(tb);
                any = true;
            }
        }
        if any {
            out.set_coeff(w.clone(), acc)?;
        }
    }
    out.set_leakage(outer.leakage + inner.leakage);
    Ok(out)
}

/// Result of the symbol-equivalence test.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// The fitted unitary on the domains, present iff `equivalent`.
    pub unitary: Option<CMat>,
    /// `||S - S' v||_F` over the stacked coefficients.
    pub residual: f64,
    pub relative_residual: f64,
    /// The Procrustes fit was rank deficient and completed arbitrarily on
    /// the cokernel (cannot affect the residual test).
    pub rank_deficient: bool,
}

/// Tests whether `Theta = Theta' v` for a unitary `v` on the domain, by the
/// orthogonal-Procrustes fit over the stacked coefficient matrices.
/// Mismatched defect dimensions are immediately inequivalent.
pub fn symbols_equivalent(
    a: &MultiAnalyticSymbol,
    b: &MultiAnalyticSymbol,
    tol: f64,
) -> Result<EquivalenceReport> {
    if a.cod_dim != b.cod_dim || a.dom_dim != b.dom_dim || a.d != b.d {
        return Ok(EquivalenceReport {
            equivalent: false,
            unitary: None,
            residual: f64::INFINITY,
            relative_residual: f64::INFINITY,
            rank_deficient: false,
        });
    }
    let upto = a.max_len.min(b.max_len);
    let s = a.stacked(upto)?;
    let s_other = b.stacked(upto)?;
    let m = adj(&s_other).dot(&s);
    let (u, sv, vh) = svd_full(&m)?;
    let svmax = sv.first().copied().unwrap_or(0.0);
    let rank_deficient = sv.iter().any(|&x| x <= 1e-12 * svmax) || sv.len() < a.dom_dim;
    let v = u.dot(&vh);
    let residual = fro_norm(&(&s - &s_other.dot(&v)));
    let scale = fro_norm(&s);
    let relative_residual = if scale > 0.0 {
        residual / scale
    } else {
        residual
    };
    let equivalent = if scale > 0.0 {
        residual <= tol * scale
    } else {
        // both symbols vanish up to the compared length
        fro_norm(&s_other) <= tol
    };
    Ok(EquivalenceReport {
        equivalent,
        unitary: if equivalent { Some(v) } else { None },
        residual,
        relative_residual,
        rank_deficient,
    })
}

#[derive(Clone, Debug)]
pub struct InnerReport {
    pub is_inner: bool,
    /// Largest deviation of the truncated `M* M` from the identity on the
    /// domain where truncation is exact.
    pub defect: f64,
    /// `tol + leakage`, the widened acceptance threshold.
    pub allowance: f64,
}

/// Innerness test. The coefficient Gram blocks
/// `G_b = sum_a theta_(b.a)* theta_a` must vanish for nonempty `b` and
/// equal the identity for the empty word; this is `M* M = 1` evaluated on
/// the domain where truncation is exact.
pub fn is_inner(m: &MultiAnalyticSymbol, tol: f64) -> Result<InnerReport> {
    let grams = m.gram_blocks()?;
    let mut defect = 0.0f64;
    for (widx, g) in grams.iter().enumerate() {
        let mut g = g.clone();
        if widx == 0 {
            for k in 0..m.dom_dim {
                g[(k, k)] -= crate::linalg::c(1.0, 0.0);
            }
        }
        defect = defect.max(op_norm(&g));
    }
    let allowance = tol + m.leakage;
    Ok(InnerReport {
        is_inner: defect <= allowance,
        defect,
        allowance,
    })
}

/// Orthonormal basis of the range of the truncated block operator of an
/// inner symbol: the invariant subspace it describes.
pub fn invariant_subspace(m: &MultiAnalyticSymbol, tol: f64, cfg: &Tolerances) -> Result<CMat> {
    let rep = is_inner(m, tol)?;
    if !rep.is_inner {
        return Err(Error::NotInner { defect: rep.defect });
    }
    crate::linalg::orthonormal_range(&m.block_operator()?, cfg.rank_tol)
}

/// Truncated functional model data of a contractive symbol.
#[derive(Clone, Debug)]
pub struct FunctionalModel {
    /// `(1 - M* M)^(1/2)` on the truncated domain.
    pub delta: CMat,
    pub delta_rank: usize,
    /// Orthonormal columns spanning `range(delta)`.
    pub delta_factor: CMat,
    /// `delta . delta_factor = delta_factor . diag(delta_sigma)`.
    pub delta_sigma: Vec<f64>,
    /// Orthonormal basis (columns) of
    /// `[(Gamma_N (x) D_C) (+) range(delta)] (-) {Mx (+) delta x}`,
    /// the truncated model of the lifted space.
    pub model_basis: CMat,
    /// Dimension of the truncated `Gamma_N (x) D_C` block.
    pub cod_fock_dim: usize,
}

impl FunctionalModel {
    pub fn model_dim(&self) -> usize {
        self.model_basis.ncols()
    }
}

pub fn functional_model(m: &MultiAnalyticSymbol, cfg: &Tolerances) -> Result<FunctionalModel> {
    let mhat = m.block_operator()?;
    let dom_dim = mhat.ncols();
    let cod_dim = mhat.nrows();
    let mut gram = m.truncated_gram()?.mapv(|v| -v);
    for k in 0..dom_dim {
        gram[(k, k)] += crate::linalg::c(1.0, 0.0);
    }
    // 1 - M*M of a contractive symbol is PSD; negative eigenvalues here are
    // rounding plus the stored-coefficient tail
    let neg_tol = 1e-8_f64.max(10.0 * cfg.tol) + 2.0 * m.leakage;
    let root = psd_sqrt_factor(&gram, neg_tol, cfg.rank_tol)?;
    // W~ x = M x (+) delta x, an isometry of the truncated domain
    let mut delta_coords = adj(&root.factor); // rank x dom
    for (k, &s) in root.sigma.iter().enumerate() {
        delta_coords.row_mut(k).mapv_inplace(|v| v * s);
    }
    let wt = crate::linalg::vstack(&[&mhat, &delta_coords]);
    let model_basis = crate::linalg::nullspace(&adj(&wt), cfg.rank_tol)?;
    Ok(FunctionalModel {
        delta: root.sqrt,
        delta_rank: root.rank,
        delta_factor: root.factor,
        delta_sigma: root.sigma,
        model_basis,
        cod_fock_dim: cod_dim,
    })
}

/// A lifting reconstructed from a contractive symbol, with its truncation
/// diagnostics.
#[derive(Clone, Debug)]
pub struct SymbolLifting {
    pub lifting: Lifting,
    /// Largest residual of the defining relation `Y_i delta x = delta L_i x`
    /// on the truncated space.
    pub boundary_error: f64,
    pub model_dim: usize,
}

/// Builds the lifting associated to a contractive symbol into the defect
/// space of `C`: the compression of `V^C (+) Y` to
/// `H_C (+) ([(Gamma (x) D_C) (+) range(delta)] (-) graph of (M, delta))`,
/// where `Y_i` acts on `range(delta)` by `Y_i delta x = delta (L_i (x) 1) x`
/// (solved in the least-squares sense on the truncated space; vectors pushed
/// past the truncation boundary are dropped and counted in the reported
/// boundary error).
pub fn lifting_from_symbol(
    c: &RowContraction,
    m: &MultiAnalyticSymbol,
    max_len: usize,
    cfg: &Tolerances,
) -> Result<SymbolLifting> {
    let cd = defects(c, cfg)?;
    if m.cod_dim != cd.rank {
        return Err(Error::DefectDimMismatch {
            expected: cd.rank,
            got: m.cod_dim,
        });
    }
    if m.d != c.d() {
        return Err(Error::DimensionMismatch(format!(
            "symbol alphabet {} vs tuple size {}",
            m.d,
            c.d()
        )));
    }
    let work = m.truncated(max_len.min(m.max_len));
    let norm = work.norm()?;
    if norm > 1.0 + cfg.tol + work.leakage {
        return Err(Error::InvalidInput(format!(
            "symbol is not contractive: block operator norm {norm:.6}"
        )));
    }
    let len = work.max_len();
    let fm = functional_model(&work, cfg)?;
    let dom_basis = FockBasis::new(work.d, len, work.dom_dim)?;

    // Y_i on range(delta) coordinates
    let r = fm.delta_rank;
    let mut delta_coords = adj(&fm.delta_factor);
    for (k, &s) in fm.delta_sigma.iter().enumerate() {
        delta_coords.row_mut(k).mapv_inplace(|v| v * s);
    }
    let mut ys = Vec::with_capacity(work.d);
    let mut boundary_error = 0.0f64;
    for letter in 1..=work.d as u8 {
        let li = dom_basis.creation_matrix(letter)?;
        // Y_i = diag(sigma) Q* L_i Q diag(1/sigma)
        let mut y = adj(&fm.delta_factor).dot(&li).dot(&fm.delta_factor);
        for (row, &s) in fm.delta_sigma.iter().enumerate() {
            y.row_mut(row).mapv_inplace(|v| v * s);
        }
        for (col, &s) in fm.delta_sigma.iter().enumerate() {
            y.column_mut(col).mapv_inplace(|v| v / s);
        }
        let resid = op_norm(&(&y.dot(&delta_coords) - &delta_coords.dot(&li)));
        boundary_error = boundary_error.max(resid);
        ys.push(y);
    }
    // the defining relation makes the Y row isometric on range(delta), but
    // truncation can push it slightly past contractivity; renormalize and
    // count the drop in the boundary error
    if r > 0 {
        let mut row_gram = zeros(r, r);
        for y in &ys {
            row_gram = row_gram + y.dot(&adj(y));
        }
        let lam = crate::linalg::lambda_max_hermitian(&row_gram)?;
        if lam > 1.0 {
            let scale = 1.0 / lam.sqrt();
            for y in ys.iter_mut() {
                *y = y.mapv(|v| v * scale);
            }
            boundary_error = boundary_error.max(lam.sqrt() - 1.0);
        }
    }

    // ambient tuple V^C_i (+) Y_i and the model subspace
    let mid = schaeffer_mid(c, &cd, len)?;
    let p = c.dim();
    let model_dim = fm.model_dim();
    let total_model = p + model_dim;
    let ambient = mid.dim() + r;

    let mut q_model = zeros(ambient, total_model);
    for k in 0..p {
        q_model[(k, k)] = crate::linalg::c(1.0, 0.0);
    }
    q_model.slice_mut(s![p.., p..]).assign(&fm.model_basis);

    let mut e_ops = Vec::with_capacity(work.d);
    for (v_c, y) in mid.tuple.iter().zip(ys.iter()) {
        let v = crate::linalg::block_diag(v_c, y);
        e_ops.push(adj(&q_model).dot(&v).dot(&q_model));
    }

    // split the compressed tuple into lifting blocks; the upper-right block
    // vanishes because the model part never maps back into H_C
    let mut c_ops = Vec::with_capacity(work.d);
    let mut a_ops = Vec::with_capacity(work.d);
    let mut b_ops = Vec::with_capacity(work.d);
    for e in &e_ops {
        let c_blk = e.slice(s![..p, ..p]).to_owned();
        let ur = e.slice(s![..p, p..]).to_owned();
        if op_norm(&ur) > 1e-10 {
            return Err(Error::Backend(format!(
                "model compression produced a nonzero upper-right block ({:.3e})",
                op_norm(&ur)
            )));
        }
        c_ops.push(c_blk);
        a_ops.push(e.slice(s![p.., p..]).to_owned());
        b_ops.push(e.slice(s![p.., ..p]).to_owned());
    }
    // sanity: the compression restricted to H_C is C itself
    for (i, cb) in c_ops.iter().enumerate() {
        if fro_norm(&(cb - c.op(i))) > 1e-10 {
            return Err(Error::Backend(
                "model compression did not reproduce C on H_C".into(),
            ));
        }
    }
    let a = RowContraction::new(a_ops, cfg.tol.max(1e-10) * 10.0)?;
    let lifting = Lifting::new(c.clone(), a, b_ops, cfg.tol.max(1e-10) * 10.0)?;
    Ok(SymbolLifting {
        lifting,
        boundary_error,
        model_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::lifting_from_gamma;
    use crate::linalg::{c, eye};

    fn cfg() -> Tolerances {
        Tolerances::default()
    }

    fn scalar_rc(vals: &[f64]) -> RowContraction {
        let ops = vals.iter().map(|&v| array![[c(v, 0.0)]]).collect();
        RowContraction::new(ops, 1e-12).unwrap()
    }

    fn sphere_lifting() -> Lifting {
        let cc = scalar_rc(&[1.0, 0.0]);
        let aa = scalar_rc(&[0.0, 0.0]);
        let gamma = array![[c(1.0, 0.0)]];
        lifting_from_gamma(&cc, &aa, &gamma, &cfg()).unwrap()
    }

    #[test]
    fn trivial_lifting_gives_identity_symbol() {
        let cc = scalar_rc(&[0.6, 0.3]);
        let aa = RowContraction::zero(2, 0);
        let cd = defects(&cc, &cfg()).unwrap();
        let gamma = zeros(cd.rank, 0);
        let l = lifting_from_gamma(&cc, &aa, &gamma, &cfg()).unwrap();
        let sym = char_symbol(&l, 3, &cfg()).unwrap();
        assert_eq!(sym.dom_dim(), sym.cod_dim());
        let vac = sym.coeff_or_zero(&Word::empty());
        assert!(fro_norm(&(&vac - &eye(sym.cod_dim()))) < 1e-10);
        for (w, theta) in sym.coeffs() {
            if !w.is_empty() {
                assert!(fro_norm(theta) < 1e-12);
            }
        }
        assert!(sym.leakage() < 1e-12);
    }

    #[test]
    fn popescu_shift_symbol_for_zero() {
        // A = 0 scalar, d = 1: theta_empty = 0, theta_(1) = 1
        let a = scalar_rc(&[0.0]);
        let sym = popescu_char_fn(&a, 3, &cfg()).unwrap();
        assert!(fro_norm(&sym.coeff_or_zero(&Word::empty())) < 1e-12);
        let w1 = Word::new(&[1], 1).unwrap();
        assert!((sym.coeff_or_zero(&w1)[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn popescu_scalar_matches_moebius_expansion() {
        // theta(z) = (-a + z) / (1 - a z) = -a + (1 - a^2) sum_k a^k z^(k+1)
        let aval = 0.6;
        let a = scalar_rc(&[aval]);
        let n = 6;
        let sym = popescu_char_fn(&a, n, &cfg()).unwrap();
        let vac = sym.coeff_or_zero(&Word::empty())[(0, 0)];
        assert!((vac.re + aval).abs() < 1e-12, "vacuum {vac}");
        for k in 1..=n {
            let w = Word::new(&vec![1u8; k], 1).unwrap();
            let got = sym.coeff_or_zero(&w)[(0, 0)].re;
            let expect = (1.0 - aval * aval) * aval.powi(k as i32 - 1);
            assert!(
                (got - expect).abs() < 1e-12,
                "coefficient {k}: {got} vs {expect}"
            );
        }
        // its truncated block operator converges to an isometry
        let rep = is_inner(&sym, 1e-9).unwrap();
        assert!(rep.defect <= rep.allowance + 1e-12);
    }

    #[test]
    fn popescu_rejects_non_cnc() {
        let a = scalar_rc(&[1.0]);
        assert!(matches!(
            popescu_char_fn(&a, 3, &cfg()),
            Err(Error::NotCnc { .. })
        ));
    }

    #[test]
    fn sphere_symbol_is_inner() {
        let l = sphere_lifting();
        let sym = char_symbol(&l, 5, &cfg()).unwrap();
        let rep = is_inner(&sym, 1e-9).unwrap();
        assert!(
            rep.is_inner,
            "defect {} allowance {}",
            rep.defect, rep.allowance
        );
        // A = 0 means zero leakage
        assert!(sym.leakage() < 1e-12);
    }

    #[test]
    fn strictly_contractive_gamma_symbol_not_inner() {
        let cc = scalar_rc(&[1.0, 0.0]);
        let aa = scalar_rc(&[0.0, 0.0]);
        let gamma = array![[c(0.5, 0.0)]];
        let l = lifting_from_gamma(&cc, &aa, &gamma, &cfg()).unwrap();
        let sym = char_symbol(&l, 5, &cfg()).unwrap();
        let rep = is_inner(&sym, 1e-9).unwrap();
        assert!(!rep.is_inner);
        assert!(rep.defect > 0.1);
    }

    #[test]
    fn identity_symbol_block_operator() {
        let sym = MultiAnalyticSymbol::identity(2, 2, 3).unwrap();
        let m = sym.block_operator().unwrap();
        assert!(fro_norm(&(&m - &eye(7 * 3))) < 1e-14);
        let rep = is_inner(&sym, 1e-12).unwrap();
        assert!(rep.is_inner);
        assert!(rep.defect < 1e-14);
    }

    #[test]
    fn block_operator_intertwines_creation() {
        // multi-analyticity on the truncated space: M (L_i (x) 1) agrees
        // with (L_i (x) 1) M below the boundary
        let l = sphere_lifting();
        let n = 4;
        let sym = char_symbol(&l, n, &cfg()).unwrap();
        let m = sym.block_operator().unwrap();
        let dom = FockBasis::new(2, n, sym.dom_dim()).unwrap();
        let cod = FockBasis::new(2, n, sym.cod_dim()).unwrap();
        for letter in 1..=2u8 {
            let li_dom = dom.creation_matrix(letter).unwrap();
            let li_cod = cod.creation_matrix(letter).unwrap();
            let diff = m.dot(&li_dom) - li_cod.dot(&m);
            // rows below the top level must agree exactly
            let below = cod.level_offset(n) * cod.mult();
            let sub = diff.slice(s![..below, ..]).to_owned();
            assert!(fro_norm(&sub) < 1e-12);
        }
    }

    #[test]
    fn compose_with_identity_and_zero() {
        let l = sphere_lifting();
        let sym = char_symbol(&l, 4, &cfg()).unwrap();
        let id = MultiAnalyticSymbol::identity(2, 4, sym.dom_dim()).unwrap();
        let composed = compose_symbols(&sym, &id, 4).unwrap();
        for (w, theta) in sym.coeffs() {
            assert!(fro_norm(&(theta - &composed.coeff_or_zero(w))) < 1e-13);
        }
        let zero = MultiAnalyticSymbol::new(2, 4, 3, sym.dom_dim()).unwrap();
        let composed = compose_symbols(&sym, &zero, 4).unwrap();
        for (_, theta) in composed.coeffs() {
            assert!(fro_norm(theta) < 1e-14);
        }
    }

    #[test]
    fn compose_dimension_mismatch() {
        let a = MultiAnalyticSymbol::identity(2, 3, 2).unwrap();
        let b = MultiAnalyticSymbol::identity(2, 3, 3).unwrap();
        assert!(matches!(
            compose_symbols(&a, &b, 3),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn equivalence_reflexive_and_unitary_gauge() {
        let l = sphere_lifting();
        let sym = char_symbol(&l, 4, &cfg()).unwrap();
        let rep = symbols_equivalent(&sym, &sym, 1e-10).unwrap();
        assert!(rep.equivalent);
        assert!(rep.residual < 1e-14);
        let v = rep.unitary.unwrap();
        assert!(fro_norm(&(&v - &eye(sym.dom_dim()))) < 1e-10);
    }

    #[test]
    fn equivalence_dimension_mismatch_is_inequivalent() {
        let a = MultiAnalyticSymbol::identity(2, 3, 2).unwrap();
        let b = MultiAnalyticSymbol::identity(2, 3, 3).unwrap();
        let rep = symbols_equivalent(&a, &b, 1e-9).unwrap();
        assert!(!rep.equivalent);
        assert!(rep.unitary.is_none());
    }

    #[test]
    fn invariant_subspace_of_shift_symbol() {
        // d = 1 shift: theta_(1) = 1; range is levels >= 1
        let mut sym = MultiAnalyticSymbol::new(1, 3, 1, 1).unwrap();
        sym.set_coeff(Word::new(&[1], 1).unwrap(), eye(1)).unwrap();
        let basis = invariant_subspace(&sym, 1e-9, &cfg()).unwrap();
        assert_eq!(basis.ncols(), 3); // levels 1..3 of a 4-dim truncation
        for col in 0..basis.ncols() {
            assert!(basis[(0, col)].norm() < 1e-12, "vacuum must not appear");
        }
        // identity symbol spans everything
        let id = MultiAnalyticSymbol::identity(1, 3, 1).unwrap();
        let basis = invariant_subspace(&id, 1e-9, &cfg()).unwrap();
        assert_eq!(basis.ncols(), 4);
    }

    #[test]
    fn invariant_subspace_rejects_non_inner() {
        let mut sym = MultiAnalyticSymbol::new(1, 3, 1, 1).unwrap();
        sym.set_coeff(Word::new(&[1], 1).unwrap(), array![[c(0.5, 0.0)]])
            .unwrap();
        assert!(matches!(
            invariant_subspace(&sym, 1e-9, &cfg()),
            Err(Error::NotInner { .. })
        ));
    }

    #[test]
    fn functional_model_of_inner_and_zero_symbols() {
        // inner symbol: delta vanishes
        let l = sphere_lifting();
        let sym = char_symbol(&l, 4, &cfg()).unwrap();
        let fm = functional_model(&sym, &cfg()).unwrap();
        assert_eq!(fm.delta_rank, 0);
        assert!(op_norm(&fm.delta) < 1e-7);

        // zero symbol: delta = 1 and the model is the whole codomain block
        let zero = MultiAnalyticSymbol::new(2, 2, 1, 1).unwrap();
        let fm = functional_model(&zero, &cfg()).unwrap();
        assert_eq!(fm.delta_rank, 7);
        assert!(fro_norm(&(&fm.delta - &eye(7))) < 1e-12);
        assert_eq!(fm.model_dim(), 7);
    }

    #[test]
    fn lifting_from_identity_symbol_is_c_itself() {
        let cc = scalar_rc(&[0.6, 0.3]);
        let cd = defects(&cc, &cfg()).unwrap();
        let id = MultiAnalyticSymbol::identity(2, 4, cd.rank).unwrap();
        let out = lifting_from_symbol(&cc, &id, 4, &cfg()).unwrap();
        assert_eq!(out.model_dim, 0);
        assert_eq!(out.lifting.dim_a(), 0);
        assert!(fro_norm(&(out.lifting.e().op(0) - cc.op(0))) < 1e-10);
        assert!(out.boundary_error < 1e-12);
    }

    #[test]
    fn lifting_from_constant_contractive_symbol_is_reduced() {
        let cc = scalar_rc(&[1.0, 0.0]);
        let cd = defects(&cc, &cfg()).unwrap();
        let mut sym = MultiAnalyticSymbol::new(2, 4, cd.rank, cd.rank).unwrap();
        sym.set_coeff(Word::empty(), array![[c(0.5, 0.0)]]).unwrap();
        let out = lifting_from_symbol(&cc, &sym, 4, &cfg()).unwrap();
        let rep = is_reduced(&out.lifting, &cfg()).unwrap();
        assert!(rep.is_reduced);
        assert!(out.model_dim > 0);
    }
}
