//! Seeded random instance generators for the property suites.
//!
//! Everything is driven by a `ChaCha8Rng` so that suites are reproducible
//! from a single seed. Strictly contractive tuples are produced by scaling
//! a Gaussian tuple to a prescribed row norm, which keeps all defect
//! operators well conditioned.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lifting::{lifting_from_gamma, Lifting};
use crate::linalg::{adj, c, op_norm, svd_full, zeros, CMat};
use crate::rowcon::{defects, RowContraction, Tolerances};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    let mut out = zeros(rows, cols);
    for v in out.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v = c(re, im);
    }
    out
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    crate::linalg::closest_unitary(&complex_gaussian(rng, n, n)).expect("polar factor")
}

/// Random isometry (`rows >= cols`, orthonormal columns).
pub fn random_isometry(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    assert!(rows >= cols, "isometry needs rows >= cols");
    if cols == 0 {
        return zeros(rows, 0);
    }
    let g = complex_gaussian(rng, rows, cols);
    let (u, _, vh) = svd_full(&g).expect("svd");
    u.slice(ndarray::s![.., ..cols]).dot(&vh)
}

/// Random matrix scaled to the prescribed operator norm.
pub fn random_with_norm(rng: &mut ChaCha8Rng, rows: usize, cols: usize, norm: f64) -> CMat {
    let g = complex_gaussian(rng, rows, cols);
    let s = op_norm(&g);
    if s == 0.0 {
        return g;
    }
    g.mapv(|v| v * (norm / s))
}

/// Random tuple scaled so that `lambda_max(sum T_i T_i*)` equals `target`.
pub fn random_row_contraction(
    rng: &mut ChaCha8Rng,
    d: usize,
    dim: usize,
    target: f64,
) -> RowContraction {
    let ops: Vec<CMat> = (0..d).map(|_| complex_gaussian(rng, dim, dim)).collect();
    let mut gram = zeros(dim, dim);
    for t in &ops {
        gram = gram + t.dot(&adj(t));
    }
    let lam = crate::linalg::lambda_max_hermitian(&gram).expect("eigh");
    let scale = if lam > 0.0 {
        (target / lam).sqrt()
    } else {
        0.0
    };
    RowContraction::new(
        ops.into_iter().map(|t| t.mapv(|v| v * scale)).collect(),
        1e-9,
    )
    .expect("scaled tuple is a contraction")
}

/// Random coisometric tuple: the polar factor of a Gaussian row operator.
pub fn random_coisometric(rng: &mut ChaCha8Rng, d: usize, dim: usize) -> RowContraction {
    let g = complex_gaussian(rng, dim, d * dim);
    let (u, _, vh) = svd_full(&g).expect("svd");
    let row = u.dot(&vh.slice(ndarray::s![..dim, ..]));
    let ops: Vec<CMat> = (0..d)
        .map(|i| {
            row.slice(ndarray::s![.., i * dim..(i + 1) * dim])
                .to_owned()
        })
        .collect();
    RowContraction::new(ops, 1e-9).expect("polar factor is coisometric")
}

/// A non-star-stable tuple: block direct sum of a coisometric part and a
/// strictly contractive part.
pub fn random_non_star_stable(
    rng: &mut ChaCha8Rng,
    d: usize,
    dim_iso: usize,
    dim_strict: usize,
    strict_norm: f64,
) -> RowContraction {
    let iso = random_coisometric(rng, d, dim_iso);
    let strict = random_row_contraction(rng, d, dim_strict, strict_norm);
    let ops: Vec<CMat> = (0..d)
        .map(|i| crate::linalg::block_diag(iso.op(i), strict.op(i)))
        .collect();
    RowContraction::new(ops, 1e-9).expect("direct sum of contractions")
}

/// Random subisometric lifting: strictly contractive `A` (hence star-stable)
/// embedded by a random isometric `gamma`. Requires
/// `rank(D_*,A) = q <= rank(D_C)`, which holds for strictly contractive `C`
/// whenever `q <= d*p`.
pub fn random_subisometric_lifting(
    rng: &mut ChaCha8Rng,
    d: usize,
    p: usize,
    q: usize,
    c_target: f64,
    a_target: f64,
) -> Lifting {
    let cfg = Tolerances::default();
    let cc = random_row_contraction(rng, d, p, c_target);
    let aa = random_row_contraction(rng, d, q, a_target);
    let cd = defects(&cc, &cfg).expect("defects of C");
    let ad = defects(&aa, &cfg).expect("defects of A");
    assert!(ad.rank_star <= cd.rank, "defect ranks admit no isometry");
    let gamma = random_isometry(rng, cd.rank, ad.rank_star);
    lifting_from_gamma(&cc, &aa, &gamma, &cfg).expect("subisometric lifting")
}

/// Random coisometric lifting of a coisometric `C`. With `star_stable_a`
/// the `A` part is strictly contractive; otherwise it contains a coisometric
/// direct summand and is not star-stable. Requires `q <= p*(d-1)` so that an
/// isometric `gamma` exists.
pub fn random_coisometric_lifting(
    rng: &mut ChaCha8Rng,
    d: usize,
    p: usize,
    q: usize,
    star_stable_a: bool,
) -> Lifting {
    let cfg = Tolerances::default();
    let cc = random_coisometric(rng, d, p);
    let a_norm = 0.3 + 0.5 * rng.random::<f64>();
    let aa = if star_stable_a {
        random_row_contraction(rng, d, q, a_norm)
    } else {
        assert!(q >= 2, "non-star-stable A needs dimension at least 2");
        random_non_star_stable(rng, d, 1, q - 1, a_norm)
    };
    let cd = defects(&cc, &cfg).expect("defects of C");
    let ad = defects(&aa, &cfg).expect("defects of A");
    assert!(
        ad.rank_star <= cd.rank,
        "defect ranks admit no isometry ({} > {})",
        ad.rank_star,
        cd.rank
    );
    let gamma = random_isometry(rng, cd.rank, ad.rank_star);
    lifting_from_gamma(&cc, &aa, &gamma, &cfg).expect("coisometric lifting")
}

/// Random reduced lifting: strictly contractive `A` (c.n.c.) with an
/// injective contractive `gamma` scaled by `gamma_scale <= 1`.
pub fn random_reduced_lifting(
    rng: &mut ChaCha8Rng,
    d: usize,
    p: usize,
    q: usize,
    gamma_scale: f64,
) -> Lifting {
    let cfg = Tolerances::default();
    let c_norm = 0.4 + 0.5 * rng.random::<f64>();
    let a_norm = 0.3 + 0.5 * rng.random::<f64>();
    let cc = random_row_contraction(rng, d, p, c_norm);
    let aa = random_row_contraction(rng, d, q, a_norm);
    let cd = defects(&cc, &cfg).expect("defects of C");
    let ad = defects(&aa, &cfg).expect("defects of A");
    assert!(ad.rank_star <= cd.rank);
    let gamma = random_isometry(rng, cd.rank, ad.rank_star).mapv(|v| v * gamma_scale);
    lifting_from_gamma(&cc, &aa, &gamma, &cfg).expect("reduced lifting")
}

/// Random contractive block-lower-triangular tuple, built by zeroing the
/// upper-right blocks of a Gaussian tuple and scaling the whole row to
/// `target`.
pub fn random_blt_contraction(
    rng: &mut ChaCha8Rng,
    d: usize,
    p: usize,
    q: usize,
    target: f64,
) -> Lifting {
    let n = p + q;
    let mut ops: Vec<CMat> = (0..d).map(|_| complex_gaussian(rng, n, n)).collect();
    for t in ops.iter_mut() {
        t.slice_mut(ndarray::s![..p, p..]).fill(c(0.0, 0.0));
    }
    let mut gram = zeros(n, n);
    for t in &ops {
        gram = gram + t.dot(&adj(t));
    }
    let lam = crate::linalg::lambda_max_hermitian(&gram).expect("eigh");
    let scale = (target / lam).sqrt();
    let c_ops: Vec<CMat> = ops
        .iter()
        .map(|t| t.slice(ndarray::s![..p, ..p]).mapv(|v| v * scale))
        .collect();
    let a_ops: Vec<CMat> = ops
        .iter()
        .map(|t| t.slice(ndarray::s![p.., p..]).mapv(|v| v * scale))
        .collect();
    let b_ops: Vec<CMat> = ops
        .iter()
        .map(|t| t.slice(ndarray::s![p.., ..p]).mapv(|v| v * scale))
        .collect();
    let cc = RowContraction::new(c_ops, 1e-9).expect("C block of a contraction");
    let aa = RowContraction::new(a_ops, 1e-9).expect("A block of a contraction");
    Lifting::new(cc, aa, b_ops, 1e-9).expect("scaled block triangular tuple")
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    crate::linalg::hermitian_part(&complex_gaussian(rng, n, n))
}

/// Random density matrix (PSD, trace one).
pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let g = complex_gaussian(rng, n, n);
    let p = g.dot(&adj(&g));
    let tr: f64 = p.diag().iter().map(|v| v.re).sum();
    p.mapv(|v| v / tr)
}
