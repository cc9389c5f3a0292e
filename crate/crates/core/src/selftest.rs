//! Randomized property suites behind the `selftest` command.
//!
//! Each suite draws its instances from a seeded generator, so a fixed seed
//! reproduces the exact run. A suite reports its trial count, the number of
//! failures, and a short description of the first failure it saw.

use ndarray::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::charfunc::{char_symbol, compose_symbols, is_inner, symbols_equivalent};
use crate::cpmaps::{
    fixed_points, is_ergodic, kappa, kappa_inverse, moment_matrix, subisometric_equivalences, CPMap,
};
use crate::lifting::{
    gamma_from_lifting, invariant_kernel_dim, is_coisometric_lifting, lifting_from_gamma,
    resolving_report, Lifting,
};
use crate::linalg::{adj, eigh_ascending, fro_norm, nullspace, op_norm, zeros, CMat};
use crate::rowcon::{
    defects, is_star_stable, validate_row_contraction, wold_data, RowContraction, Tolerances,
};
use crate::testgen::{
    complex_gaussian, random_blt_contraction, random_coisometric, random_coisometric_lifting,
    random_hermitian, random_isometry, random_non_star_stable, random_reduced_lifting,
    random_row_contraction, random_subisometric_lifting, random_unitary, rng,
};
use crate::Verdict;

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub detail: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Recorder {
    name: &'static str,
    trials: usize,
    failures: usize,
    detail: String,
}

impl Recorder {
    fn new(name: &'static str) -> Self {
        Recorder {
            name,
            trials: 0,
            failures: 0,
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.detail.is_empty() {
                self.detail = detail();
            }
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            trials: self.trials,
            failures: self.failures,
            detail: self.detail,
        }
    }
}

fn cfg() -> Tolerances {
    Tolerances::default()
}

/// Forward direction of the gamma parametrization: every lifting assembled
/// from a contractive gamma is a row contraction.
pub fn suite_gamma_forward(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("gamma-parametrization-forward");
    let tol = cfg();
    for _ in 0..trials {
        let d = r.random_range(1..=3usize);
        let p = r.random_range(1..=3usize);
        let q = r.random_range(1..=3usize.min(d * p));
        let c_norm = 0.3 + 0.65 * r.random::<f64>();
        let a_norm = 0.3 + 0.65 * r.random::<f64>();
        let cc = random_row_contraction(r, d, p, c_norm);
        let aa = random_row_contraction(r, d, q, a_norm);
        let cd = defects(&cc, &tol).expect("defects");
        let ad = defects(&aa, &tol).expect("defects");
        let scale = r.random::<f64>();
        let gamma = random_isometry(r, cd.rank, ad.rank_star).mapv(|v| v * scale);
        match lifting_from_gamma(&cc, &aa, &gamma, &tol) {
            Ok(l) => {
                let rep = validate_row_contraction(l.e().ops(), 1e-10).expect("validate");
                rec.check(rep.lambda_max <= 1.0 + 1e-10, || {
                    format!("lambda_max = {:.3e}", rep.lambda_max)
                });
            }
            Err(e) => rec.check(false, || format!("assembly failed: {e}")),
        }
    }
    rec.finish()
}

/// Converse direction: every block-lower-triangular contraction yields a
/// contractive gamma with a small reconstruction residual.
pub fn suite_gamma_converse(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("gamma-parametrization-converse");
    let tol = cfg();
    for _ in 0..trials {
        let d = r.random_range(1..=3usize);
        let p = r.random_range(1..=3usize);
        let q = r.random_range(1..=3usize);
        let target = 0.2 + 0.75 * r.random::<f64>();
        let l = random_blt_contraction(r, d, p, q, target);
        match gamma_from_lifting(&l, &tol) {
            Ok(g) => rec.check(g.norm <= 1.0 + 1e-8 && g.residual <= 1e-8, || {
                format!("norm = {:.3e}, residual = {:.3e}", g.norm, g.residual)
            }),
            Err(e) => rec.check(false, || format!("extraction failed: {e}")),
        }
    }
    rec.finish()
}

/// Coisometric liftings correspond to isometries, and distinct isometries
/// give distinct B blocks.
pub fn suite_coisometric_parametrization(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("coisometric-parametrization");
    let tol = cfg();
    for _ in 0..trials {
        let d = r.random_range(2..=3usize);
        let p = r.random_range(1..=3usize);
        let q = r.random_range(1..=(p * (d - 1)).min(3));
        let l = random_coisometric_lifting(r, d, p, q, true);
        let coiso = is_coisometric_lifting(&l, 1e-8);
        let g = gamma_from_lifting(&l, &tol);
        match g {
            Ok(g) => {
                rec.check(coiso.is_coisometric && g.isometry_defect <= 1e-8, || {
                    format!(
                        "coisometric: {}, ||g*g - 1|| = {:.3e}",
                        coiso.is_coisometric, g.isometry_defect
                    )
                });
            }
            Err(e) => rec.check(false, || format!("extraction failed: {e}")),
        }
        // distinct gamma must give distinct B
        let cc = l.c().clone();
        let aa = l.a().clone();
        let cd = defects(&cc, &tol).expect("defects");
        let ad = defects(&aa, &tol).expect("defects");
        let g1 = random_isometry(r, cd.rank, ad.rank_star);
        let g2 = random_isometry(r, cd.rank, ad.rank_star);
        if op_norm(&(&g1 - &g2)) > 1e-6 {
            let l1 = lifting_from_gamma(&cc, &aa, &g1, &tol).expect("lift");
            let l2 = lifting_from_gamma(&cc, &aa, &g2, &tol).expect("lift");
            let diff: f64 = l1
                .b()
                .iter()
                .zip(l2.b().iter())
                .map(|(x, y)| fro_norm(&(x - y)))
                .sum();
            rec.check(diff > 1e-8, || "distinct gammas gave equal B".into());
        }
    }
    rec.finish()
}

/// The subspace-iteration resolving test against a brute-force word oracle.
pub fn suite_resolving_exactness(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("resolving-exactness");
    let tol = cfg();
    for _ in 0..trials {
        let d = r.random_range(1..=3usize);
        let q = r.random_range(1..=4usize);
        // mix of plain contractions and tuples with a coisometric summand
        let a_norm = 0.3 + 0.6 * r.random::<f64>();
        let aa = if q >= 2 && r.random::<bool>() {
            random_non_star_stable(r, d, 1, q - 1, 0.6)
        } else {
            random_row_contraction(r, d, q, a_norm)
        };
        let ad = defects(&aa, &tol).expect("defects");
        let wold = wold_data(&aa, &tol).expect("wold");
        // random gamma, sometimes rank deficient
        let rank_c = ad.rank_star + r.random_range(0..=1usize);
        let mut gamma = complex_gaussian(r, rank_c, ad.rank_star);
        if ad.rank_star > 0 && r.random::<bool>() {
            gamma.column_mut(0).fill(crate::linalg::c(0.0, 0.0));
        }
        let n = op_norm(&gamma);
        if n > 0.0 {
            gamma = gamma.mapv(|v| v * (0.9 / n));
        }

        let rep = resolving_report(&gamma, &aa, &ad, &wold, &tol).expect("resolving");
        // brute force: stack gamma D_*A A_w* over all words up to length q
        let basis = crate::fock::FockBasis::new(d, q, 1).expect("basis");
        let adjoints = aa.word_adjoints(&basis);
        let gd = gamma.dot(&ad.star_coords());
        let stacked_rows: Vec<CMat> = adjoints.iter().map(|m| gd.dot(m)).collect();
        let refs: Vec<&CMat> = stacked_rows.iter().collect();
        let stacked = crate::linalg::vstack(&refs);
        let bf_kernel = nullspace(&stacked, tol.rank_tol).expect("nullspace");

        let dims_match = bf_kernel.ncols() == rep.kernel_basis.ncols();
        let proj_dist = if dims_match && bf_kernel.ncols() > 0 {
            let p1 = bf_kernel.dot(&adj(&bf_kernel));
            let p2 = rep.kernel_basis.dot(&adj(&rep.kernel_basis));
            op_norm(&(&p1 - &p2))
        } else {
            0.0
        };
        rec.check(dims_match && proj_dist <= 1e-7, || {
            format!(
                "iteration dim {} vs brute force {} (projection distance {:.3e})",
                rep.kernel_basis.ncols(),
                bf_kernel.ncols(),
                proj_dist
            )
        });
        // consistency: resolving iff invariant kernel inside H1
        let kd = invariant_kernel_dim(&gamma, &aa, &ad, &tol).expect("kernel");
        rec.check(kd == rep.kernel_basis.ncols(), || {
            "kernel dim mismatch".into()
        });
    }
    rec.finish()
}

/// Factorization of characteristic functions over two-step reduced liftings.
pub fn suite_factorization(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("symbol-factorization");
    let tol = cfg();
    let n = 4;
    for _ in 0..trials {
        let d = r.random_range(1..=2usize);
        let p = r.random_range(1..=2usize);
        let q = r.random_range(1..=(d * p).min(2));
        let q2 = 1usize;
        let step1_scale = 0.6 + 0.4 * r.random::<f64>();
        let step1 = random_reduced_lifting(r, d, p, q, step1_scale);
        // second step: reduced lifting of the assembled tuple
        let e = step1.e().clone();
        let ed = defects(&e, &tol).expect("defects");
        let aa2_norm = 0.3 + 0.5 * r.random::<f64>();
        let aa2 = random_row_contraction(r, d, q2, aa2_norm);
        let ad2 = defects(&aa2, &tol).expect("defects");
        if ad2.rank_star > ed.rank {
            continue;
        }
        let gamma2 = random_isometry(r, ed.rank, ad2.rank_star).mapv(|v| v * 0.8);
        let step2 = match lifting_from_gamma(&e, &aa2, &gamma2, &tol) {
            Ok(l) => l,
            Err(_) => continue,
        };
        // the composite lifting of C by (A (+) A~)
        let pq = p + q;
        let total = pq + q2;
        let composite_ops: Vec<CMat> = (0..d)
            .map(|i| {
                let mut m = zeros(total, total);
                m.slice_mut(s![..pq, ..pq]).assign(step1.e().op(i));
                let low = step2.b()[i].clone();
                m.slice_mut(s![pq.., ..pq]).assign(&low);
                m.slice_mut(s![pq.., pq..]).assign(step2.a().op(i));
                m
            })
            .collect();
        let comp_c = step1.c().clone();
        let comp_a_ops: Vec<CMat> = composite_ops
            .iter()
            .map(|m| m.slice(s![p.., p..]).to_owned())
            .collect();
        let comp_b: Vec<CMat> = composite_ops
            .iter()
            .map(|m| m.slice(s![p.., ..p]).to_owned())
            .collect();
        let comp_a = match RowContraction::new(comp_a_ops, 1e-9) {
            Ok(a) => a,
            Err(_) => continue,
        };
        let composite = match Lifting::new(comp_c, comp_a, comp_b, 1e-9) {
            Ok(l) => l,
            Err(_) => continue,
        };

        let m_outer = char_symbol(&step1, n, &tol);
        let m_inner = char_symbol(&step2, n, &tol);
        let m_full = char_symbol(&composite, n, &tol);
        match (m_outer, m_inner, m_full) {
            (Ok(mo), Ok(mi), Ok(mf)) => {
                let conv = compose_symbols(&mo, &mi, n).expect("compose");
                let mut worst = 0.0f64;
                let basis = crate::fock::FockBasis::new(d, n, 1).expect("basis");
                for w in basis.words() {
                    let diff = fro_norm(&(&mf.coeff_or_zero(w) - &conv.coeff_or_zero(w)));
                    worst = worst.max(diff);
                }
                rec.check(worst <= 1e-8, || format!("coefficient gap {worst:.3e}"));
            }
            _ => rec.check(false, || "symbol computation failed".into()),
        }
    }
    rec.finish()
}

/// Unitarily conjugated liftings give equivalent symbols; deformed gammas
/// give inequivalent ones.
pub fn suite_symbol_equivalence(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("symbol-equivalence");
    let tol = cfg();
    let n = 4;
    for _ in 0..trials {
        let d = r.random_range(1..=2usize);
        let p = r.random_range(1..=2usize);
        let q = r.random_range(1..=(d * p).min(2));
        let c_norm = 0.5 + 0.4 * r.random::<f64>();
        let l = random_subisometric_lifting(r, d, p, q, c_norm, 0.4);
        let sym = match char_symbol(&l, n, &tol) {
            Ok(s) => s,
            Err(_) => {
                rec.check(false, || "symbol of subisometric lifting failed".into());
                continue;
            }
        };
        // conjugate by a unitary fixing H_C
        let u = random_unitary(r, q);
        let a2_ops: Vec<CMat> = l.a().ops().iter().map(|m| u.dot(m).dot(&adj(&u))).collect();
        let b2: Vec<CMat> = l.b().iter().map(|m| u.dot(m)).collect();
        let a2 = RowContraction::new(a2_ops, 1e-9).expect("conjugated A");
        let l2 = Lifting::new(l.c().clone(), a2, b2, 1e-9).expect("conjugated lifting");
        let sym2 = char_symbol(&l2, n, &tol).expect("conjugated symbol");
        let eq = symbols_equivalent(&sym, &sym2, 1e-8).expect("equiv");
        rec.check(eq.equivalent && eq.residual <= 1e-8, || {
            format!("conjugated residual {:.3e}", eq.residual)
        });

        // a genuine deformation: rescale gamma by 0.9
        let g = gamma_from_lifting(&l, &tol).expect("gamma");
        let deformed = lifting_from_gamma(l.c(), l.a(), &g.gamma.mapv(|v| v * 0.9), &tol)
            .expect("deformed lifting");
        let sym3 = char_symbol(&deformed, n, &tol).expect("deformed symbol");
        let eq = symbols_equivalent(&sym, &sym3, 1e-8).expect("equiv");
        rec.check(!eq.equivalent && eq.residual > 1e-3, || {
            format!("deformed residual {:.3e}", eq.residual)
        });
    }
    rec.finish()
}

/// Symbols of subisometric liftings are inner within the leakage allowance.
pub fn suite_inner_symbols(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("inner-symbols");
    let tol = cfg();
    for _ in 0..trials {
        let d = r.random_range(1..=2usize);
        let p = r.random_range(1..=2usize);
        let q = r.random_range(1..=(d * p).min(2));
        let l = random_subisometric_lifting(r, d, p, q, 0.6, 0.3);
        match char_symbol(&l, 6, &tol) {
            Ok(sym) => {
                let rep = is_inner(&sym, 1e-9).expect("inner test");
                rec.check(rep.is_inner, || {
                    format!(
                        "defect {:.3e} > allowance {:.3e}",
                        rep.defect, rep.allowance
                    )
                });
            }
            Err(e) => rec.check(false, || format!("symbol failed: {e}")),
        }
    }
    rec.finish()
}

/// Four-way agreement for coisometric liftings, and the isometric
/// fixed-point correspondence when they hold.
pub fn suite_fixed_point_correspondence(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("fixed-point-correspondence");
    let tol = cfg();
    for k in 0..trials {
        let d = r.random_range(2..=3usize);
        let p = r.random_range(1..=3usize);
        let stable = k % 2 == 0;
        let q = if stable {
            r.random_range(1..=(p * (d - 1)).min(3))
        } else {
            let hi = (p * (d - 1)).min(3);
            if hi < 2 {
                continue;
            }
            r.random_range(2..=hi)
        };
        let l = random_coisometric_lifting(r, d, p, q, stable);
        let rep = match subisometric_equivalences(&l, &tol) {
            Ok(rep) => rep,
            Err(e) => {
                rec.check(false, || format!("report failed: {e}"));
                continue;
            }
        };
        rec.check(rep.all_agree, || {
            format!(
                "disagreement: sub={} stable={} pc={} fixed={}",
                rep.subisometric,
                rep.a_star_stable,
                rep.pc_iterates_to_identity,
                rep.fixed_points_isomorphic
            )
        });
        if rep.subisometric == Verdict::True {
            rec.check(rep.dim_fixed_e == rep.dim_fixed_c, || {
                format!("fixed dims {} vs {}", rep.dim_fixed_e, rep.dim_fixed_c)
            });
            // kappa is isometric on selfadjoint fixed points and inverts
            let phi_e = CPMap::new(l.e().clone());
            let p_c = l.p_c();
            let fixed = fixed_points(&phi_e, &tol).expect("fixed points");
            for x in fixed.selfadjoint_basis.iter().take(2) {
                let res = kappa(x, &phi_e, &p_c, 1e-7).expect("kappa");
                let gap = (op_norm(x) - op_norm(&res.compressed)).abs();
                rec.check(gap <= 1e-8, || format!("kappa norm gap {gap:.3e}"));
                let inv = kappa_inverse(&res.compressed, &phi_e, &p_c, &tol).expect("inverse");
                rec.check(inv.roundtrip_residual <= 1e-8, || {
                    format!("kappa round trip {:.3e}", inv.roundtrip_residual)
                });
            }
        }
    }
    rec.finish()
}

/// Decay of the lifted map on zero-corner matrices, and the ergodicity
/// equivalence for coisometric liftings.
pub fn suite_decay_and_ergodicity(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("decay-and-ergodicity");
    let tol = cfg();
    for k in 0..trials {
        let d = r.random_range(2..=3usize);
        // decay: star-stable A, any contractive lifting
        let p = r.random_range(1..=2usize);
        let q = r.random_range(1..=2usize);
        let l = random_subisometric_lifting(r, d, p, q, 0.7, 0.5);
        let phi = CPMap::new(l.e().clone());
        let mut x = zeros(l.dim(), l.dim());
        let g = random_hermitian(r, l.dim());
        x.slice_mut(s![p.., ..]).assign(&g.slice(s![p.., ..]));
        x.slice_mut(s![..p, p..]).assign(&g.slice(s![..p, p..]));
        let mut decayed = false;
        for _ in 0..tol.max_iter {
            x = phi.apply(&x).expect("apply");
            if op_norm(&x) <= 1e-8 {
                decayed = true;
                break;
            }
        }
        rec.check(decayed, || "zero-corner matrix did not decay".into());

        // ergodicity: Phi_E ergodic iff Phi_C ergodic and A star-stable
        let ergodic_c = k % 2 == 0;
        let stable_a = (k / 2) % 2 == 0;
        let p2 = 2usize;
        let cc = if ergodic_c {
            random_coisometric(r, d, p2)
        } else {
            let c1 = random_coisometric(r, d, 1);
            let c2 = random_coisometric(r, d, 1);
            let ops: Vec<CMat> = (0..d)
                .map(|i| crate::linalg::block_diag(c1.op(i), c2.op(i)))
                .collect();
            RowContraction::new(ops, 1e-9).expect("block diagonal coisometry")
        };
        let q2 = 2usize;
        let aa = if stable_a {
            random_row_contraction(r, d, q2, 0.6)
        } else {
            random_non_star_stable(r, d, 1, 1, 0.5)
        };
        let cd = defects(&cc, &tol).expect("defects");
        let ad = defects(&aa, &tol).expect("defects");
        if ad.rank_star > cd.rank {
            continue;
        }
        let gamma = random_isometry(r, cd.rank, ad.rank_star);
        let l = lifting_from_gamma(&cc, &aa, &gamma, &tol).expect("lifting");
        let phi_e = CPMap::new(l.e().clone());
        let phi_c = CPMap::new(cc.clone());
        let lhs = is_ergodic(&phi_e, &tol).expect("ergodic E");
        let c_ergodic = is_ergodic(&phi_c, &tol).expect("ergodic C");
        let a_stable = is_star_stable(&aa, tol.tol, tol.max_iter);
        rec.check(lhs == (c_ergodic && a_stable), || {
            format!("ergodic(E) = {lhs} but ergodic(C) = {c_ergodic}, stable(A) = {a_stable}")
        });
    }
    rec.finish()
}

/// PSD checks: Choi matrices of random Kraus maps and moment matrices of
/// random fixed points.
pub fn suite_positivity(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("positivity");
    let tol = cfg();
    for _ in 0..trials {
        let d = r.random_range(1..=3usize);
        let n = r.random_range(1..=3usize);
        let t_norm = 0.2 + 0.75 * r.random::<f64>();
        let t = random_row_contraction(r, d, n, t_norm);
        let phi = CPMap::new(t);
        let choi = phi.choi();
        let (vals, _) = eigh_ascending(&choi).expect("eigh");
        rec.check(vals.first().copied().unwrap_or(0.0) >= -1e-10, || {
            format!("Choi minimum eigenvalue {:.3e}", vals[0])
        });

        // moment matrix of a random fixed point of a unital map
        let d2 = r.random_range(2..=3usize);
        let p = r.random_range(1..=2usize);
        let q = r.random_range(1..=(p * (d2 - 1)).min(2));
        let stable = q < 2 || r.random::<bool>();
        let l = random_coisometric_lifting(r, d2, p, q, stable);
        let e = l.e().clone();
        let phi = CPMap::new(e.clone());
        let fixed = fixed_points(&phi, &tol).expect("fixed");
        let mut x = zeros(e.dim(), e.dim());
        for b in &fixed.selfadjoint_basis {
            let w: f64 = r.random::<f64>() - 0.5;
            x = x + b.mapv(|v| v * w);
        }
        let scale = op_norm(&x);
        let d_fixed = if scale > 0.0 {
            // shift into [0, 1]; unitality keeps it fixed
            let mut shifted = x.mapv(|v| v / (2.0 * scale));
            for k in 0..e.dim() {
                shifted[(k, k)] += crate::linalg::c(0.5, 0.0);
            }
            shifted
        } else {
            crate::linalg::eye(e.dim())
        };
        match moment_matrix(&d_fixed, &e, 2, &tol) {
            Ok(m) => {
                let (vals, _) = eigh_ascending(&m).expect("eigh");
                rec.check(vals.first().copied().unwrap_or(0.0) >= -1e-10, || {
                    format!("moment minimum eigenvalue {:.3e}", vals[0])
                });
            }
            Err(e) => rec.check(false, || format!("moment matrix failed: {e}")),
        }
    }
    rec.finish()
}

/// Trace duality between the map and its adjoint.
pub fn suite_duality(r: &mut ChaCha8Rng, trials: usize) -> SuiteResult {
    let mut rec = Recorder::new("trace-duality");
    for _ in 0..trials {
        let d = r.random_range(1..=3usize);
        let n = r.random_range(1..=3usize);
        let t = random_row_contraction(r, d, n, 0.9);
        let phi = CPMap::new(t);
        let x = complex_gaussian(r, n, n);
        let psi = complex_gaussian(r, n, n);
        let lhs: crate::linalg::C64 = psi.dot(&phi.apply(&x).unwrap()).diag().iter().sum();
        let rhs: crate::linalg::C64 = phi.apply_dual(&psi).unwrap().dot(&x).diag().iter().sum();
        rec.check((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()), || {
            format!("duality gap {:.3e}", (lhs - rhs).norm())
        });
    }
    rec.finish()
}

/// Deliberately perturbed fixture; the harness must flag it.
pub fn suite_injected_fault(r: &mut ChaCha8Rng) -> SuiteResult {
    let mut rec = Recorder::new("injected-fault");
    let l = random_coisometric_lifting(r, 2, 2, 1, true);
    let b: Vec<CMat> = l.b().iter().map(|m| m.mapv(|v| v * 0.999)).collect();
    let perturbed = Lifting::new(l.c().clone(), l.a().clone(), b, 1e-6).expect("perturbed");
    let rep = is_coisometric_lifting(&perturbed, 1e-8);
    // expected to fail: the perturbation destroys the unital condition
    rec.check(rep.is_coisometric, || {
        format!(
            "perturbation detected as intended (unital defect {:.3e})",
            rep.unital_defect
        )
    });
    rec.finish()
}

/// Runs every suite with `trials` instances each (0 is a no-op pass).
pub fn run_all(seed: u64, trials: usize, inject_fault: bool) -> Vec<SuiteResult> {
    let mut r = rng(seed);
    let mut out = vec![
        suite_gamma_forward(&mut r, trials),
        suite_gamma_converse(&mut r, trials),
        suite_coisometric_parametrization(&mut r, trials),
        suite_resolving_exactness(&mut r, trials),
        suite_factorization(&mut r, trials),
        suite_symbol_equivalence(&mut r, trials),
        suite_inner_symbols(&mut r, trials),
        suite_fixed_point_correspondence(&mut r, trials),
        suite_decay_and_ergodicity(&mut r, trials),
        suite_positivity(&mut r, trials),
        suite_duality(&mut r, trials),
    ];
    if inject_fault {
        out.push(suite_injected_fault(&mut r));
    }
    out
}
