//! Shared oracles for the integration suites.
//!
//! The symbol oracle here rebuilds the characteristic function from the
//! intertwining unitary itself: the Poisson-kernel embedding of `H_A` into
//! the dilation space of `C`, combined with the truncated Schaeffer
//! dilation, gives `W` on `H_E`, and the symbol columns are
//! `P_(Fock) [V^C_i W v_i - W E_i v_i]` summed over slots. This route never
//! touches the closed-form coefficient expansion used by `char_symbol`, so
//! agreement between the two is a genuine cross-check.

use liftchar::charfunc::MultiAnalyticSymbol;
use liftchar::fock::FockBasis;
use liftchar::lifting::{gamma_from_lifting, Lifting};
use liftchar::linalg::{CMat, CVec};
use liftchar::rowcon::{defects, schaeffer_mid, Tolerances};
use ndarray::prelude::*;

/// Characteristic-function symbol of a subisometric lifting computed from
/// the assembled intertwiner. Exact for coefficient words of length at most
/// `n` (the dropped dilation boundary only feeds longer words).
pub fn w_oracle_symbol(l: &Lifting, n: usize, cfg: &Tolerances) -> MultiAnalyticSymbol {
    let c = l.c();
    let a = l.a();
    let d = c.d();
    let (p, q) = (c.dim(), a.dim());
    let cd = defects(c, cfg).expect("defects of C");
    let ad = defects(a, cfg).expect("defects of A");
    let ed = defects(l.e(), cfg).expect("defects of E");
    let gamma = gamma_from_lifting(l, cfg).expect("gamma").gamma;
    let gamma_star = gamma.dot(&ad.star_coords()); // rank_C x q

    let mid = schaeffer_mid(c, &cd, n).expect("dilation of C");
    let rank_c = cd.rank;
    let word_basis = FockBasis::new(d, n, 1).expect("word basis");
    let a_adjoints = a.word_adjoints(&word_basis);
    let hat_dim = mid.dim();

    // W on H_E: identity on H_C, Poisson embedding on H_A
    let embed =
        |x: ArrayView1<liftchar::linalg::C64>, y: ArrayView1<liftchar::linalg::C64>| -> CVec {
            let mut out = CVec::zeros(hat_dim);
            out.slice_mut(s![..p]).assign(&x);
            for (widx, wadj) in a_adjoints.iter().enumerate() {
                let coeff = gamma_star.dot(&wadj.dot(&y));
                out.slice_mut(s![p + widx * rank_c..p + (widx + 1) * rank_c])
                    .assign(&coeff);
            }
            out
        };

    let mut symbol = MultiAnalyticSymbol::new(d, n, ed.rank, rank_c).expect("symbol");
    let mut columns: Vec<CVec> = Vec::with_capacity(ed.rank);
    for k in 0..ed.rank {
        let sigma = ed.sigma[k];
        let mut theta = CVec::zeros(hat_dim);
        for i in 0..d {
            let slot = ed.iota.slice(s![i * (p + q)..(i + 1) * (p + q), k]);
            let v_i: CVec = slot.mapv(|v| v / sigma);
            let (x_i, y_i) = (v_i.slice(s![..p]), v_i.slice(s![p..]));
            let w_v = embed(x_i, y_i);
            let shifted = mid.tuple[i].dot(&w_v);
            // E_i v_i stays in H_E: C part C_i x_i, A part B_i x_i + A_i y_i
            let ex = c.op(i).dot(&x_i.to_owned());
            let ey = l.b()[i].dot(&x_i.to_owned()) + a.op(i).dot(&y_i.to_owned());
            let w_ev = embed(ex.view(), ey.view());
            theta = theta + shifted - w_ev;
        }
        // the H_C components cancel; keep the Fock part
        columns.push(theta.slice(s![p..]).to_owned());
    }
    for (widx, w) in word_basis.words().iter().enumerate() {
        let mut coeff = CMat::zeros((rank_c, ed.rank));
        for (k, col) in columns.iter().enumerate() {
            let block = col.slice(s![widx * rank_c..(widx + 1) * rank_c]);
            coeff.column_mut(k).assign(&block);
        }
        symbol.set_coeff(w.clone(), coeff).expect("coefficient");
    }
    symbol
}

/// Smallest depth `n <= cap` with `||Phi_A^(n+1)(1)|| <= bound`, if any.
pub fn depth_for_leakage(
    a: &liftchar::rowcon::RowContraction,
    bound: f64,
    cap: usize,
) -> Option<usize> {
    let mut phi_pow = a.apply_phi(&liftchar::linalg::eye(a.dim()));
    for n in 0..=cap {
        if liftchar::linalg::op_norm(&phi_pow) <= bound {
            return Some(n);
        }
        phi_pow = a.apply_phi(&phi_pow);
    }
    None
}
