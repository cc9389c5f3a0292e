//! Command-line front end: matrix file I/O, pipeline commands,
//! classification reports, and the randomized self-test harness.
//!
//! Exit codes: 0 on success, 1 on errors (including a failed validation),
//! 3 when `--strict` is set and a requested verdict is negative.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use liftchar::charfunc::{char_symbol, compose_symbols, is_inner, symbols_equivalent};
use liftchar::cpmaps::{fixed_points, is_ergodic, kappa, kappa_inverse, CPMap};
use liftchar::io::{MatrixFile, RunConfig, SymbolJson};
use liftchar::lifting::{is_coisometric_lifting, is_reduced, is_subisometric, lifting_from_gamma};
use liftchar::linalg::{op_norm, CMat};
use liftchar::rowcon::{
    defects, is_cnc, star_stability, validate_row_contraction, RowContraction, StarStability,
    Tolerances,
};

#[derive(Parser)]
#[command(
    name = "liftchar",
    version,
    about = "Contractive liftings of row contractions: defects, characteristic functions, CP maps"
)]
struct Cli {
    /// Comparison tolerance (default 1e-9, or the LIFTCHAR_CONFIG file)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Fock truncation depth N (default 6)
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Iteration cap for fixed-point loops (default 10000)
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Seed for randomized suites (default 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exit nonzero when a requested verdict is negative
    #[arg(long, global = true)]
    strict: bool,
    /// Output file for commands that write one
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a matrix file and print its classification
    Validate { file: PathBuf },
    /// Assemble the lifting of C by A parametrized by gamma
    Lift {
        c_file: PathBuf,
        a_file: PathBuf,
        gamma_file: PathBuf,
    },
    /// Characteristic function of a reduced lifting
    Charfn { lifting: PathBuf },
    /// Test two symbols for equivalence up to a domain unitary
    Equiv { sym1: PathBuf, sym2: PathBuf },
    /// Compose two symbols by word convolution
    Compose { sym1: PathBuf, sym2: PathBuf },
    /// Fixed-point set of the CP map of a Kraus tuple
    Fixedpoints { kraus: PathBuf },
    /// Compress a fixed point to the C-corner, or reconstruct its preimage
    Kappa {
        lifting: PathBuf,
        x_file: PathBuf,
        #[arg(long)]
        inverse: bool,
    },
    /// Run the randomized property suites
    Selftest {
        /// Instances per suite (0 is a no-op pass)
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Add a deliberately broken fixture to confirm failures surface
        #[arg(long)]
        inject_fault: bool,
    },
}

fn effective_config(cli: &Cli) -> liftchar::Result<(RunConfig, Tolerances)> {
    let mut run = RunConfig::from_env()?;
    if let Some(t) = cli.tol {
        run.tol = t;
    }
    if let Some(n) = cli.depth {
        run.fock_depth = n;
    }
    if let Some(m) = cli.max_iter {
        run.max_iter = m;
    }
    if let Some(s) = cli.seed {
        run.seed = s;
    }
    run.validate()?;
    let tols = run.tolerances();
    Ok((run, tols))
}

fn stability_text(s: &StarStability) -> &'static str {
    match s {
        StarStability::Stable { .. } => "yes",
        StarStability::NotStable => "no",
        StarStability::Inconclusive => "inconclusive",
    }
}

fn print_matrix(label: &str, m: &CMat) {
    println!("{label} ({} x {}):", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:+.6}{:+.6}i", m[(i, j)].re, m[(i, j)].im))
            .collect();
        println!("  [{}]", row.join(", "));
    }
}

fn cmd_validate(
    file: &std::path::Path,
    run: &RunConfig,
    tols: &Tolerances,
) -> liftchar::Result<bool> {
    let doc = MatrixFile::read(file)?;
    match &doc {
        MatrixFile::RowContraction(t) => {
            let mats = t.to_matrices()?;
            let rep = validate_row_contraction(&mats, run.tol)?;
            println!(
                "row contraction: {}; lambda_max = {:.12}",
                if rep.is_contraction { "yes" } else { "no" },
                rep.lambda_max
            );
            if !rep.is_contraction {
                return Ok(false);
            }
            let rc = RowContraction::new(mats, run.tol)?;
            let def = defects(&rc, tols)?;
            let stab = star_stability(&rc, run.tol, run.max_iter);
            println!(
                "coisometric: {}; D_C rank {}; D_*C rank {}",
                if rc.is_coisometric(run.tol) {
                    "yes"
                } else {
                    "no"
                },
                def.rank,
                def.rank_star
            );
            println!("star-stable: {}", stability_text(&stab.verdict));
            println!(
                "completely non-coisometric: {}",
                if is_cnc(&rc, tols)? { "yes" } else { "no" }
            );
            Ok(true)
        }
        MatrixFile::Lifting { .. } => {
            let l = doc.into_lifting(run.tol)?;
            let rep = validate_row_contraction(l.e().ops(), run.tol)?;
            println!(
                "lifting: contractive ({} + {} dims); lambda_max = {:.12}",
                l.dim_c(),
                l.dim_a(),
                rep.lambda_max
            );
            let coiso = is_coisometric_lifting(&l, run.tol.max(1e-10));
            println!(
                "coisometric lifting: {}",
                if coiso.is_coisometric { "yes" } else { "no" }
            );
            let sub = is_subisometric(&l, tols)?;
            println!("subisometric: {}", sub.verdict);
            let red = is_reduced(&l, tols)?;
            println!("reduced: {}", if red.is_reduced { "yes" } else { "no" });
            Ok(true)
        }
        MatrixFile::Symbol(s) => {
            let sym = s.to_symbol()?;
            println!(
                "symbol: d = {}, N = {}, {} -> {} (leakage bound {:.3e})",
                sym.d(),
                sym.max_len(),
                sym.dom_dim(),
                sym.cod_dim(),
                sym.leakage()
            );
            let inner = is_inner(&sym, run.tol)?;
            println!(
                "inner: {} (defect {:.3e}, allowance {:.3e})",
                if inner.is_inner { "yes" } else { "no" },
                inner.defect,
                inner.allowance
            );
            Ok(true)
        }
        MatrixFile::State { .. } => {
            let m = doc.into_square_matrix()?;
            let herm = op_norm(&(&liftchar::linalg::adj(&m) - &m));
            let (vals, _) = liftchar::linalg::eigh_ascending(&m)?;
            let lo = vals.first().copied().unwrap_or(0.0);
            let tr: f64 = vals.iter().sum();
            println!(
                "state: dim {}; hermitian defect {:.3e}; min eigenvalue {:.3e}; trace {:.12}",
                m.nrows(),
                herm,
                lo,
                tr
            );
            Ok(herm <= run.tol && lo >= -run.tol)
        }
        MatrixFile::Matrix { rows, cols, .. } => {
            let m = doc.into_matrix()?;
            println!("matrix: {rows} x {cols}; norm = {:.12}", op_norm(&m));
            Ok(true)
        }
    }
}

fn run_command(cli: &Cli) -> liftchar::Result<bool> {
    let (run, tols) = effective_config(cli)?;
    match &cli.cmd {
        Cmd::Validate { file } => cmd_validate(file, &run, &tols),
        Cmd::Lift {
            c_file,
            a_file,
            gamma_file,
        } => {
            let c = MatrixFile::read(c_file)?.into_row_contraction(run.tol)?;
            let a = MatrixFile::read(a_file)?.into_row_contraction(run.tol)?;
            let gamma = MatrixFile::read(gamma_file)?.into_matrix()?;
            let l = lifting_from_gamma(&c, &a, &gamma, &tols)?;
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("lifting.json"));
            MatrixFile::from_lifting(&l).write(&out)?;
            println!("wrote {}", out.display());
            let rep = validate_row_contraction(l.e().ops(), run.tol)?;
            println!("contractive: yes (lambda_max = {:.12})", rep.lambda_max);
            let coiso = is_coisometric_lifting(&l, run.tol.max(1e-10));
            println!(
                "coisometric: {}",
                if coiso.is_coisometric { "yes" } else { "no" }
            );
            let sub = is_subisometric(&l, &tols)?;
            println!("subisometric: {}", sub.verdict);
            let red = is_reduced(&l, &tols)?;
            println!("reduced: {}", if red.is_reduced { "yes" } else { "no" });
            Ok(true)
        }
        Cmd::Charfn { lifting } => {
            let l = MatrixFile::read(lifting)?.into_lifting(run.tol)?;
            let sym = char_symbol(&l, run.fock_depth, &tols)?;
            let inner = is_inner(&sym, run.tol)?;
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("symbol.json"));
            MatrixFile::Symbol(SymbolJson::from_symbol(&sym)).write(&out)?;
            println!("wrote {}", out.display());
            println!(
                "domain {} -> codomain {}, depth {}, leakage bound {:.3e}",
                sym.dom_dim(),
                sym.cod_dim(),
                sym.max_len(),
                sym.leakage()
            );
            println!(
                "inner: {} (defect {:.3e}, allowance {:.3e})",
                if inner.is_inner { "yes" } else { "no" },
                inner.defect,
                inner.allowance
            );
            Ok(true)
        }
        Cmd::Equiv { sym1, sym2 } => {
            let a = MatrixFile::read(sym1)?.into_symbol()?;
            let b = MatrixFile::read(sym2)?.into_symbol()?;
            let rep = symbols_equivalent(&a, &b, run.tol.max(1e-8))?;
            println!(
                "equivalent: {} (residual {:.3e}, relative {:.3e})",
                if rep.equivalent { "yes" } else { "no" },
                rep.residual,
                rep.relative_residual
            );
            if let Some(v) = &rep.unitary {
                print_matrix("v", v);
            }
            Ok(rep.equivalent)
        }
        Cmd::Compose { sym1, sym2 } => {
            let outer = MatrixFile::read(sym1)?.into_symbol()?;
            let inner_sym = MatrixFile::read(sym2)?.into_symbol()?;
            let composed = compose_symbols(&outer, &inner_sym, run.fock_depth)?;
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("composed.json"));
            MatrixFile::Symbol(SymbolJson::from_symbol(&composed)).write(&out)?;
            println!("wrote {}", out.display());
            println!(
                "composition: {} -> {}, depth {}, leakage bound {:.3e}",
                composed.dom_dim(),
                composed.cod_dim(),
                composed.max_len(),
                composed.leakage()
            );
            Ok(true)
        }
        Cmd::Fixedpoints { kraus } => {
            let t = MatrixFile::read(kraus)?.into_row_contraction(run.tol)?;
            let phi = CPMap::new(t);
            let fixed = fixed_points(&phi, &tols)?;
            println!("fixed-point dimension: {}", fixed.dim());
            for (k, b) in fixed.basis.iter().enumerate() {
                print_matrix(&format!("basis[{k}]"), b);
            }
            if !fixed.near_threshold.is_empty() {
                println!(
                    "warning: {} singular values near the rank cutoff",
                    fixed.near_threshold.len()
                );
            }
            if phi.is_unital(run.tol.max(1e-8)) {
                println!(
                    "ergodic: {}",
                    if is_ergodic(&phi, &tols)? {
                        "yes"
                    } else {
                        "no"
                    }
                );
            } else {
                println!("ergodic: n/a (map is not unital)");
            }
            Ok(true)
        }
        Cmd::Kappa {
            lifting,
            x_file,
            inverse,
        } => {
            let l = MatrixFile::read(lifting)?.into_lifting(run.tol)?;
            let x = MatrixFile::read(x_file)?.into_square_matrix()?;
            let phi = CPMap::new(l.e().clone());
            let p_c = l.p_c();
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("kappa.json"));
            if *inverse {
                let res = kappa_inverse(&x, &phi, &p_c, &tols)?;
                MatrixFile::State {
                    dim: res.preimage.nrows(),
                    matrix: liftchar::io::MatrixJson::from_cmat(&res.preimage),
                }
                .write(&out)?;
                println!("wrote {}", out.display());
                println!(
                    "iterations: {}; round-trip residual {:.3e}",
                    res.iterations, res.roundtrip_residual
                );
                Ok(res.roundtrip_residual <= run.tol.max(1e-8) * 100.0)
            } else {
                let res = kappa(&x, &phi, &p_c, run.tol.max(1e-8))?;
                MatrixFile::State {
                    dim: res.compressed.nrows(),
                    matrix: liftchar::io::MatrixJson::from_cmat(&res.compressed),
                }
                .write(&out)?;
                println!("wrote {}", out.display());
                println!("compressed fixed-point residual {:.3e}", res.fixed_residual);
                Ok(true)
            }
        }
        Cmd::Selftest {
            trials,
            inject_fault,
        } => {
            let results = liftchar::selftest::run_all(run.seed, *trials, *inject_fault);
            let mut all_ok = true;
            for r in &results {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                print!("[{status}] {} ({} checks", r.name, r.trials);
                if r.failures > 0 {
                    print!(", {} failed: {}", r.failures, r.detail);
                }
                println!(")");
                all_ok &= r.passed();
            }
            Ok(all_ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            // negative verdict: validation failed or a strict check said no
            if cli.strict || matches!(cli.cmd, Cmd::Validate { .. } | Cmd::Selftest { .. }) {
                ExitCode::from(if matches!(cli.cmd, Cmd::Validate { .. }) {
                    1
                } else {
                    3
                })
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
