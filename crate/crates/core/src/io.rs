//! JSON file formats for matrices, tuples, liftings, symbols, and states,
//! plus the run configuration read from flags and the `LIFTCHAR_CONFIG`
//! defaults file.
//!
//! Complex entries are `[re, im]` pairs of finite binary64 floats, so every
//! written file re-reads to bitwise-equal matrices.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::charfunc::MultiAnalyticSymbol;
use crate::error::{Error, Result};
use crate::fock::Word;
use crate::lifting::Lifting;
use crate::linalg::{c, CMat};
use crate::rowcon::{RowContraction, Tolerances};

/// Environment variable naming a JSON file with default run parameters.
pub const CONFIG_ENV: &str = "LIFTCHAR_CONFIG";

/// Run parameters surfaced on every CLI command.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_depth")]
    pub fock_depth: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_tol() -> f64 {
    1e-9
}
fn default_depth() -> usize {
    6
}
fn default_max_iter() -> usize {
    10_000
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tol: 1e-9,
            fock_depth: 6,
            max_iter: 10_000,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Defaults, overridden by the `LIFTCHAR_CONFIG` file when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CONFIG_ENV) {
            Ok(path) if !path.is_empty() => {
                let text = std::fs::read_to_string(&path)?;
                let cfg: RunConfig = serde_json::from_str(&text)?;
                cfg.validate()?;
                Ok(cfg)
            }
            _ => Ok(RunConfig::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        if self.fock_depth == 0 {
            return Err(Error::InvalidInput("fock_depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            tol: self.tol,
            max_iter: self.max_iter,
            ..Tolerances::default()
        }
    }
}

/// One complex matrix as rows of `[re, im]` entries.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl MatrixJson {
    pub fn from_cmat(m: &CMat) -> Self {
        MatrixJson(
            (0..m.nrows())
                .map(|i| {
                    (0..m.ncols())
                        .map(|j| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect(),
        )
    }

    pub fn to_cmat(&self) -> Result<CMat> {
        let rows = self.0.len();
        let cols = self.0.first().map(|r| r.len()).unwrap_or(0);
        for (i, row) in self.0.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidInput(format!(
                    "matrix row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, e) in row.iter().enumerate() {
                if !e[0].is_finite() || !e[1].is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "non-finite entry at ({i}, {j})"
                    )));
                }
            }
        }
        let mut out = CMat::zeros((rows, cols));
        for (i, row) in self.0.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out[(i, j)] = c(e[0], e[1]);
            }
        }
        Ok(out)
    }

    /// Explicit-shape variant for matrices that may have zero rows or
    /// columns (a bare row list cannot represent `0 x n`).
    pub fn to_cmat_with_shape(&self, rows: usize, cols: usize) -> Result<CMat> {
        if self.0.is_empty() && rows == 0 {
            return Ok(CMat::zeros((0, cols)));
        }
        let m = self.to_cmat()?;
        if m.nrows() != rows || m.ncols() != cols {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, expected {rows}x{cols}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m)
    }
}

/// A `d`-tuple of square matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TupleJson {
    pub dim: usize,
    pub d: usize,
    pub matrices: Vec<MatrixJson>,
}

impl TupleJson {
    pub fn from_row_contraction(t: &RowContraction) -> Self {
        TupleJson {
            dim: t.dim(),
            d: t.d(),
            matrices: t.ops().iter().map(MatrixJson::from_cmat).collect(),
        }
    }

    pub fn to_matrices(&self) -> Result<Vec<CMat>> {
        if self.matrices.len() != self.d {
            return Err(Error::InvalidInput(format!(
                "tuple declares d = {} but carries {} matrices",
                self.d,
                self.matrices.len()
            )));
        }
        if self.d == 0 {
            return Err(Error::EmptyTuple);
        }
        self.matrices
            .iter()
            .map(|m| m.to_cmat_with_shape(self.dim, self.dim))
            .collect()
    }

    pub fn to_row_contraction(&self, tol: f64) -> Result<RowContraction> {
        RowContraction::new(self.to_matrices()?, tol)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolCoeffJson {
    pub word: Vec<u8>,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymbolJson {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub dom_dim: usize,
    pub cod_dim: usize,
    pub coeffs: Vec<SymbolCoeffJson>,
    pub leakage_bound: f64,
}

impl SymbolJson {
    pub fn from_symbol(s: &MultiAnalyticSymbol) -> Self {
        SymbolJson {
            d: s.d(),
            n: s.max_len(),
            dom_dim: s.dom_dim(),
            cod_dim: s.cod_dim(),
            coeffs: s
                .coeffs()
                .map(|(w, m)| SymbolCoeffJson {
                    word: w.letters().to_vec(),
                    matrix: MatrixJson::from_cmat(m),
                })
                .collect(),
            leakage_bound: s.leakage(),
        }
    }

    pub fn to_symbol(&self) -> Result<MultiAnalyticSymbol> {
        let mut s = MultiAnalyticSymbol::new(self.d, self.n, self.dom_dim, self.cod_dim)?;
        for coeff in &self.coeffs {
            let w = Word::new(&coeff.word, self.d)?;
            s.set_coeff(
                w,
                coeff
                    .matrix
                    .to_cmat_with_shape(self.cod_dim, self.dom_dim)?,
            )?;
        }
        if !self.leakage_bound.is_finite() || self.leakage_bound < 0.0 {
            return Err(Error::InvalidInput(
                "leakage_bound must be finite and nonnegative".into(),
            ));
        }
        s.set_leakage(self.leakage_bound);
        Ok(s)
    }
}

/// Top-level document: each kind carries the shape checks it needs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixFile {
    /// A row contraction: `{dim, d, matrices}`.
    RowContraction(TupleJson),
    /// A lifting stored as its blocks; the assembled tuple is derived,
    /// never stored.
    Lifting {
        #[serde(rename = "C")]
        c: TupleJson,
        #[serde(rename = "A")]
        a: TupleJson,
        #[serde(rename = "B")]
        b: Vec<MatrixJson>,
    },
    /// A multi-analytic symbol: word-indexed coefficient list.
    Symbol(SymbolJson),
    /// A square matrix claimed to be a state (PSD, trace one) or a fixed
    /// point; PSD-ness is checked by the consuming operation.
    State { dim: usize, matrix: MatrixJson },
    /// A generic rectangular complex matrix (used for `gamma` blocks).
    Matrix {
        rows: usize,
        cols: usize,
        matrix: MatrixJson,
    },
}

impl MatrixFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn into_row_contraction(&self, tol: f64) -> Result<RowContraction> {
        match self {
            MatrixFile::RowContraction(t) => t.to_row_contraction(tol),
            _ => Err(Error::InvalidInput(
                "expected a row_contraction file".into(),
            )),
        }
    }

    pub fn into_lifting(&self, tol: f64) -> Result<Lifting> {
        match self {
            MatrixFile::Lifting { c, a, b } => {
                let cc = c.to_row_contraction(tol)?;
                let aa = RowContraction::new(a.to_matrices()?, tol)?;
                if b.len() != cc.d() {
                    return Err(Error::InvalidInput(format!(
                        "lifting carries {} B blocks, expected {}",
                        b.len(),
                        cc.d()
                    )));
                }
                let blocks: Result<Vec<CMat>> = b
                    .iter()
                    .map(|m| m.to_cmat_with_shape(aa.dim(), cc.dim()))
                    .collect();
                Lifting::new(cc, aa, blocks?, tol)
            }
            _ => Err(Error::InvalidInput("expected a lifting file".into())),
        }
    }

    pub fn into_symbol(&self) -> Result<MultiAnalyticSymbol> {
        match self {
            MatrixFile::Symbol(s) => s.to_symbol(),
            _ => Err(Error::InvalidInput("expected a symbol file".into())),
        }
    }

    pub fn into_square_matrix(&self) -> Result<CMat> {
        match self {
            MatrixFile::State { dim, matrix } => matrix.to_cmat_with_shape(*dim, *dim),
            _ => Err(Error::InvalidInput("expected a state file".into())),
        }
    }

    pub fn into_matrix(&self) -> Result<CMat> {
        match self {
            MatrixFile::Matrix { rows, cols, matrix } => matrix.to_cmat_with_shape(*rows, *cols),
            MatrixFile::State { dim, matrix } => matrix.to_cmat_with_shape(*dim, *dim),
            _ => Err(Error::InvalidInput("expected a matrix file".into())),
        }
    }

    pub fn from_lifting(l: &Lifting) -> Self {
        MatrixFile::Lifting {
            c: TupleJson::from_row_contraction(l.c()),
            a: TupleJson::from_row_contraction(l.a()),
            b: l.b().iter().map(MatrixJson::from_cmat).collect(),
        }
    }
}
