//! Numerical toolkit for contractive liftings of row contractions.
//!
//! The crate builds, classifies, and analyzes block-lower-triangular row
//! contractions at finite dimension: defect operators and their
//! rank-revealed coordinate spaces, truncated minimal isometric dilations,
//! characteristic-function symbols with composition and equivalence testing,
//! and the completely positive maps induced by Kraus tuples together with
//! their fixed-point correspondences.
//!
//! Modules:
//!
//! * [`fock`] - free-monoid words and the truncated full Fock space;
//! * [`rowcon`] - row contractions, defects, classification, Wold data,
//!   Poisson kernel, truncated isometric dilation;
//! * [`lifting`] - construction and classification of contractive liftings;
//! * [`charfunc`] - multi-analytic symbols and characteristic functions;
//! * [`cpmaps`] - completely positive maps and fixed-point machinery;
//! * [`io`] - JSON file formats and run configuration;
//! * [`testgen`] - seeded random instance generators;
//! * [`selftest`] - the randomized property suites behind `selftest`.

pub mod charfunc;
pub mod cpmaps;
pub mod error;
pub mod fock;
pub mod io;
pub mod lifting;
pub mod linalg;
pub mod rowcon;
pub mod selftest;
pub mod testgen;

pub use error::{Error, Result};

/// Three-valued outcome for tests that rest on an iteration which may fail
/// to settle within its budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    True,
    False,
    Inconclusive,
}

impl Verdict {
    pub fn is_true(self) -> bool {
        self == Verdict::True
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::True => write!(f, "yes"),
            Verdict::False => write!(f, "no"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}
