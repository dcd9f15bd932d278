//! Numerical laboratory for the Basu-Harvey-Terashima (BHT) matrix flow and its
//! algebraic relatives: Nahm's equations, the Lie superalgebra gl(n|m), anti-Lie
//! triple systems, Lax pairs and the spectral curves of matrix pencils.
//!
//! The crate is organised around the objects themselves:
//!
//! * [`matkit`]: dense complex matrices, characteristic polynomials, kernels,
//!   least squares, and bivariate polynomial interpolation.
//! * [`superalg`]: gl(n|m): superbracket, supertrace, the quaternionic map J,
//!   the indefinite pairing and regularity of odd elements.
//! * [`alts`]: anti-Lie triple systems, the triple-product flow and the
//!   Nahm / Nahm-Schmid extractions.
//! * [`flows`]: moment maps, the BHT / Nahm / gauge / holomorphic right-hand
//!   sides, fixed-step integration and identity checks.
//! * [`spectral`]: Lax data, spectral curves of pencils, the double-cover
//!   relation and regularity / ramification checks.
//! * [`random`]: seeded, reproducible random states.
//!
//! All operations are pure functions of immutable inputs and may be called
//! concurrently without synchronization.

pub mod alts;
pub mod flows;
pub mod matkit;
pub mod random;
pub mod spectral;
pub mod superalg;

use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;

/// Dense complex matrix in IEEE double precision.
pub type CMatrix = nalgebra::DMatrix<C64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {details}")]
    DimensionMismatch { op: &'static str, details: String },

    #[error("rank deficient: numerical rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("inconsistent system: relative residual {residual:.3e} exceeds {tol:.0e}")]
    Inconsistent { residual: f64, tol: f64 },

    #[error("duplicate interpolation node at indices {first} and {second}")]
    DuplicateNode { first: usize, second: usize },

    #[error("need at least {need} interpolation nodes, got {got}")]
    NotEnoughNodes { got: usize, need: usize },

    #[error("zero polynomial is degenerate: no well-defined roots")]
    DegeneratePolynomial,

    #[error("matrix is not {property} (deviation {deviation:.3e})")]
    NotStructured {
        property: &'static str,
        deviation: f64,
    },

    #[error("state became non-finite; last finite time t = {last_t}")]
    BlowUp { last_t: f64 },

    #[error("numerical routine failed: {0}")]
    Numerical(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
