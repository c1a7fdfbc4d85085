//! Space-time block code laboratory.
//!
//! This crate implements the algebra of linear space-time block code designs
//! that admit single-symbol maximum-likelihood decoding, together with the
//! tooling needed to study them end to end:
//!
//! * [`mat`]: a small dense complex-matrix kernel (products, determinants,
//!   numeric rank by elimination).
//! * [`design`]: linear designs as weight-matrix collections, the
//!   single-symbol decodability checks, design classification, and maximal
//!   square rates.
//! * [`construct`]: catalog designs (Alamouti, complex orthogonal designs,
//!   coordinate-interleaved designs) and the generic constructions that
//!   produce them (iterative square designs, vertical stacking, block
//!   composition with quadrature interleaving, column deletion).
//! * [`constellation`]: QAM/PSK signal sets, rotation, coordinate product
//!   distances, and optimal rotation angles.
//! * [`gain`]: rank and determinant criteria by enumeration, coding gains.
//! * [`sim`]: quasi-static and rapid Rayleigh fading, single-symbol and
//!   joint-ML decoders, extended codeword matrices, and a reproducible
//!   bit-error-rate Monte Carlo.
//! * [`mmi`]: maximum mutual information of orthogonal and
//!   coordinate-interleaved schemes, plus ergodic channel capacity.
//!
//! All angles are degrees at public interfaces. All algebraic checks take an
//! explicit tolerance; [`DEFAULT_TOL`] suits designs whose entries are exact
//! 0, ±1, ±j. Everything is deterministic under a fixed seed, including
//! parallel runs.

pub mod constellation;
pub mod construct;
pub mod design;
pub mod gain;
pub mod mat;
pub mod mmi;
pub mod sim;

pub use num_complex::Complex64;
use num_rational::Ratio;

/// Exact rational rate (symbols per time slot) or delay ratio.
pub type Rate = Ratio<u64>;

/// Default tolerance for algebraic verification.
///
/// Design entries are exact 0, ±1, ±j, so residuals of the checked identities
/// are pure floating-point error, many orders below this threshold.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Errors produced by fallible operations across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A constructor or parser received an invalid parameter.
    #[error("invalid parameter: {0}")]
    BadParam(String),
    /// Unknown catalog design name.
    #[error("unknown design name {name:?}; valid names: {valid}")]
    UnknownDesign { name: String, valid: String },
    /// An enumeration would exceed its candidate budget.
    #[error("{0}")]
    BudgetExceeded(String),
    /// The design does not satisfy the decodability condition the requested
    /// decoder relies on.
    #[error("{0}")]
    NotSingleSymbol(String),
    /// A design file or JSON value did not describe a valid design.
    #[error("invalid design data: {0}")]
    BadDesign(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
