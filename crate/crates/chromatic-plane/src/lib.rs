//! Numerical and exact tools around the chromatic number of the plane.
//!
//! The crate measures how far a periodic `k`-coloring of the plane is from
//! avoiding monochromatic unit-distance pairs (its *badness*), computes the
//! matching minimax quantity on finite graphs as an exact zero-sum game, and
//! turns the results into lower bounds on the size of non-`k`-colorable
//! unit-distance graphs.
//!
//! ```
//! use chromatic_plane::colorings::PeriodicColoring;
//! use chromatic_plane::badness::mc_badness;
//!
//! // Alternating stripes of width √3/2 form a 2-coloring whose badness is
//! // exactly 1/3; the Monte-Carlo estimate converges there.
//! let stripes = PeriodicColoring::stripes(3f64.sqrt() / 2.0).unwrap();
//! let est = mc_badness(&stripes, 100_000, 1);
//! assert!((est.p_hat - 1.0 / 3.0).abs() < 0.01);
//! ```

pub mod badness;
pub mod bounds;
pub mod colorings;
pub mod game;
pub mod geometry;
pub mod graphs;

use thiserror::Error as ThisError;

/// Crate-wide error type.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("lattice basis is degenerate (vectors are linearly dependent)")]
    DegenerateBasis,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid hex pattern: adjacent hexagons share a color (k={k}, multiplier={multiplier})")]
    InvalidHexPattern { k: u32, multiplier: u32 },
    #[error("unknown built-in graph `{0}`")]
    UnknownGraph(String),
    #[error("graph has no vertex coordinates")]
    MissingCoordinates,
    #[error("search budget exceeded; result undecided")]
    Undecided,
    #[error("enumeration cap exceeded ({needed} colorings > cap {cap}); use the MWU solver")]
    CapExceeded { needed: f64, cap: u64 },
    #[error("no bound: {0}")]
    NoBound(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
