//! Sector areas swept by the continued fraction convergents of a real α,
//! with rigorous bounds, asymptotic constants and a lattice-point oracle.

pub mod alpha;
pub mod bounds;
pub mod cf;
pub mod cli;
pub mod error;
pub mod oracle;
pub mod real;
pub mod sector;
pub mod surd;

pub use alpha::{Alpha, AlphaSpec};
pub use cf::{CfKind, ContinuedFraction, Convergent, Depth, QuotientRule};
pub use error::{Error, Result};
pub use real::Real;
pub use surd::QuadSurd;

/// Exact rationals in reduced form with a positive denominator.
pub type ExactRational = num_rational::BigRational;
