//! Polynomial congruential generators over base-m digit rings, together with
//! the exact statistics used to probe how uniformly their output vectors fill
//! the unit cube.
//!
//! The crate is organized around a handful of small layers:
//!
//! - [`mring`]: residues modulo m^n stored as base-m digit vectors, with
//!   column arithmetic, digit-window extraction and exact normalization.
//! - [`functions`]: integer polynomials evaluated inside the ring, iteration,
//!   collection builders and integer-matrix transforms of collections.
//! - [`pointset`]: the map from a residue to its s-dimensional unit-cube
//!   point, exhaustive/sampled enumeration of the residue domain (optionally
//!   restricted to a fixed low-digit suffix) and the forward generator stream.
//! - [`analysis`]: cube hit frequencies, neighborhoods and core sets, Weyl
//!   exponential sums, grid and corner-exact discrepancy, convergence sweeps.
//! - [`witness`]: the constructive search for residues whose power vector can
//!   be steered into any prescribed target cube by editing two digit windows.
//! - [`cli`]: the command-line front end plumbing all of the above into
//!   reproducible runs with JSON/CSV output.
//!
//! All counting statistics are exact (integers and rationals); floating point
//! appears only in Weyl sums and rendered output.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod functions;
pub mod mring;
pub mod pointset;
pub mod report;
pub mod witness;

pub use error::{Error, Result};
pub use functions::{Collection, FunctionSpec, IntMatrix, IntPolynomial};
pub use mring::{ArithKind, Residue, RingSpec, UnitPoint};
pub use pointset::{EnumerationLimits, EnumerationMode, EnumerationPlan, Point, SuffixCondition};
