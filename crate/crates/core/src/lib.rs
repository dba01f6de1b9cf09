//! Spectral analysis of semi-infinite T-periodic Jacobi matrices and
//! construction of Wigner-von Neumann potentials that embed an eigenvalue
//! into the absolutely continuous spectrum.
//!
//! The crate is organized in layers:
//!
//! - [`exact`]: big-rational arithmetic, univariate polynomials, reduced
//!   rational functions, and exact real-root isolation (Sturm chains).
//! - [`operator`]: the periodic Jacobi operator data model and JSON ingestion.
//! - [`monodromy`]: transfer/monodromy matrices (numeric and polynomial),
//!   point classification, quasi-momentum, and the Floquet solution.
//! - [`bands`]: band structure from the discriminant, degeneracy detection,
//!   and the (epsilon, eta) band-splitting search.
//! - [`cfunction`]: the rational function C(lambda; T) whose zeros obstruct
//!   the embedding construction.
//! - [`wvn`]: the Wigner-von Neumann tail sums, candidate eigenvector,
//!   potential, and boundary completion.
//! - [`verify`]: independent numerical verification (residuals, Sturm
//!   bisection finite sections, inverse iteration, decay fits).
//! - [`cli`]: the command-line front end shared by the `jacobi-embed` binary.

pub mod bands;
pub mod cfunction;
pub mod cli;
pub mod error;
pub mod exact;
pub mod monodromy;
pub mod operator;
pub mod verify;
pub mod wvn;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
