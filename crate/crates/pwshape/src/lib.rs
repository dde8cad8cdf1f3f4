//! Noncentral elliptical shape densities for labelled landmark data.
//!
//! A configuration of `N` landmarks in `K` dimensions is reduced to a
//! pseudo-Wishart shape object `V = Y Y'` (with `Y` the Helmertized,
//! scale-normalized configuration), and the density of its reflection
//! size-and-shape or shape coordinates is expanded as a series of zonal
//! polynomials weighted by radial integrals of an elliptical generator.
//! The crate provides:
//!
//! - partition and zonal-polynomial algebra ([`partition`], [`zonal`],
//!   [`series`]) with log-space signed accumulation ([`slv`]),
//! - Kotz type-I generators and their derivatives ([`kotz`]),
//! - landmark geometry: Helmert reduction, pseudo-Wishart coordinates,
//!   polar angle charts ([`geometry`]),
//! - size-and-shape and shape log-densities under Gaussian and Kotz
//!   models, in both radial-exponent conventions ([`density`]),
//! - maximum-likelihood fitting, model selection, and a two-sample
//!   mean-shape likelihood-ratio test ([`inference`]),
//! - numerical cross-check oracles: adaptive radial quadrature,
//!   Monte-Carlo normalization, finite-difference derivatives, and
//!   truncation studies ([`oracle`]),
//! - TSV landmark ingestion ([`dataset`]) and a synthetic sampler
//!   ([`sim`]).

pub mod dataset;
pub mod density;
pub mod error;
pub mod geometry;
pub mod inference;
pub mod kotz;
pub mod oracle;
pub mod partition;
pub mod quad;
pub mod series;
pub mod sim;
pub mod slv;
pub mod special;
pub mod zonal;

pub use error::Error;
pub use slv::SignedLogValue;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
