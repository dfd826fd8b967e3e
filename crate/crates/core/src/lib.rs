//! Partition-lattice combinatorics, cumulant algebra, free probability, and
//! SSEP large-deviation solvers.
//!
//! The pipeline goes bottom-up: set partitions and their Möbius functions
//! ([`partitions`]), chromatic polynomials and tagged bipartite graphs
//! ([`graphs`]), moment/cumulant conversions including Γ-cumulants and free
//! cumulants ([`cumulants`]), exact correlated Bernoulli models and the two
//! equivalent graph expansions of `log Z` ([`bernoulli`]), the continuum
//! variational free-energy solver ([`scaling`]), single-variable free
//! probability ([`freeprob`]), and everything SSEP-specific ([`ssep`]).

pub mod bernoulli;
pub mod cumulants;
pub mod error;
pub mod freeprob;
pub mod graphs;
pub mod grid;
pub mod partitions;
pub mod scaling;
pub mod ssep;

pub use error::Error;

/// Convenience alias used throughout.
pub type Result<T> = std::result::Result<T, Error>;
