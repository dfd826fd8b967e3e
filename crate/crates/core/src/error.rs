use thiserror::Error;

/// Unified error type for the whole library.
#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration or exact-solve size cap was exceeded.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Arguments live on mismatched or invalid ground sets / domains.
    #[error("domain error: {0}")]
    Domain(String),

    /// A partial-order precondition (refinement, Γ ≤ ξ, ...) failed.
    #[error("order error: {0}")]
    Order(String),

    /// A graph operation required a connected input.
    #[error("connectivity error: {0}")]
    Connectivity(String),

    /// A bipartite graph was not in the requested class.
    #[error("class error: {0}")]
    Class(String),

    /// A moment/cumulant table is missing a required entry.
    #[error("incomplete table: {0}")]
    IncompleteTable(String),

    /// A probabilistic model is invalid (weights negative or not normalized).
    #[error("model error: {0}")]
    Model(String),

    /// Resolvent argument on the wrong side of the spectrum edge.
    #[error("branch error: {0}")]
    Branch(String),

    /// A root pushed against the singular edge beyond numeric range.
    #[error("edge error: {0}")]
    Edge(String),

    /// Fixed-point / shooting iteration failed to converge.
    #[error("did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Generic numerical solver failure.
    #[error("solver error: {0}")]
    Solver(String),
}
