use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's contract
    /// (mismatched table limits, insufficient table range, bad method/k combination).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Exact integer arithmetic left the 64-bit signed range.
    #[error("integer overflow: {0}")]
    Overflow(String),

    /// A computation would exceed an explicit resource guard
    /// (allocation size, enumeration count).
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Input is outside the mathematical domain of the operation
    /// (e.g. Dirichlet inverse of a table with f(1) not in {-1, +1}).
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
