use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an argument outside the operation's contract.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The request is well-formed but mathematically undefined for these parameters.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to produce a result.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Input data violates a physical constraint (e.g. negative populations).
    #[error("invalid data: {0}")]
    Data(String),

    /// Configuration file could not be read or failed validation.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
