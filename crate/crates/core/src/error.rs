use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("capacity exceeded: {modes} modes requested, oracle supports at most {max}")]
    Capacity { modes: usize, max: usize },

    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("composition singular: smallest singular value {min_singular:.3e}")]
    CompositionSingular { min_singular: f64 },

    #[error("degenerate Fermi level: gap {gap:.3e} between levels {n} and {}", n + 1)]
    DegenerateFermiLevel { gap: f64, n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
