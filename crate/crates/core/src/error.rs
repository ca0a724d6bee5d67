use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid, parameter or experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A spectrum whose inverse transform is not real to working precision.
    #[error("spectrum violates Hermitian symmetry (imaginary residue {residue:.3e} of magnitude {magnitude:.3e})")]
    SymmetryViolation { residue: f64, magnitude: f64 },

    /// NaN or infinity produced by an operation.
    #[error("non-finite value: {0}")]
    Numeric(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// An operation was called outside the hypotheses it is valid under.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
