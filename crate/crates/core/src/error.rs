use thiserror::Error;

/// Errors produced by the simulation and verification routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its legitimate domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The jump generator hit its jump budget before the residual-mass
    /// stopping rule was satisfied.
    #[error(
        "truncation failed: residual ratio {achieved_ratio:.3e} still above \
         tolerance {tolerance:.3e} after {max_jumps} jumps"
    )]
    TruncationExhausted {
        achieved_ratio: f64,
        tolerance: f64,
        max_jumps: usize,
    },

    /// An iterative numerical routine did not converge. This indicates a
    /// bug or a pathological input, not a statistical failure.
    #[error("numerical routine failed to converge: {0}")]
    NonConvergence(String),

    /// A goodness-of-fit test could not be formed (for example, every
    /// cell was pooled away).
    #[error("degenerate test: {0}")]
    DegenerateTest(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
