use thiserror::Error;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("surface evaluation produced a non-finite value at ({x}, {y})")]
    Evaluation { x: f64, y: f64 },

    #[error("integrator produced a non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("heading is degenerate (squared Riemannian norm {norm_sq:e})")]
    DegenerateHeading { norm_sq: f64 },

    #[error("lift context is missing `{0}`")]
    MissingContext(&'static str),

    #[error("dictionary choice `{0}` does not define a follower move")]
    UnsupportedChoice(char),

    #[error("singular value decomposition did not converge")]
    SvdFailure,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("no records carry position estimates")]
    NoEstimates,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for failures caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::InvalidArgument(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
