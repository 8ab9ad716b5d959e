use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("Nehari projection undefined: nonlinear mass {b:e} is not positive")]
    ProjectionUndefined { b: f64 },

    #[error(
        "descent stagnated at level {level:e} with gradient norm {grad_norm:e} after {iterations} iterations"
    )]
    Stagnation {
        level: f64,
        grad_norm: f64,
        iterations: usize,
    },

    #[error("mountain-pass endpoint invalid: Φ(u1) = {phi:e} must be negative")]
    InvalidEndpoint { phi: f64 },

    #[error("boundary probe for sample {sample} at ({x}, {y}) leaves the grid")]
    ProbeOutsideGrid { sample: usize, x: f64, y: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("field file: {0}")]
    FieldFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::ProjectionUndefined { .. }
                | Error::Stagnation { .. }
                | Error::InvalidEndpoint { .. }
                | Error::ProbeOutsideGrid { .. }
        )
    }
}
