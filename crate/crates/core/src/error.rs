use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite evaluation of {function} at u = {at}")]
    EvaluationFailure { function: &'static str, at: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "no nontrivial steady state of length {length}: needs eps below {threshold:.6}, got {epsilon}"
    )]
    NoSolution {
        epsilon: f64,
        threshold: f64,
        length: f64,
    },

    #[error("shooting bracket failed for length {target}: scanned return lengths span [{l_min:.6}, {l_max:.6}]")]
    Bracketing { target: f64, l_min: f64, l_max: f64 },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("initial datum is not compatible with the boundary data: {0}")]
    Compatibility(String),

    #[error("Newton stagnated at t = {t} with dt = {dt} (minimum step reached)")]
    Stiffness { t: f64, dt: f64, state: Vec<f64> },

    #[error("gluing mismatch at x = {at}: slope jump {jump:.3e} exceeds {tolerance:.1e}")]
    Gluing { at: f64, jump: f64, tolerance: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by numerics (as opposed to malformed requests).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoSolution { .. }
                | Error::Bracketing { .. }
                | Error::Stiffness { .. }
                | Error::Gluing { .. }
                | Error::EvaluationFailure { .. }
                | Error::Domain(_)
        )
    }
}
