use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{method} spectrum approximation is not supported for the {model} model")]
    Unsupported { method: &'static str, model: &'static str },

    #[error(
        "equilibrium solver did not converge after {iterations} iterations \
         (flatness {flatness:.3e}, target {target:.3e})"
    )]
    NotConverged {
        iterations: usize,
        flatness: f64,
        target: f64,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed csv: {0}")]
    MalformedCsv(String),
}
