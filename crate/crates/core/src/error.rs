use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Solver non-convergence is not an error; it is
/// reported through the `converged` flag of the returned solution.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {msg}")]
    Parse { path: PathBuf, line: u64, msg: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("class {class} has no samples in the selected split")]
    EmptyClass { class: usize },

    #[error("no test mean for class {class}, which has corrupted training samples")]
    MissingTestMean { class: usize },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("closed form requires (N-1)/N*alpha + 2*sqrt(N*(N-1)*lambda_w*lambda_h) < 1, got {lhs}")]
    ConditionViolated { lhs: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
