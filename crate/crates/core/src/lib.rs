//! Numerical tools for neural collapse under label smoothing: the nonnegative
//! layer-peeled model, collapse and memorization metrics, and the two-class
//! memorization-dilation model.

pub mod cli;
pub mod embedding;
pub mod error;
pub mod losses;
pub mod lpm;
pub mod md;
pub mod metrics;
pub mod optim;

pub use embedding::{
    class_stats, corrupt_labels, load_embeddings, read_embeddings, save_embeddings, write_embeddings, ClassStats,
    EmbeddingSet, LabelSource, ModelParams, Split,
};
pub use error::{Error, Result};
pub use losses::LossParams;
pub use lpm::{closed_form_minimizer, construct_nc_config, solve_lpm, ClosedForm, LpmSolution, SolverOptions};
pub use metrics::{nc1_metric, nc_config_report, NcReport};

/// Crate version embedded in every CLI artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
