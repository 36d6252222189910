use std::path::PathBuf;

use thiserror::Error;

use crate::rules::Selectivity;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("triple target {target} is unreachable: {reason}")]
    Unreachable { target: u64, reason: String },
    #[error("requested {requested} {class} rules but the graph only offers {available}")]
    InsufficientPairs {
        class: Selectivity,
        requested: usize,
        available: usize,
    },
    #[error("fixture for step {step} is missing: {}", path.display())]
    MissingFixture { step: usize, path: PathBuf },
    #[error("step {step} run {run}: {message}")]
    Run { step: usize, run: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> BenchError {
        let path = path.into();
        move |source| BenchError::Io { path, source }
    }
}
