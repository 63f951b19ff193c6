use thiserror::Error;

use crate::associate::AssocError;
use crate::cloud::CloudError;
use crate::cluster::ClusterError;
use crate::ingest::IngestError;
use crate::matrix::MatrixError;
use crate::pipeline::{ConfigError, EvalError, ReportError};
use crate::preprocess::PreprocessError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Any failure raised by the pipeline, grouped by the module that raised it.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Associate(#[from] AssocError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl Error {
    /// True for problems with the input data itself (empty corpus, bad
    /// schema) as opposed to runtime failures.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Ingest(e) => e.is_data_error(),
            Error::Preprocess(PreprocessError::EmptyCorpus) => true,
            Error::Report(e) => e.is_data_error(),
            Error::Eval(e) => e.is_data_error(),
            _ => false,
        }
    }
}
