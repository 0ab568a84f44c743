//! Data acquisition for the estimation pipeline: CSV files, the World Bank
//! WDI API and an on-disk cache of fetched series.

pub mod cache;
pub mod csv_io;
pub mod validate;
pub mod wdi;

use std::path::PathBuf;

use thiserror::Error;
use vecmkit_core::series::SeriesError;

pub use cache::{Cache, CacheEntry, CacheKey};
pub use csv_io::{read_csv, read_csv_str, write_csv, write_csv_to, CsvLayout, CsvMode};
pub use validate::{validate_dataset, Issue, IssueKind, Severity, ValidationReport};
pub use wdi::{fetch_wdi, parse_wdi_page, WdiClient, WdiQuery, WDI_BASE_URL};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    ParseError {
        line: u64,
        column: usize,
        message: String,
    },
    #[error("year {0} is missing; years must be consecutive")]
    GapInYears(i32),
    #[error("line {line}, column {column}: `{value}` is not a number")]
    NonNumeric { line: u64, column: usize, value: String },
    #[error("column `{0}` not found")]
    MissingColumn(String),
    #[error("HTTP status {status} from {url}")]
    HttpError { status: u16, url: String },
    #[error("network error: {0}")]
    Network(String),
    #[error("unexpected response shape: {0}")]
    SchemaError(String),
    #[error("no observations returned for {0}")]
    NoData(String),
    #[error("null observations for years {0:?}")]
    NullObservations(Vec<i32>),
    #[error("{0} is not cached and network access is disabled")]
    CacheMiss(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.into(),
            source,
        }
    }
}
