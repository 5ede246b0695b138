//! Command-line runner and HTTP service over the `tweetminer` library.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod http;
pub mod pipeline;
pub mod request;
pub mod snapshot;

pub use config::AnalysisConfig;
pub use error::{Stage, StageError};
pub use pipeline::{run_pipeline, AnalysisReport};
pub use snapshot::Snapshot;
