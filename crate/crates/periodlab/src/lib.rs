//! File formats, reports and the command-line driver for `periodlab-core`.
//!
//! A run is described by an [`ExperimentConfig`]; [`run`] turns it into a
//! [`Report`] and [`emit`] renders the report as JSON, CSV or Markdown. The
//! same config always produces the same bytes.

pub mod config;
pub mod error;
pub mod render;
pub mod report;
pub mod schema;

pub use config::{execute, run, with_pool, Command, ExperimentConfig, Params, THREADS_ENV};
pub use error::{CliError, Result};
pub use render::{emit, from_json, Format};
pub use report::Report;
