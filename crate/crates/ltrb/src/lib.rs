//! Command-line driver for the LT-RB wave solver in `ltrb-core`: run
//! configuration, Matrix Market and CSV files, parallel snapshots and the
//! `full`, `offline`, `online`, `compare`, `quality` and `beta` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod snapshots;

pub use config::RunConfig;
pub use error::{CliError, Result};
