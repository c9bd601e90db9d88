//! File formats, configuration and the batch command line for
//! [`dtbf_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod trace_io;

pub use commands::{run, Command, Format, RunOptions};
pub use error::CliError;
pub use manifest::RunManifest;
