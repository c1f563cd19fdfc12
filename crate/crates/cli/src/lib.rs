//! Command-line front end for `yawtune`.
//!
//! Exit codes: 0 on success, 2 for bad flags or configs, 3 when a
//! simulation diverges.

pub mod commands;
pub mod error;
pub mod io;
pub mod published;

pub use commands::{run, Cli};
pub use error::CliError;
