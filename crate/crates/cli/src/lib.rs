//! Configuration-driven front end: parses `key=value` run files, executes
//! one computation and writes a CSV table plus a `key: value` summary.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, RawConfig, RunConfig};
pub use run::{execute, parse_matrix, resolve_workers, run, Artifacts, RunError, EXIT_ERROR, EXIT_OK, EXIT_VERIFY};
