//! Command-line front-end for `ptnlse-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod sweep;

pub use cli::run;
pub use config::{parse_config, parse_family, ConfigError, RunConfig};
pub use sweep::{parse_sweep, Axis, SweepError};
