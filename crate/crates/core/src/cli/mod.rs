//! Configuration format and command-line front end.

pub mod commands;
pub mod config;

pub use commands::{condition_summary, run_command, run_with, EXIT_FAILURE, EXIT_OK, EXIT_UNCERTIFIED, EXIT_VALIDATION};
pub use config::{emit_config, parse_config, parse_document, ConfigDocument};
