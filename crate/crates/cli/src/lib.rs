//! File formats, batch experiments and subcommands of the `skewcirc` binary.

pub mod commands;
pub mod error;
pub mod experiment;
pub mod io;
pub mod svg;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
