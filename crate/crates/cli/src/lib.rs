//! Command implementations behind the `dpdelta` binary.

pub mod commands;
pub mod envelope;

pub use commands::{CliError, CliResult};
pub use envelope::ReportEnvelope;
