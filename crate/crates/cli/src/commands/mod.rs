//! The five subcommands.

pub mod analyze;
pub mod compare;
pub mod kernel;
pub mod oracle;
pub mod train;
