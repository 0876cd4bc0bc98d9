//! Library face of the `pinnspect` command-line tool.
//!
//! The binary is a thin dispatcher over [`commands`]; everything else is
//! exposed here so integration tests (and downstream tooling) can read and
//! write the same artifacts the CLI does: the binary weight-dump format
//! ([`dumpio`]), the config schema ([`config`]), CSV/manifest emission
//! ([`io`], [`manifest`]) and the quick-look plots ([`svgplot`]).

pub mod args;
pub mod commands;
pub mod config;
pub mod dumpio;
pub mod errors;
pub mod io;
pub mod manifest;
pub mod svgplot;

pub use errors::{CliError, Result};
