//! Command-line front end for `permascale`: one-shot computations and the
//! experiment harnesses.

pub mod app;
pub mod catalog;
pub mod error;
pub mod experiments;
pub mod oneshot;
pub mod records;

pub use app::{execute, run, Cli, Output};
pub use error::CliError;
