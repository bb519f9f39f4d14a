//! Surface description files, experiment reports and the registry behind
//! the `repro` command.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod report;
pub mod surface_file;

pub use error::{CliError, Result};
