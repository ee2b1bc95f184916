//! Driver layer for the `powpart` binary: configuration, deterministic
//! report rendering, self-tests and exit-code mapping.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod selftest;

pub use config::{Format, MPolicy, RunConfig, Settings};
pub use error::{HarnessError, HarnessResult};
