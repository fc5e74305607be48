//! Library behind the `dyngibbs` command: file formats, the `run` and
//! `bench` drivers, and the verification suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod verify;

pub use commands::{cmd_bench, cmd_run, BenchReport, RunSummary};
pub use config::{DeltaSource, RunConfig};
pub use error::{exit_code, ExitKind, Failure, FormatError};
pub use verify::{cmd_verify, run_suite, CriterionResult, Status, VerifyOptions};
