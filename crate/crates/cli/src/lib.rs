//! Driver behind the `hml` binary: family resolution, grids, the
//! verification suites and deterministic report encoding.

pub mod error;
pub mod grid;
pub mod report;
pub mod run;
pub mod suites;

pub use error::CliError;
pub use grid::{GridPoint, GridSpec};
pub use report::{Report, Table, Value};
pub use run::{config_hash, run_verify, Suite, VerifyOptions};
