//! Command-line front end for crowdwatch: batch analysis, paced replay and
//! synthetic stream generation.

pub mod args;
pub mod report;
pub mod run;

pub use args::{AnalyzeArgs, Cli, Command, GenerateArgs, Pace, ReplayArgs};
pub use report::{AlertRecord, RunReport, Summary, TimeseriesRow, TIMESERIES_HEADER};
pub use run::{run_analyze, run_generate, run_replay};

/// Exit code when at least one danger alert fired.
pub const EXIT_DANGER: i32 = 2;
pub const EXIT_ERROR: i32 = 1;
/// Command-line usage error (sysexits `EX_USAGE`).
pub const EXIT_USAGE: i32 = 64;
