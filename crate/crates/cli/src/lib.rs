//! Library side of the `blockkrylov` command-line tool: Matrix Market I/O, the
//! JSON job schema, report formatting and task dispatch.

pub mod error;
pub mod job;
pub mod mm;
pub mod report;
pub mod run;

pub use error::CliError;
pub use job::JobSpec;
pub use mm::{read_matrix_market, write_matrix_market, MmError};
pub use report::RunReport;
pub use run::run_job;

use std::path::Path;

/// Loads the job file at `path` and runs it.
pub fn run_job_file(path: &Path) -> Result<RunReport, CliError> {
    let (spec, base) = JobSpec::load(path)?;
    run_job(&spec, &base)
}
