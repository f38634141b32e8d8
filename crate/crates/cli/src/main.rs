use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Structured block-Krylov model reduction driven by a JSON job file.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    /// Path to the job file.
    #[arg(long)]
    job: PathBuf,
    /// Print the report to standard output.
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match blockkrylov_cli::run_job_file(&args.job) {
        Ok(report) => {
            if args.verbose {
                print!("{}", report.to_json());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("blockkrylov: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
