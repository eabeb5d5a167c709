//! `coherence`: run a program of knowledge-base statements and queries.
//!
//! Exit codes: 0 when every query met its expectation, 1 when some query
//! failed or came back unknown, 2 on unreadable input or a parse error.

mod program;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use coherence_core::EngineConfig;

#[derive(Parser)]
#[command(name = "coherence", version, about = "Coherence-based probabilistic reasoning")]
struct Args {
    /// Program file: `default:` / `negdefault:` statements and `query:` lines.
    file: PathBuf,

    /// Emit the report as JSON instead of text.
    #[arg(long)]
    json: bool,

    /// Seed for the random phase of witness and counterexample searches.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Candidate points tried per search.
    #[arg(long, default_value_t = 1000)]
    budget: usize,

    /// Denominator of the certificate re-verification grid.
    #[arg(long, default_value_t = 4)]
    grid: u32,

    /// Include zero-layer traces in the report.
    #[arg(long)]
    trace: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match fs::read_to_string(&args.file) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.file.display());
            return ExitCode::from(2);
        }
    };
    let program = match program::parse_program(&text) {
        Ok(program) => program,
        Err(e) => {
            eprintln!("error: {}: {e}", args.file.display());
            return ExitCode::from(2);
        }
    };
    let config = EngineConfig {
        budget: args.budget,
        seed: args.seed,
        grid_denom: args.grid,
    };
    let report = report::run_program(&program, &config, args.trace);
    if args.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if report.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
