//! `cpsfx`: run scenarios with optional effect scripts, validate scripts
//! and analyze process models.
//!
//! Exit codes: 0 clean, 2 safety violation, 3 PMI finding, 64 usage,
//! 65 bad input data, 70 internal failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cpsfx::Time;

mod commands;

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "cpsfx", version, about = "DEVS scenarios with man-in-the-middle cyber effects and PMI analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario, with the attack simulator inserted when a
    /// script is given.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        script: Option<PathBuf>,
        /// End time: an integer or `num/den`.
        #[arg(long, default_value = "1000", value_parser = parse_time)]
        until: Time,
        /// Write the trace (JSON lines) here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check an effect script against a scenario's components and messages.
    Validate { scenario: PathBuf, script: PathBuf },
    /// Compare a component's known process model with its ground truth.
    Pmi {
        scenario: PathBuf,
        #[arg(long)]
        component: String,
    },
    /// Rebuild the report of a saved trace.
    Report {
        scenario: PathBuf,
        trace: PathBuf,
        /// The script the trace was recorded with, for effect counts.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn parse_time(s: &str) -> Result<Time, String> {
    let t: Time = s.trim().parse().map_err(|_| format!("`{s}` is not a time (integer or num/den)"))?;
    if t < Time::from_integer(0) {
        return Err(format!("`{s}` is negative"));
    }
    Ok(t)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run { scenario, script, until, trace, report, format } => {
            commands::run(&scenario, script.as_deref(), until, trace.as_deref(), report.as_deref(), format)
        }
        Command::Validate { scenario, script } => commands::validate(&scenario, &script),
        Command::Pmi { scenario, component } => commands::pmi(&scenario, &component),
        Command::Report { scenario, trace, script, format } => {
            commands::report(&scenario, &trace, script.as_deref(), format)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cpsfx: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
