//! `spectrum-sim`: run ledger scenarios and generate fuzz scenarios.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use spectrum_core::scenario::{
    execute, generate_fuzz_scenario, parse_scenario, render_events, ExecOptions, FuzzConfig,
};

#[derive(Parser)]
#[command(name = "spectrum-sim", version, about = "Spectrum token ledger simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a scenario file against a fresh ledger.
    Run {
        scenario: PathBuf,
        /// Write the event log, one JSON record per line.
        #[arg(long)]
        events_out: Option<PathBuf>,
        /// Write the final state document.
        #[arg(long)]
        state_out: Option<PathBuf>,
        /// Write the full run report as JSON.
        #[arg(long)]
        report_out: Option<PathBuf>,
        /// Check every ledger invariant after each command.
        #[arg(long)]
        check_invariants: bool,
        /// Accepted for symmetry with `fuzz`; scenario runs are seed-free.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a random self-checking scenario.
    Fuzz {
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 8)]
        accounts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run(
    scenario: &Path,
    events_out: Option<&Path>,
    state_out: Option<&Path>,
    report_out: Option<&Path>,
    check_invariants: bool,
) -> anyhow::Result<ExitCode> {
    let text = match fs::read_to_string(scenario) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: reading {}: {e}", scenario.display());
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    let parsed = match parse_scenario(&text) {
        Ok(parsed) => parsed,
        Err(e) => {
            eprintln!("{}: parse error at {e}", scenario.display());
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };

    let report = execute(&parsed, ExecOptions { check_invariants });

    if let Some(path) = events_out {
        write(path, &render_events(&report.events))?;
    }
    if let Some(path) = state_out {
        write(path, &report.final_snapshot.to_json())?;
    }
    if let Some(path) = report_out {
        write(path, &report.to_json())?;
    }

    for a in &report.assertions {
        let status = if a.passed { "PASS" } else { "FAIL" };
        if a.passed {
            println!("{status} line {}: {}", a.line_no, a.expected);
        } else {
            println!("{status} line {}: expected {}, got {}", a.line_no, a.expected, a.actual);
        }
    }
    if let Some(failure) = &report.aborted {
        println!("ABORT line {}: {}", failure.line_no, failure.reason);
    }
    let passed = report.assertions.iter().filter(|a| a.passed).count();
    println!(
        "{} commands, {passed}/{} assertions passed, {} events",
        report.commands_executed,
        report.assertions.len(),
        report.events.len()
    );

    if report.success() {
        Ok(ExitCode::SUCCESS)
    } else {
        if let Some(line) = report.first_failing_line() {
            eprintln!("{}: first failure at line {line}", scenario.display());
        }
        Ok(ExitCode::from(EXIT_FAILURE))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Run {
            scenario,
            events_out,
            state_out,
            report_out,
            check_invariants,
            seed: _,
        } => run(
            &scenario,
            events_out.as_deref(),
            state_out.as_deref(),
            report_out.as_deref(),
            check_invariants,
        ),
        Cmd::Fuzz {
            steps,
            accounts,
            seed,
            out,
        } => {
            let text = generate_fuzz_scenario(&FuzzConfig { steps, accounts, seed });
            match out {
                Some(path) => write(&path, &text).map(|()| ExitCode::SUCCESS),
                None => {
                    print!("{text}");
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(EXIT_FAILURE)
    })
}
