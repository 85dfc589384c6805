//! The spanbound binary: check, fuzz, report, atoms, embed-group.
//!
//! Stdout carries only deterministic content (records, counterexamples,
//! summaries); timing goes to stderr so repeated runs with the same seed
//! produce byte-identical output and logs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use spanbound::scalars::BackendDescriptor;
use spanbound_cli::fuzz::{run_fuzz, CheckerKind, FuzzConfig};
use spanbound_cli::instance::{InstanceFile, Query, RunMode};
use spanbound_cli::report;
use spanbound_cli::runner::{run_group_instance, run_instance, run_loaded, CliError, RunReport};

#[derive(Parser)]
#[command(
    name = "spanbound",
    version,
    about = "Exact span-dimension inequalities: check instances, fuzz backends, report logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the check described by a JSON instance file.
    Check {
        file: PathBuf,
        /// Override the instance's search budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Override the instance's assert/report mode.
        #[arg(long, value_enum)]
        mode: Option<RunMode>,
        /// Append the run records to a JSONL log.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate and check seeded random instances.
    Fuzz {
        /// Backend descriptor: inline JSON or a path to a JSON file.
        #[arg(long)]
        backend: String,
        #[arg(long, value_enum)]
        checker: CheckerKind,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest sampled set size.
        #[arg(long, default_value_t = 3)]
        max_set: usize,
        /// Power rows for the Plünnecke checkers.
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = RunMode::Assert)]
        mode: RunMode,
        /// Worker threads; results are identical for any thread count.
        /// Defaults to SPANBOUND_THREADS, then to the machine.
        #[arg(long)]
        threads: Option<usize>,
        /// Append the run records to a JSONL log.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize JSONL run logs as Markdown, optionally with raw CSV.
    Report {
        logs: Vec<PathBuf>,
        /// Write the Markdown summary here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every raw quantity as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Connectivity constant and atoms; the file must hold an atoms query.
    Atoms {
        file: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed group sets in a group algebra and check correspondences.
    EmbedGroup {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_backend_arg(spec: &str) -> Result<BackendDescriptor, CliError> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(spec)
            .map_err(|e| CliError::Usage(format!("cannot read {spec}: {e}")))?
    };
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad backend descriptor: {e}")))
}

fn threads_from(flag: Option<usize>) -> usize {
    if let Some(n) = flag {
        return n.max(1);
    }
    if let Ok(v) = std::env::var("SPANBOUND_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1)
}

/// Print a report and append it to the log; `verbose` prints every record
/// rather than only violations.
fn finish(report: &RunReport, out: Option<&Path>, verbose: bool) -> Result<i32, CliError> {
    for r in &report.records {
        if verbose || !r.holds {
            println!("{}", r.render_line());
        }
    }
    for r in report.records.iter().filter(|r| !r.holds) {
        if let Some(sets) = &r.sets {
            let kind = if r.failed() { "counterexample" } else { "finding" };
            let rendered = serde_json::to_string(sets)
                .map_err(|e| CliError::Usage(format!("cannot serialize sets: {e}")))?;
            println!("{kind}: {rendered}");
        }
    }
    println!(
        "{}: {} records, {} failures, {} findings",
        report.command,
        report.records.len(),
        report.failures,
        report.findings
    );
    if let Some(path) = out {
        report::append_jsonl(path, &report.records)?;
    }
    Ok(report.exit_code)
}

fn real_main() -> Result<i32, CliError> {
    let cli = Cli::parse();
    let started = Instant::now();
    let code = match cli.command {
        Command::Check {
            file,
            budget,
            mode,
            out,
        } => {
            let report = run_instance(&file, mode, budget)?;
            finish(&report, out.as_deref(), true)?
        }
        Command::Fuzz {
            backend,
            checker,
            count,
            seed,
            max_set,
            n_max,
            budget,
            mode,
            threads,
            out,
        } => {
            let cfg = FuzzConfig {
                backend: parse_backend_arg(&backend)?,
                checker,
                count,
                seed,
                max_set,
                n_max,
                budget,
                mode,
                threads: threads_from(threads),
            };
            let report = run_fuzz(&cfg)?;
            finish(&report, out.as_deref(), false)?
        }
        Command::Report { logs, out, csv } => {
            let records = report::read_jsonl(&logs)?;
            let md = report::markdown_summary(&records);
            match out {
                Some(path) => fs::write(&path, &md)
                    .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{md}"),
            }
            if let Some(path) = csv {
                let table = report::csv_quantities(&records);
                fs::write(&path, table)
                    .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            }
            0
        }
        Command::Atoms { file, budget, out } => {
            let loaded = InstanceFile::load(&file)?;
            if !matches!(loaded.query, Query::Atoms { .. }) {
                return Err(CliError::Usage(
                    "the atoms command needs an instance with an atoms query".into(),
                ));
            }
            let report = run_loaded(&loaded, None, budget)?;
            finish(&report, out.as_deref(), true)?
        }
        Command::EmbedGroup { file, out } => {
            let report = run_group_instance(&file)?;
            finish(&report, out.as_deref(), true)?
        }
    };
    eprintln!("elapsed: {}ms", started.elapsed().as_millis());
    Ok(code)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
