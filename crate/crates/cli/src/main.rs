//! `sandflip`: run catalog scenarios, exact small-lattice analyses, the
//! property suite, and emit plot scripts.
//!
//! Exit codes: 0 success, 1 validation error, 2 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sandflip_core::expcli::{
    emit_plot_script, parse_config, run_experiment, run_oracle, run_property_suite, RunOutcome, OUTPUT_DIR_ENV,
};
use sandflip_core::Error;

#[derive(Parser)]
#[command(name = "sandflip", version, about = "Sandpile and spin-flip process experiments")]
#[command(after_help = format!("Output goes to the config's output_dir, else ${OUTPUT_DIR_ENV}, else ./sandflip-out."))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Exact analysis of the config's model on a lattice of at most 12 sites.
    Oracle { config: PathBuf },
    /// Run the property suite.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write a matplotlib script next to a run manifest.
    Plot { manifest: PathBuf },
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn read_config(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn report(out: &RunOutcome) -> Result<(), Failure> {
    for c in &out.summary.checks {
        println!(
            "{} {}: measured {} expected {} tolerance {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.expected,
            c.tolerance
        );
    }
    println!("data: {}", out.data_path.display());
    println!("summary: {}", out.summary_path.display());
    println!("manifest: {}", out.manifest_path.display());
    if out.partial() {
        return Err(Failure::Runtime("event budget exhausted; results are partial".into()));
    }
    Ok(())
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config } => {
            let spec = parse_config(&read_config(&config)?)?;
            report(&run_experiment(&spec)?)
        }
        Command::Oracle { config } => {
            let spec = parse_config(&read_config(&config)?)?;
            report(&run_oracle(&spec)?)
        }
        Command::Check { seed } => {
            let outcomes = run_property_suite(seed);
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(Failure::Runtime(format!("{failed} of {} properties failed", outcomes.len())));
            }
            Ok(())
        }
        Command::Plot { manifest } => {
            if !manifest.is_file() {
                return Err(Failure::Validation(format!("{}: no such manifest", manifest.display())));
            }
            let script = emit_plot_script(&manifest)?;
            let stem = manifest
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix("_manifest.json"))
                .unwrap_or("run");
            let path = manifest.with_file_name(format!("{stem}_plot.py"));
            std::fs::write(&path, script).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
