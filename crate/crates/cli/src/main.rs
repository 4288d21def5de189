//! `cdl`: run experiments, validate specs and print the accounting tables.

mod run;
mod spec;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cdl_core::protocol::accounting::paper_tables;
use cdl_core::Error as CoreError;

use spec::{resolve, Experiment, FlagOverrides, Preset, Resolved, SpecFile};

#[derive(Parser)]
#[command(name = "cdl", version, about = "Common-dictionary compressive CSI feedback simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// TOML experiment spec.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Base parameter set; overrides the spec's `preset`.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Master seed; overrides the spec's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Experiment id; overrides the spec's `experiment`.
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSVs plus manifest.txt.
    Run {
        #[command(flatten)]
        spec: SpecArgs,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for learned dictionaries (`.dict` files).
        #[arg(long)]
        dict_out: Option<PathBuf>,
        /// Extra dictionary evaluated alongside the learned ones.
        #[arg(long)]
        dict_in: Option<PathBuf>,
    },
    /// List every violated invariant without running.
    Validate {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Print the memory, feedback and complexity tables.
    Tables {
        /// Also write the tables as CSV into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status for parse errors and violated invariants.
const EXIT_INVALID: u8 = 2;

enum Failure {
    Invalid(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<CoreError>() {
            Some(CoreError::Parameter(_)) => Failure::Invalid(format!("{e:#}")),
            _ => Failure::Runtime(e),
        }
    }
}

fn load(args: &SpecArgs, out: Option<PathBuf>) -> Result<Resolved, Failure> {
    let file = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Runtime(anyhow::anyhow!("reading {}: {e}", path.display())))?;
            SpecFile::parse(&text, path).map_err(|e| Failure::Invalid(format!("parse error at {e}")))?
        }
        None => SpecFile::default(),
    };
    let flags = FlagOverrides { experiment: args.experiment, preset: args.preset, seed: args.seed, out };
    Ok(resolve(&file, &flags))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { spec, out, dict_out, dict_in } => {
            let resolved = load(&spec, out)?;
            let diags = resolved.diagnostics();
            if !diags.is_empty() {
                let lines: Vec<String> = diags.iter().map(|d| format!("invariant violated: {d}")).collect();
                return Err(Failure::Invalid(lines.join("\n")));
            }
            let experiment = resolved.experiment.expect("checked by diagnostics");
            let args = run::RunArgs { spec_path: spec.spec.as_deref(), dict_in: dict_in.as_deref(), dict_out: dict_out.as_deref() };
            let artifacts = run::run(&resolved, experiment, &args)?;
            for f in &artifacts.files {
                println!("wrote {}", resolved.out.join(f).display());
            }
            for d in &artifacts.dictionaries {
                println!("wrote {}", d.display());
            }
            Ok(())
        }
        Command::Validate { spec } => {
            let resolved = load(&spec, None)?;
            let diags = resolved.diagnostics();
            if diags.is_empty() {
                println!("ok: no invariant violated");
                return Ok(());
            }
            for d in &diags {
                println!("{d}");
            }
            Err(Failure::Invalid(format!("{} invariant(s) violated", diags.len())))
        }
        Command::Tables { out } => {
            let report = paper_tables();
            print!("{report}");
            if let Some(dir) = out {
                write_tables_to(&report, &dir)?;
            }
            Ok(())
        }
    }
}

fn write_tables_to(report: &cdl_core::protocol::accounting::AccountingReport, dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Runtime(anyhow::anyhow!("creating {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    run::write_tables(report, dir, &mut files)?;
    for f in files {
        println!("wrote {}", dir.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
