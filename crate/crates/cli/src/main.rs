use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use coxhom::solver::SliceStrategy;
use coxhom_cli::commands::{self, CliError, SolveOptions};
use coxhom_cli::io::condition_csv;

#[derive(Parser)]
#[command(name = "coxhom", version, about = "Solve sparse polynomial systems on toric varieties")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SliceArg {
    Random,
    Orthogonal,
}

#[derive(Subcommand)]
enum Command {
    /// Track all paths and write the solutions as JSON.
    Solve {
        system: String,
        #[arg(long, default_value_t = 0.1)]
        tau_eg: f64,
        #[arg(long, value_enum, default_value = "random")]
        slice: SliceArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// System file whose start block is used instead of generating one.
        #[arg(long)]
        start: Option<String>,
        /// Write per-step condition numbers to this CSV file.
        #[arg(long)]
        emit_cond: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Print the toric data of the system.
    Info {
        system: String,
        /// Comma-separated 1-based Cox indices; prints the orbit degree of that stratum.
        #[arg(long)]
        stratum: Option<String>,
    },
    /// Print the mixed volume of the supports.
    Mv { system: String },
    /// Attach a generated start system and its solutions to the system file.
    Start {
        system: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
}

fn emit(out: Option<&str>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => commands::write_output(path, text.as_bytes()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Solve { system, tau_eg, slice, seed, start, emit_cond, out } => {
            let file = commands::read_system_file(&system)?;
            let slice = match slice {
                SliceArg::Random => SliceStrategy::Random,
                SliceArg::Orthogonal => SliceStrategy::Orthogonal,
            };
            let opts = SolveOptions { tau_eg, slice, seed, start, record_condition: emit_cond.is_some() };
            let report = commands::solve(&file, &opts)?;
            let json = serde_json::to_string_pretty(&report.file).map_err(|e| CliError::Io(e.to_string()))?;
            emit(out.as_deref(), &json)?;
            if let Some(path) = emit_cond {
                let csv = condition_csv(&report.output.condition_log).map_err(|e| CliError::Io(e.to_string()))?;
                commands::write_output(&path, &csv)?;
            }
            eprintln!(
                "{} solutions, {} failures (bkk {})",
                report.output.solutions.len(),
                report.output.failures.len(),
                report.file.header.bkk
            );
            for f in &report.output.failures {
                eprintln!("path {}: {}", f.index, f.reason);
            }
            Ok(report.exit_code())
        }
        Command::Info { system, stratum } => {
            let file = commands::read_system_file(&system)?;
            print!("{}", commands::info(&file.system()?, stratum.as_deref())?);
            Ok(0)
        }
        Command::Mv { system } => {
            let file = commands::read_system_file(&system)?;
            println!("{}", commands::mv(&file.system()?)?);
            Ok(0)
        }
        Command::Start { system, seed, out } => {
            let file = commands::read_system_file(&system)?;
            let with_start = commands::start(&file, seed)?;
            let json = serde_json::to_string_pretty(&with_start).map_err(|e| CliError::Io(e.to_string()))?;
            emit(out.as_deref(), &json)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
