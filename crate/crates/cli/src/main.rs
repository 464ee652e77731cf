//! `natcalc`: explore, compare and check process terms written in `.nat` files.
//!
//! Exit codes: 0 success or bisimilar, 1 bad input or configuration,
//! 2 fresh-channel budget exceeded, 3 not bisimilar, 4 inconclusive or
//! incomplete exploration, 5 an axiom check failed.

mod cmd;
mod config;
mod error;
mod label;
mod source;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use natcalc::{Basic, Method, Mode, Proper};

use crate::cmd::axioms::{AxiomsOptions, Mutant, Structure};
use crate::cmd::export::Format;
use crate::cmd::trace::TraceOptions;
use crate::config::{Config, ConfigArgs};
use crate::error::CliError;
use crate::source::{read_term, Loaded};

#[derive(Parser)]
#[command(name = "natcalc", version, about = "Transition systems and bisimilarity for a higher-order process calculus")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SystemArg {
    Basic,
    Proper,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Strong,
    Weak,
    Mixed,
}

#[derive(Subcommand)]
enum Command {
    /// List the transitions of a term
    Step {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "basic")]
        system: SystemArg,
        /// Which term of the file (0-based)
        #[arg(long, default_value_t = 0)]
        term: usize,
        /// Print the rule derivation of every transition
        #[arg(long)]
        audit: bool,
    },
    /// Random or exhaustive bounded walks
    Trace {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "basic")]
        system: SystemArg,
        #[arg(long, default_value_t = 0)]
        term: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        walks: usize,
        /// Enumerate every path instead of sampling
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 1000)]
        max_paths: usize,
    },
    /// Decide bisimilarity of two terms
    Bisim {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "basic")]
        system: SystemArg,
        #[arg(long, value_enum, default_value = "strong")]
        mode: ModeArg,
        /// `exact` or `bounded:K`
        #[arg(long, default_value = "exact", value_parser = parse_method)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        left_term: usize,
        #[arg(long, default_value_t = 0)]
        right_term: usize,
    },
    /// Check the residual axioms on sampled relations
    Axioms {
        /// Files whose explored states form the term carrier
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "basic")]
        structure: Structure,
        /// Number of sampled relations
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 10)]
        max_terms: usize,
        /// Also write the report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, hide = true)]
        mutant: Option<Mutant>,
    },
    /// Write the explored transition graph
    Export {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "basic")]
        system: SystemArg,
        #[arg(long, default_value_t = 0)]
        term: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Add the edges of weak saturation
        #[arg(long)]
        weak: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s.split_once(':') {
        None if s == "exact" => Ok(Method::Exact),
        Some(("bounded", k)) => k.parse().map(Method::Bounded).map_err(|e| format!("bad round count {k:?}: {e}")),
        _ => Err(format!("expected `exact` or `bounded:K`, got {s:?}")),
    }
}

macro_rules! with_system {
    ($system:expr, $f:ident => $body:expr) => {
        match $system {
            SystemArg::Basic => {
                type $f = Basic;
                $body
            }
            SystemArg::Proper => {
                type $f = Proper;
                $body
            }
        }
    };
}

fn single(file: &Path, term: usize) -> Result<Loaded, CliError> {
    Loaded::new(&[read_term(file, term)?])
}

fn write_output(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = Config::load(&cli.config)?;
    match cli.command {
        Command::Step { file, system, term, audit } => {
            let loaded = single(&file, term)?;
            let u = cfg.universe(loaded.free())?;
            with_system!(system, F => cmd::step::run::<F>(&loaded.processes[0], &loaded.names, &u, audit))
        }
        Command::Trace { file, system, term, steps, walks, exhaustive, max_paths } => {
            let loaded = single(&file, term)?;
            let u = cfg.universe(loaded.free())?;
            let opts = TraceOptions { steps, walks, exhaustive, max_paths, seed: cfg.seed };
            with_system!(system, F => cmd::trace::run::<F>(&loaded.processes[0], &loaded.names, &u, &opts))
        }
        Command::Bisim { left, right, system, mode, method, left_term, right_term } => {
            let loaded = Loaded::new(&[read_term(&left, left_term)?, read_term(&right, right_term)?])?;
            let u = cfg.universe(loaded.free())?;
            let mode = match mode {
                ModeArg::Strong => Mode::Strong,
                ModeArg::Weak => Mode::Weak,
                ModeArg::Mixed => Mode::Mixed,
            };
            let (p, q) = (&loaded.processes[0], &loaded.processes[1]);
            with_system!(system, F => cmd::bisim::run::<F>(p, q, &loaded.names, &u, cfg.limits, mode, method))
        }
        Command::Axioms { files, structure, cases, max_terms, report, mutant } => {
            let opts = AxiomsOptions { structure, mutant, cases, max_terms, files: &files };
            let outcome = cmd::axioms::run(&cfg, &opts)?;
            outcome.print();
            if let Some(path) = report {
                write_output(&path, &(serde_json::to_string_pretty(&outcome).expect("report serializes") + "\n"))?;
            }
            Ok(if outcome.passed() { 0 } else { 5 })
        }
        Command::Export { file, system, term, format, weak, output } => {
            let loaded = single(&file, term)?;
            let u = cfg.universe(loaded.free())?;
            let text = with_system!(system, F => cmd::export::render::<F>(
                &loaded.processes[0], &loaded.names, &u, cfg.limits, weak, format
            ))?;
            match output {
                Some(path) => write_output(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
