//! Command-line front end for the relcoalg workbench.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code together with everything it would print, so the binary is a thin
//! wrapper and tests can drive commands in-process.

mod commands;
pub mod fixtures;
mod load;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relcoalg::Error;
use serde_json::{json, Value as Json};

pub use load::{load_relation, load_system, resolve_relator, System};

/// Success, or the checked property holds.
pub const EXIT_HOLDS: i32 = 0;
/// The checked property fails; a certificate is printed.
pub const EXIT_FAILS: i32 = 1;
/// Usage or parse error.
pub const EXIT_USAGE: i32 = 2;
/// A size or search bound was exceeded.
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "relcoalg", version, about = "Relators, lax extensions and coalgebraic bisimulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Relator expression, or one of `barr`, `cobarr`, `upto-difun`,
    /// `twisted`, `twisted-bottom` applied to the system's functor.
    #[arg(long, global = true)]
    pub relator: Option<String>,
    /// Size bound: states per system, or carrier size for law checks.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_size: Option<u64>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Largest `|F X|` any evaluation may materialise.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_card: u64,
}

impl RunConfig {
    fn max_size_or(&self, default: usize) -> usize {
        self.max_size.map_or(default, |n| n as usize)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Greatest simulation between two systems (or a system and itself).
    Similarity { left: PathBuf, right: Option<PathBuf> },
    /// Checks that a relation is a simulation.
    Check {
        left: PathBuf,
        right: Option<PathBuf>,
        /// Relation file: `x -> y` lines or JSON.
        #[arg(long)]
        witness: PathBuf,
    },
    /// Lattice of normal lax extensions of `Exp(A)`.
    Lattice {
        /// Comma-separated labels; empty for no labels.
        #[arg(long, default_value = "a,b")]
        labels: String,
        /// Node cap for the generator-driven mode.
        #[arg(long)]
        max_nodes: Option<usize>,
    },
    /// Twisted bisimulation on labelled transition systems.
    Twisted {
        left: PathBuf,
        right: Option<PathBuf>,
        /// Pair `x,y` for which to find minimal witnesses.
        #[arg(long)]
        pair: Option<String>,
        /// `top`, `bottom` or generators such as `[(a,b),(b,b),(b,a)]`.
        #[arg(long, default_value = "top")]
        submonoid: String,
        /// Relation to check instead of searching.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Compares similarity with behavioural equivalence on random coalgebras.
    OracleCompare {
        #[arg(long)]
        functor: String,
        /// Number of random pairs.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Checks relator laws exhaustively on small carriers.
    Properties {
        /// Comma-separated subset of normal, lax, connector, converse,
        /// difunctional, sandwich.
        #[arg(long, default_value = "normal,lax,connector,converse")]
        laws: String,
    },
    /// Runs the built-in fixture suite.
    Examples {
        /// Alternative fixture file.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A command result in every supported format.
pub(crate) struct Report {
    pub code: i32,
    pub text: String,
    pub json: Json,
    pub dot: Option<String>,
}

pub(crate) fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeBound { .. } | Error::Budget(_) => EXIT_RESOURCE,
        Error::Verification(_) => EXIT_FAILS,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_HOLDS };
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: rendered }
            } else {
                Outcome { code, stdout: rendered, stderr: String::new() }
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    let config = &cli.config;
    relcoalg::functor::set_cardinality_bound(config.max_card);
    let result = match &cli.command {
        Command::Similarity { left, right } => commands::similarity_cmd(config, left, right.as_deref()),
        Command::Check { left, right, witness } => commands::check(config, left, right.as_deref(), witness),
        Command::Lattice { labels, max_nodes } => commands::lattice(config, labels, *max_nodes),
        Command::Twisted { left, right, pair, submonoid, witness } => commands::twisted(
            config,
            left,
            right.as_deref(),
            pair.as_deref(),
            submonoid,
            witness.as_deref(),
        ),
        Command::OracleCompare { functor, samples } => commands::oracle_compare(config, functor, *samples),
        Command::Properties { laws } => commands::properties(config, laws),
        Command::Examples { fixtures } => commands::examples(config, fixtures.as_deref()),
    };
    match result {
        Ok(report) => render(config, report),
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn render(config: &RunConfig, report: Report) -> Outcome {
    let header = format!(
        "seed {}, max-size {}, max-card {}",
        config.seed,
        config.max_size.map_or_else(|| "default".to_owned(), |n| n.to_string()),
        config.max_card
    );
    let stdout = match config.format {
        Format::Text => format!("# {header}\n{}", report.text),
        Format::Json => {
            let mut json = report.json;
            if let Json::Object(map) = &mut json {
                map.insert(
                    "config".into(),
                    json!({ "seed": config.seed, "max_size": config.max_size, "max_card": config.max_card }),
                );
            }
            format!("{}\n", serde_json::to_string_pretty(&json).expect("JSON values serialise"))
        }
        Format::Dot => match report.dot {
            Some(dot) => format!("// {header}\n{dot}"),
            None => {
                return Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: "error: this command has no DOT output\n".into(),
                }
            }
        },
    };
    Outcome {
        code: report.code,
        stdout,
        stderr: String::new(),
    }
}
