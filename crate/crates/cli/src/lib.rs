//! Command-line front end and HTTP annotation service.
//!
//! [`run`] parses arguments and dispatches to a subcommand; exit code 0 means
//! success, 1 that validation diagnostics were reported, 2 a usage, parse or
//! runtime error. Diagnostics go to standard error as
//! `FILE:LINE:CODE:MESSAGE`.

pub mod commands;
pub mod config;
pub mod service;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{CliConfig, Overrides};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Usage {
        file: Option<String>,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Core(#[from] gradtag_core::Error),
    /// Diagnostics were already written; carries their number.
    #[error("{0} diagnostics reported")]
    Diagnostics(usize),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError::Usage {
            file: None,
            line: 0,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Diagnostics(_) => 1,
            _ => 2,
        }
    }

    /// `FILE:LINE:CODE:MESSAGE`, with `-` for an unknown file.
    pub fn diagnostic_line(&self) -> Option<String> {
        match self {
            CliError::Usage { file, line, message } => Some(format!(
                "{}:{line}:UsageError:{message}",
                file.as_deref().unwrap_or("-")
            )),
            CliError::Core(err) => Some(format!(
                "{}:{}:{}:{}",
                err.file().unwrap_or("-"),
                err.line().unwrap_or(0),
                err.code(),
                err.root()
            )),
            CliError::Diagnostics(_) => None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gradtag", version, about = "Uncertainty-aware corpus annotation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct CorpusArgs {
    /// Corpus directory (documents/, tagsets/, annotations/, scale.tsv).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Ordinal scale file overriding the corpus's scale.tsv.
    #[arg(long)]
    scale: Option<PathBuf>,
    /// `key=value` config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
struct TrainArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Relative improvement below which EM stops.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "lambda-trans")]
    lambda_trans: Option<f64>,
    #[arg(long = "lambda-emit")]
    lambda_emit: Option<f64>,
    /// Forms seen fewer times are treated as unknown words.
    #[arg(long = "min-count")]
    min_count: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct ModelArgs {
    /// Model file written by `train`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Maximum posterior below which tokens are flagged under an open frame.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Debug, Args, Default)]
struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every record; exit 1 when diagnostics are found.
    Validate {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Corpus counts.
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Records, targets and sentences per annotation case.
    Cases {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Train the machine annotator on the POS layer.
    Train {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tag every document; writes annotation rows.
    Tag {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare tagger output with the corpus's POS annotations.
    Eval {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The k most uncertain tokens.
    Review {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Multi-annotator fusion and conflict report.
    Aggregate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// `conjunctive` (min) or `disjunctive` (max).
        #[arg(long, default_value = "conjunctive")]
        mode: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Serve the corpus over HTTP.
    Serve {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        port: Option<u16>,
    },
}

fn build_config(
    corpus: &CorpusArgs,
    train: Option<&TrainArgs>,
    model: Option<&ModelArgs>,
    out: Option<&OutArgs>,
    k: Option<usize>,
    port: Option<u16>,
) -> Result<CliConfig, CliError> {
    let mut config = match &corpus.config {
        Some(path) => CliConfig::from_file(path)?,
        None => CliConfig::default(),
    };
    let defaults = TrainArgs::default();
    let train = train.unwrap_or(&defaults);
    config.apply(&Overrides {
        corpus: corpus.corpus.clone(),
        scale: corpus.scale.clone(),
        model: model.and_then(|m| m.model.clone()),
        out: out.and_then(|o| o.out.clone()),
        seed: train.seed,
        max_iters: train.max_iters,
        tol: train.tol,
        lambda_trans: train.lambda_trans,
        lambda_emit: train.lambda_emit,
        min_count: train.min_count,
        threshold: model.and_then(|m| m.threshold),
        port,
        k,
    });
    config.validate()?;
    Ok(config)
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI with explicit output streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let target: &mut dyn Write = if informational { out } else { err };
            let _ = write!(target, "{}", e.render());
            return if informational { 0 } else { 2 };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            if let Some(line) = e.diagnostic_line() {
                let _ = writeln!(err, "{line}");
            }
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate { corpus } => {
            let config = build_config(&corpus, None, None, None, None, None)?;
            commands::validate(&config, out, err)
        }
        Command::Stats { corpus, out: o } => {
            let config = build_config(&corpus, None, None, Some(&o), None, None)?;
            commands::stats(&config, out)
        }
        Command::Cases { corpus, out: o } => {
            let config = build_config(&corpus, None, None, Some(&o), None, None)?;
            commands::cases(&config, out, err)
        }
        Command::Train { corpus, train, out: o } => {
            let config = build_config(&corpus, Some(&train), None, Some(&o), None, None)?;
            commands::train(&config, out, err)
        }
        Command::Tag { corpus, model, out: o } => {
            let config = build_config(&corpus, None, Some(&model), Some(&o), None, None)?;
            commands::tag(&config, out)
        }
        Command::Eval { corpus, model, out: o } => {
            let config = build_config(&corpus, None, Some(&model), Some(&o), None, None)?;
            commands::eval(&config, out)
        }
        Command::Review {
            corpus,
            model,
            k,
            out: o,
        } => {
            let config = build_config(&corpus, None, Some(&model), Some(&o), k, None)?;
            commands::review(&config, out)
        }
        Command::Aggregate { corpus, mode, out: o } => {
            let config = build_config(&corpus, None, None, Some(&o), None, None)?;
            commands::aggregate(&config, &mode, out, err)
        }
        Command::Serve { corpus, model, port } => {
            let config = build_config(&corpus, None, Some(&model), None, None, port)?;
            commands::serve(&config, out)
        }
    }
}
