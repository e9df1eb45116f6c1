//! `nlwave <command> [--config FILE] [--key value ...]`
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error,
//! 3 blow-up detected, 4 bound or envelope violation.

// Negated comparisons such as `!(h > 0.0)` are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crate::commands::{execute, Verdict};
use crate::config::{Command, RunConfig};
use crate::output::emit;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl From<nlwave::Error> for CliError {
    fn from(e: nlwave::Error) -> Self {
        use nlwave::Error as E;
        match e {
            E::InvalidGrid(_)
            | E::InvalidKernel(_)
            | E::InvalidNonlinearity(_)
            | E::InvalidConfig(_)
            | E::Parse(_)
            | E::UnsupportedNorm(_) => CliError::Config(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io { .. } | CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Run,
    Converge,
    DomainStudy,
    Blowup,
    BlowupRefine,
    Decay,
    KernelInfo,
    LemmaCheck,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Run => Command::Run,
            CommandArg::Converge => Command::Converge,
            CommandArg::DomainStudy => Command::DomainStudy,
            CommandArg::Blowup => Command::Blowup,
            CommandArg::BlowupRefine => Command::BlowupRefine,
            CommandArg::Decay => Command::Decay,
            CommandArg::KernelInfo => Command::KernelInfo,
            CommandArg::LemmaCheck => Command::LemmaCheck,
        }
    }
}

/// Semi-discrete solver for nonlocal nonlinear wave equations.
///
/// Any configuration key can be given as `--key value`, for example
/// `--grid.h 0.1` or `--kernel.name lorentz`. Flags override the config file,
/// which overrides the command defaults.
#[derive(Debug, Parser)]
#[command(name = "nlwave", version)]
struct Cli {
    command: CommandArg,
    /// TOML file with dotted keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the fully resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
    /// `--key value` overrides; `kernel-info` also takes a kernel name.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--key value")]
    overrides: Vec<String>,
}

/// Pulls `--config` and `--print-config` out of the override list, since
/// they may appear after the first `--key value` pair.
fn split_overrides(cli: &mut Cli) -> Result<(), CliError> {
    let mut rest = Vec::new();
    let mut it = std::mem::take(&mut cli.overrides).into_iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--print-config" => cli.print_config = true,
            "--config" => {
                let path = it
                    .next()
                    .ok_or_else(|| CliError::Config("flag --config needs a file".into()))?;
                cli.config = Some(PathBuf::from(path));
            }
            _ => match arg.strip_prefix("--config=") {
                Some(path) => cli.config = Some(PathBuf::from(path)),
                None => rest.push(arg),
            },
        }
    }
    cli.overrides = rest;
    Ok(())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("NLWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("NLWAVE_THREADS must be a positive integer, got '{raw}'")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("cannot start {n} worker threads: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    log::debug!("NLWAVE_THREADS = {n} ignored in the sequential build");
    Ok(())
}

fn resolve(mut cli: Cli) -> Result<(RunConfig, bool), CliError> {
    split_overrides(&mut cli)?;
    let command = Command::from(cli.command);
    let mut args = cli.overrides;
    let mut explicit = match &cli.config {
        Some(path) => config::read_file(path)?,
        None => config::FlatConfig::new(),
    };
    if command == Command::KernelInfo && args.first().is_some_and(|a| !a.starts_with("--")) {
        let name = args.remove(0);
        explicit.insert("kernel.name".into(), toml::Value::String(name));
    }
    explicit.extend(config::parse_flags(&args)?);
    Ok((RunConfig::resolve(command, &explicit)?, cli.print_config))
}

fn run(cli: Cli) -> Result<Verdict, CliError> {
    let (cfg, print_only) = resolve(cli)?;
    if print_only {
        emit(&cfg.to_toml(), None)?;
        return Ok(Verdict::Ok);
    }
    configure_threads()?;
    log::info!("running {} with {} worker threads", cfg.command.name(), nlwave::current_threads());
    let exec = execute(&cfg)?;
    emit(&exec.report.render(cfg.output.format), cfg.output.path.as_deref())?;
    if let (Some(path), Some(trace)) = (&cfg.output.trace, &exec.trace) {
        emit(&trace.render(cfg.output.format), Some(path))?;
    }
    for line in &exec.summary {
        eprintln!("{line}");
    }
    if exec.verdict == Verdict::Stalled {
        return Err(CliError::Runtime("integration stopped before t_end".into()));
    }
    Ok(exec.verdict)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Blowup) => ExitCode::from(3),
        Ok(Verdict::Violation) => ExitCode::from(4),
        Ok(Verdict::Stalled) => ExitCode::from(2),
        Err(e) => {
            eprintln!("nlwave: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
