//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage, I/O or scenario error.
//! Every error line starts with `error:`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::dsl::{self, DslError, Scenario};
use crate::report::{build_report, Meta, Report, Sections};
use crate::scenario::Encoding;

pub const SEED_ENV: &str = "RELFACTS_SEED";

type CommandFn = fn(&RunConfig) -> Result<Report, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "relfacts",
    version,
    about = "Wigner's-friend GHZ contexts, exact and sampled",
    arg_required_else_help = false
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Product expectation of every context.
    Expect(RunArgs),
    /// Seeded samples of every context.
    Sample(RunArgs),
    /// Exhaustive check of absolute assignments against the constraints.
    CheckAbsolute(RunArgs),
    /// Everything above in one report.
    Report(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario file (.rfs); the built-in three-party scenario when absent.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// literal or computational.
    #[arg(long, default_value = "literal", value_parser = clap::value_parser!(String))]
    pub encoding: String,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10000, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
}

/// Validated run settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub scenario_path: Option<PathBuf>,
    pub encoding: Encoding,
    pub seed: u64,
    pub shots: usize,
    pub output: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario_path: None,
            encoding: Encoding::Literal,
            seed: 0,
            shots: 10000,
            output: OutputFormat::Text,
        }
    }
}

impl TryFrom<RunArgs> for RunConfig {
    type Error = CliError;

    fn try_from(a: RunArgs) -> Result<Self, CliError> {
        let encoding = a.encoding.parse().map_err(CliError::Usage)?;
        let shots = usize::try_from(a.shots).map_err(|_| CliError::Usage("shot count too large".into()))?;
        Ok(RunConfig {
            scenario_path: a.scenario,
            encoding,
            seed: a.seed,
            shots,
            output: a.output,
        })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read scenario file `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("scenario file `{path}` is not valid UTF-8")]
    Utf8 { path: PathBuf },
    #[error("{path}: {source}")]
    Scenario { path: PathBuf, source: DslError },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub fn load_scenario(config: &RunConfig) -> Result<Scenario, CliError> {
    let Some(path) = &config.scenario_path else {
        return Ok(Scenario::builtin(config.encoding));
    };
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let source = String::from_utf8(bytes).map_err(|_| CliError::Utf8 { path: path.clone() })?;
    dsl::load(&source, config.encoding).map_err(|source| CliError::Scenario {
        path: path.clone(),
        source,
    })
}

fn run_sections(config: &RunConfig, sections: Sections) -> Result<Report, CliError> {
    let scenario = load_scenario(config)?;
    let meta = Meta::new(config.encoding, config.seed, config.shots);
    Ok(build_report(&scenario, meta, sections))
}

pub fn cmd_expect(config: &RunConfig) -> Result<Report, CliError> {
    run_sections(
        config,
        Sections {
            contexts: true,
            sampling: false,
            absolute: false,
        },
    )
}

pub fn cmd_sample(config: &RunConfig) -> Result<Report, CliError> {
    run_sections(
        config,
        Sections {
            contexts: true,
            sampling: true,
            absolute: false,
        },
    )
}

pub fn cmd_check_absolute(config: &RunConfig) -> Result<Report, CliError> {
    run_sections(
        config,
        Sections {
            contexts: false,
            sampling: false,
            absolute: true,
        },
    )
}

pub fn cmd_report(config: &RunConfig) -> Result<Report, CliError> {
    run_sections(
        config,
        Sections {
            contexts: true,
            sampling: true,
            absolute: true,
        },
    )
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let rendered = e.render().to_string();
            let _ = write!(err, "{rendered}");
            return 2;
        }
    };
    let (args, command): (RunArgs, CommandFn) = match cli.command {
        Command::Expect(a) => (a, cmd_expect),
        Command::Sample(a) => (a, cmd_sample),
        Command::CheckAbsolute(a) => (a, cmd_check_absolute),
        Command::Report(a) => (a, cmd_report),
    };
    let result = RunConfig::try_from(args).and_then(|config| Ok((command(&config)?, config.output)));
    match result {
        Ok((report, format)) => {
            let body = match format {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Text => report.to_text(),
            };
            let _ = out.write_all(body.as_bytes());
            if report.has_failures() {
                let _ = writeln!(err, "error: one or more checks failed");
                1
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
