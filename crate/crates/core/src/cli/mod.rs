//! Command-line entry point: `sync`, `verify`, `report` and `drift`.
//!
//! Exit codes: 0 clean, 1 traceability finding, 2 operational error.
//! Findings are printed to stdout, one per line, as
//! `LEVEL file:line constant_name message` with LEVEL `WARNING` or `ERROR`.

mod analyze;
mod sync;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::codegen::CodegenError;
use crate::config::{ConfigError, ToolConfig, DEFAULT_CONFIG_FILE};
use crate::lifecycle::LifecycleError;
use crate::scanner::ScanError;
use crate::source::SourceError;
use crate::vcs::{VcsError, WORKTREE};

pub use analyze::{cmd_drift, cmd_report, cmd_verify};
pub use sync::cmd_sync;

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FINDING: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error("requirement {id}: {source}")]
    Lifecycle {
        id: String,
        #[source]
        source: LifecycleError,
    },
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Vcs(#[from] VcsError),
    #[error("no state file {path} at revision {revision}; run `reqtocode sync` first")]
    MissingState { path: String, revision: String },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Parser)]
#[command(name = "reqtocode", version, about = "Requirement traceability compiler")]
pub struct Cli {
    /// Configuration file; its directory is the repository root.
    #[arg(long, global = true, default_value = DEFAULT_CONFIG_FILE)]
    pub config: PathBuf,
    /// Revision to analyze: a branch, commit, or WORKTREE for the checkout.
    #[arg(long, global = true, default_value = WORKTREE)]
    pub revision: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load requirements, advance lifecycle states and regenerate artifacts.
    Sync,
    /// Check references: unresolved ones fail, deprecated ones warn.
    Verify(VerifyArgs),
    /// Coverage report, or a delta against a baseline revision.
    Report(ReportArgs),
    /// Requirement/code modification-time drift.
    Drift(DriftArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Treat references to deprecated Traceables as errors.
    #[arg(long)]
    pub deny_deprecated: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Report only references new relative to this revision. Without a value
    /// the configured `report.baseline` is used.
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    pub baseline: Option<String>,
    /// `table` or `json`.
    #[arg(long, default_value = "table")]
    pub format: String,
    /// Restrict rows to one requirement set.
    #[arg(long = "set")]
    pub set_filter: Option<String>,
    /// Leave out the drift section.
    #[arg(long)]
    pub no_drift: bool,
    /// Fail (exit 1) when fewer than this percentage of rows have both
    /// implementation and test references.
    #[arg(long)]
    pub min_coverage: Option<f64>,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// POST the JSON report to this endpoint (URL or file path).
    #[arg(long)]
    pub post: Option<String>,
}

impl Default for ReportArgs {
    fn default() -> Self {
        Self {
            baseline: None,
            format: "table".into(),
            set_filter: None,
            no_drift: false,
            min_coverage: None,
            output: None,
            post: None,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct DriftArgs {
    /// Exit 1 when any drift is found.
    #[arg(long)]
    pub strict_drift: bool,
    /// Seconds of clock difference to ignore; overrides the configuration.
    #[arg(long)]
    pub tolerance: Option<i64>,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            if informational {
                let _ = write!(out, "{e}");
                return EXIT_CLEAN;
            }
            let _ = write!(err, "{e}");
            return EXIT_ERROR;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                let _ = writeln!(err, "  caused by: {s}");
                source = s.source();
            }
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = ToolConfig::load(&cli.config)?;
    match &cli.command {
        Command::Sync => cmd_sync(&config, out),
        Command::Verify(args) => cmd_verify(&config, &cli.revision, args, out),
        Command::Report(args) => cmd_report(&config, &cli.revision, args, out),
        Command::Drift(args) => cmd_drift(&config, &cli.revision, args, out),
    }
}

pub(crate) fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
