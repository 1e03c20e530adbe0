//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::config::{Format, OperatorSpec, ParamsOverride, RunConfig};
use super::{
    cmd_bounds, cmd_converge, cmd_spectrum, cmd_verify, configure_threads, ExitStatus, Report,
};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "transfer-spectra",
    version,
    about = "Eigenvalue bounds and Galerkin spectra of transfer operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Bound sequences for n = 1..n_max.
    Bounds,
    /// Spectrum of the truncated operator with bound comparison.
    Spectrum,
    /// Check stable, significant eigenvalues against the bound.
    Verify,
    /// Eigenvalues across truncation sizes.
    Converge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Gauss,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Built-in operator, replacing the configured one.
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
    /// Truncation size N.
    #[arg(long, global = true)]
    pub size: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Certified parameters, e.g. `r=0.6667,W=4.9348,d=1`.
    #[arg(long, global = true)]
    pub params: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl Options {
    /// Loads the configuration file (or the default) and applies flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(Preset::Gauss) = self.preset {
            config.operator = OperatorSpec::Gauss {};
            config.geometry = None;
        }
        if let Some(n) = self.n_max {
            config.n_max = n;
        }
        if let Some(size) = self.size {
            config.numerics.size = size;
        }
        if let Some(format) = self.format {
            config.output.format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        if let Some(out) = &self.out {
            config.output.path = Some(out.clone());
        }
        if let Some(text) = &self.params {
            config.params = config.params.merged(ParamsOverride::parse(text)?);
        }
        config.validate()?;
        Ok(config)
    }
}

fn execute(command: Command, config: &RunConfig) -> Result<Report> {
    match command {
        Command::Bounds => cmd_bounds(config),
        Command::Spectrum => cmd_spectrum(config),
        Command::Verify => cmd_verify(config),
        Command::Converge => cmd_converge(config),
    }
}

fn emit(report: &Report, config: &RunConfig) -> Result<()> {
    let format = config.output.format;
    match &config.output.path {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            report.write(config, format, &mut file)?;
            file.flush()?;
        }
        None => report.write(config, format, std::io::stdout().lock())?,
    }
    Ok(())
}

/// Runs one invocation, printing diagnostics to standard error.
pub fn run(cli: &Cli) -> ExitStatus {
    let outcome = configure_threads()
        .and_then(|_| cli.options.resolve())
        .and_then(|config| {
            let report = execute(cli.command, &config)?;
            emit(&report, &config)?;
            Ok(report)
        });
    match outcome {
        Ok(report) => {
            if report.status == ExitStatus::BoundViolation {
                eprintln!("bound violated at n = {}", report.summary["result"]["failed"]);
            }
            report.status
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitStatus::of_error(&error)
        }
    }
}

/// Parses arguments; usage errors count as configuration errors.
pub fn parse_args<I, T>(args: I) -> std::result::Result<Cli, ExitStatus>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args).map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            ExitStatus::ConfigError
        } else {
            ExitStatus::Success
        }
    })
}

impl From<clap::Error> for Error {
    fn from(e: clap::Error) -> Self {
        Error::Config(e.to_string())
    }
}
