use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "finlap", version, about = "Finite Laplace transform toolkit")]
pub struct Cli {
    /// JSON file with parameter defaults; command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form transform of a signal and its entireness report
    Transform(TransformArgs),
    /// Polynomial reconstruction from Maclaurin coefficients
    Invert(InvertArgs),
    /// Terminal values from analyticity of the response
    Terminal(TerminalArgs),
    /// Step into controller u' + c u = r, then plant y' + p y = u
    Design(DesignArgs),
    /// Transform of a convolution against the product of transforms
    Convolve(ConvolveArgs),
    /// Check that an expression in s is entire
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Signal, e.g. "2 t exp(-t) cos(3 t)"
    #[arg(long)]
    pub signal: Option<String>,
    /// Horizon T
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[arg(long, conflicts_with = "expr")]
    pub signal: Option<String>,
    /// Expression in s, e.g. "(1 - exp(-s))/s"
    #[arg(long)]
    pub expr: Option<String>,
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<f64>,
    /// Number of coefficients
    #[arg(long = "N", value_name = "N")]
    pub order: Option<usize>,
    /// Number of samples
    #[arg(long = "K", value_name = "K")]
    pub samples: Option<usize>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Demo {
    /// y' = -z, z' = y with y(0) = 1, z(0) = 0
    #[value(alias = "sectionV")]
    Rotation,
    /// step into controller (c) then plant (p)
    #[value(alias = "sectionVII")]
    Cascade,
}

#[derive(Debug, Args)]
pub struct TerminalArgs {
    #[arg(long, value_enum, conflicts_with_all = ["poly", "init", "input"])]
    pub demo: Option<Demo>,
    /// System coefficients p_0,..,p_n of Σ p_k y^(k) = u
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub poly: Option<Vec<f64>>,
    /// Initial values y(0),..,y^(n-1)(0)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub init: Option<Vec<f64>>,
    /// Input signal u(t)
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Plant pole
    #[arg(long)]
    pub p: Option<f64>,
    /// Controller pole(s), comma separated
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<f64>,
    #[arg(long = "N", value_name = "N")]
    pub order: Option<usize>,
    #[arg(long = "K", value_name = "K")]
    pub samples: Option<usize>,
    /// Stage table; with several c values one file per value
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Sweep summary table
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvolveArgs {
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<f64>,
    /// Sample points, comma separated, e.g. "1,0.5+2i,-3i"
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s: Option<Vec<String>>,
    /// Grid intervals over [0, 2T]
    #[arg(long = "M", value_name = "M")]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "signal")]
    pub expr: Option<String>,
    #[arg(long)]
    pub signal: Option<String>,
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Parameter defaults read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub signal: Option<String>,
    pub expr: Option<String>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    #[serde(rename = "N")]
    pub order: Option<usize>,
    #[serde(rename = "K")]
    pub samples: Option<usize>,
    #[serde(rename = "M")]
    pub grid: Option<usize>,
    pub p: Option<f64>,
    pub c: Option<Vec<f64>>,
    pub f: Option<String>,
    pub g: Option<String>,
    pub s: Option<Vec<String>>,
    pub tol: Option<f64>,
    pub demo: Option<Demo>,
    pub poly: Option<Vec<f64>>,
    pub init: Option<Vec<f64>>,
    pub input: Option<String>,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Flag, then config, then default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}
