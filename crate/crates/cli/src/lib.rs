//! Command-line front end for `projcone`.
//!
//! Every subcommand prints one JSON report on stdout and exits 0, or prints
//! `{"error": {code, message, location}}` on stderr and exits nonzero.

pub mod commands;
pub mod io;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{CliError, Report};

#[derive(Debug, Parser)]
#[command(name = "projcone", version, about = "Projective cone geometry: Hilbert metrics, contraction coefficients, Perron vectors")]
pub struct Cli {
    /// Entries at or below this value count as zero.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub zero_tol: f64,

    /// Spaces per indent level in the report; 0 prints a single line.
    #[arg(long, global = true, default_value_t = 2)]
    pub json_indent: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pseudo-Hilbert and Hilbert distance between two vectors.
    Dist(DistArgs),
    /// Contraction coefficient c(M).
    Coeff(CoeffArgs),
    /// Cone preservation, uniform positivity and strict contraction tests.
    Check(MatrixArg),
    /// Projective power iteration for the Perron eigenvector.
    Perron(PerronArgs),
    /// Discretized kernel operator: grid coefficient and factorization certificate.
    Kernel(KernelArgs),
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Two comma-separated vectors, e.g. `1,2 2,1`.
    #[arg(num_args = 2, value_names = ["F", "G"], conflicts_with = "file", required_unless_present = "file")]
    pub vectors: Vec<String>,

    /// CSV or JSON file with exactly two rows.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatrixArg {
    /// Matrix file (`.csv` or `.json`).
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    pub file: PathBuf,

    /// Use the O(d^4) closed form; needs a strictly positive matrix.
    #[arg(long)]
    pub formula: bool,

    /// Scan column pairs on one thread.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Args)]
pub struct PerronArgs {
    pub file: PathBuf,

    #[arg(long, default_value_t = projcone::perron::DEFAULT_TOL)]
    pub tol: f64,

    #[arg(long, default_value_t = projcone::perron::DEFAULT_MAX_ITER)]
    pub max_iter: usize,

    /// Starting vector, comma-separated; defaults to all ones.
    #[arg(long)]
    pub start: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinName {
    Constant,
    Separable,
    Poly1xy,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Midpoint,
    Trapezoid,
}

impl From<Rule> for projcone::QuadratureRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Midpoint => projcone::QuadratureRule::Midpoint,
            Rule::Trapezoid => projcone::QuadratureRule::Trapezoid,
        }
    }
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Kernel grid JSON `{nodes, weights, values}`.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    pub file: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub builtin: Option<BuiltinName>,

    /// Grid size for builtin kernels.
    #[arg(long, default_value_t = 16)]
    pub n: usize,

    #[arg(long, value_enum, default_value_t = Rule::Trapezoid)]
    pub rule: Rule,

    /// Builtin parameters as `key=value`, comma-separated or repeated
    /// (separable: a, b; gaussian: sigma).
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<String>,
}

/// Runs a parsed command and returns the report text.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let report = commands::dispatch(cli)?;
    Ok(report::to_json_string(&report, cli.json_indent))
}
