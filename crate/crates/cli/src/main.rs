//! `phylodist`: cophenetic vectors, distances and interleaving certificates
//! for phylogenetic trees in Newick files.
//!
//! Exit codes: 0 ok, 1 syntax error, 2 structural or label error, 3 oracle
//! disagreement, 4 usage or I/O error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phylo_core::{HeightConvention, Norm};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "phylodist", version, about = "Cophenetic and interleaving distances between phylogenetic trees")]
struct Cli {
    /// How node heights are derived from Newick input.
    #[arg(long, value_enum, default_value_t = Convention::Auto, global = true)]
    convention: Convention,

    /// Significant digits for printed numbers.
    #[arg(long, default_value_t = 12, global = true, value_parser = clap::value_parser!(u32).range(1..=17))]
    digits: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    /// Explicit `[&height=x]` annotations if every node has one, otherwise
    /// depth-negative.
    Auto,
    /// Height is minus the distance from the root.
    DepthNegative,
    /// Ultrametric trees with leaves at height 0.
    LeafZero,
    /// `[&height=x]` annotations on every node.
    Explicit,
}

impl Convention {
    pub fn fixed(self) -> Option<HeightConvention> {
        match self {
            Convention::Auto => None,
            Convention::DepthNegative => Some(HeightConvention::DepthNegative),
            Convention::LeafZero => Some(HeightConvention::LeafZeroUltrametric),
            Convention::Explicit => Some(HeightConvention::ExplicitHeights),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Pair {
    /// First tree file.
    pub a: PathBuf,
    /// Second tree file.
    pub b: PathBuf,
    /// 0-based tree index within the first file.
    #[arg(long, default_value_t = 0)]
    pub index_a: usize,
    /// 0-based tree index within the second file.
    #[arg(long, default_value_t = 0)]
    pub index_b: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that every tree in a file parses and is a valid labeled tree.
    Validate { path: PathBuf },
    /// Distance between two trees.
    Dist {
        #[command(flatten)]
        pair: Pair,
        /// Norm applied to the cophenetic difference: 1, 2 or inf.
        #[arg(long = "p", default_value = "inf")]
        p: Norm,
        /// Also compute the interleaving distance by bisection and compare.
        #[arg(long)]
        oracle: bool,
        /// Bisection tolerance and allowed disagreement for --oracle.
        #[arg(long, default_value_t = phylo_core::DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// All-pairs distance matrix for the trees in one file.
    Matrix {
        path: PathBuf,
        #[arg(long = "p", default_value = "inf")]
        p: Norm,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Csv)]
        format: MatrixFormat,
    },
    /// Lower every height by epsilon and write the trees back out.
    Smooth {
        path: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a tree's cophenetic vector.
    Vector {
        path: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Json)]
        format: MatrixFormat,
    },
    /// Report which label- and height-preserving maps exist between two trees.
    Hom {
        #[command(flatten)]
        pair: Pair,
    },
    /// Emit an interleaving certificate at the smallest epsilon found.
    Interleave {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = phylo_core::DEFAULT_TOLERANCE)]
        tol: f64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Syntax(String),
    #[error("{0}")]
    Structure(String),
    /// The report is still printed on standard output.
    #[error("{message}")]
    Disagreement { report: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Syntax(_) => 1,
            CliError::Structure(_) => 2,
            CliError::Disagreement { .. } => 3,
            CliError::Usage(_) => 4,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    let ctx = commands::Context {
        convention: cli.convention,
        digits: cli.digits,
    };
    let result = match cli.command {
        Command::Validate { path } => commands::validate(&ctx, &path),
        Command::Dist { pair, p, oracle, tol } => commands::dist(&ctx, &pair, p, oracle, tol),
        Command::Matrix { path, p, out, format } => {
            commands::matrix(&ctx, &path, p, out.as_deref(), format)
        }
        Command::Smooth { path, epsilon, out } => commands::smooth(&ctx, &path, epsilon, out.as_deref()),
        Command::Vector { path, index, format } => commands::vector(&ctx, &path, index, format),
        Command::Hom { pair } => commands::hom(&ctx, &pair),
        Command::Interleave { pair, tol } => commands::interleave(&ctx, &pair, tol),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::Disagreement { report, .. } = &e {
                print!("{report}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
