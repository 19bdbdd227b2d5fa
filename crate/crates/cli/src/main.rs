//! `nicf`: expansions, bound certificates, decay and mixing experiments.
//!
//! Output is JSON by default and CSV with `--format csv`. Exit status is 0 on
//! success, 1 when a certified bound fails, 2 on invalid input.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ConfigFile;
use output::Format;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Library(nicf::NicfError),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Io(m) => f.write_str(m),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<nicf::NicfError> for CliError {
    fn from(e: nicf::NicfError) -> Self {
        CliError::Library(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nicf",
    version,
    about = "Nearest-integer continued fraction experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// `key=value` file with defaults for any flag; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format: json or csv.
    #[arg(long, global = true)]
    format: Option<Format>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Random seed (otherwise the config file, then NICF_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Digits of the expansion of x.
    Expand {
        /// folded, odd, even, conjugate or hurwitz.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        /// Number of digits.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Certified sup bounds on the derivative contraction of a transfer operator.
    Certify {
        /// folded or conjugate.
        #[arg(long)]
        family: Option<String>,
        /// Grid spacing of the certification.
        #[arg(long)]
        spacing: Option<f64>,
        /// Include every component bound and the comparison note.
        #[arg(long)]
        report_components: bool,
    },
    /// Distance of γ_n = UⁿH to its limit for n = 1, …, n-max.
    Decay {
        /// folded or conjugate.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Collocation degree.
        #[arg(long)]
        degree: Option<usize>,
        /// Number of branches summed before the tail.
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Correlations |μ(T⁻ⁿE ∩ F) − μ(E)μ(F)| for a cylinder F.
    Mixing {
        /// folded, odd or conjugate (E in [−1/2, 1/2], F a word of the conjugate map).
        #[arg(long)]
        kind: Option<String>,
        /// E as lo,hi or lo,hi;lo,hi.
        #[arg(long, allow_hyphen_values = true)]
        e: Option<String>,
        /// The word of F: a,e;a,e for pair digits, b;b for odd digits.
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        /// Comma-separated list of n.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        truncation: Option<usize>,
        /// Orbits sampled per n for a Monte Carlo cross-check (0 to skip).
        #[arg(long)]
        mc_samples: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let common = commands::Common {
        format: config::pick_or(cli.format, &file, "format", Format::Json)?,
        output: config::pick(cli.output, &file, "output")?,
        seed: config::seed(cli.seed, &file, nicf::montecarlo::DEFAULT_SEED)?,
    };
    match cli.command {
        Command::Expand { kind, x, n } => commands::expand(&common, &file, kind, x, n),
        Command::Certify {
            family,
            spacing,
            report_components,
        } => commands::certify(&common, &file, family, spacing, report_components),
        Command::Decay {
            kind,
            n_max,
            degree,
            truncation,
        } => commands::decay(&common, &file, kind, n_max, degree, truncation),
        Command::Mixing {
            kind,
            e,
            f,
            n,
            degree,
            truncation,
            mc_samples,
        } => commands::mixing(
            &common,
            &file,
            commands::MixingArgs {
                kind,
                e,
                f,
                n,
                degree,
                truncation,
                mc_samples,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
