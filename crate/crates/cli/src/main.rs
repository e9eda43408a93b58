mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Figure, Mode, Reliability};
use report::RunReport;

#[derive(Debug, Parser)]
#[command(
    name = "coherence",
    version,
    about = "Coherence measures, belief expansion and Bayesian-network read-offs"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
struct ReliabilityArgs {
    /// Likelihood ratio q/p in (0, 1].
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["p", "q"])]
    x: Option<f64>,
    /// True-positive rate of every source.
    #[arg(long, allow_negative_numbers = true, requires = "q")]
    p: Option<f64>,
    /// False-positive rate of every source.
    #[arg(long, allow_negative_numbers = true, requires = "p")]
    q: Option<f64>,
}

impl From<ReliabilityArgs> for Reliability {
    fn from(a: ReliabilityArgs) -> Self {
        Self {
            x: a.x,
            p: a.p,
            q: a.q,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Fixed,
    Averaged,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureArg {
    One,
    Two,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Posterior, maximal-coherence posterior and coherence of an information set.
    Coherence {
        /// Distribution document.
        file: PathBuf,
        #[command(flatten)]
        reliability: ReliabilityArgs,
    },
    /// Coherence ordering of two information sets of the same size.
    Order {
        first: PathBuf,
        second: PathBuf,
        /// Grid points used when no exact criterion applies.
        #[arg(long)]
        probe_resolution: Option<usize>,
    },
    /// Whether to expand the first n variables of a joint with the last one.
    Expand {
        /// Distribution document over n + 1 variables.
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[command(flatten)]
        reliability: ReliabilityArgs,
        /// Belief threshold reported alongside the verdict.
        #[arg(long, default_value_t = coherence_core::expansion::DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Exact posterior and d-separation queries on a network document.
    Bn {
        network: PathBuf,
        /// Evidence document, {name: bool}.
        #[arg(long)]
        evidence: Option<PathBuf>,
        /// Node whose posterior P(node = true | evidence) is reported.
        #[arg(long)]
        query: Option<String>,
        /// `X|Y|Z` with comma-separated node lists; repeatable.
        #[arg(long = "d-sep", value_name = "X|Y|Z")]
        d_sep: Vec<String>,
    },
    /// Build the coherence (one) or expansion (two) network from a spec and read it off.
    Figure {
        #[arg(value_enum)]
        which: FigureArg,
        spec: PathBuf,
        /// Threshold for the expansion network.
        #[arg(long, default_value_t = coherence_core::expansion::DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Also write the constructed network document to this path.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

fn echo() -> String {
    let quoted: Vec<String> = std::env::args()
        .skip(1)
        .map(|a| {
            if a.is_empty() || a.chars().any(|c| c.is_whitespace() || c == '|') {
                format!("'{a}'")
            } else {
                a
            }
        })
        .collect();
    std::iter::once("coherence".to_string())
        .chain(quoted)
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(command: Command) -> anyhow::Result<RunReport> {
    let report = RunReport::new(echo());
    match command {
        Command::Coherence { file, reliability } => {
            commands::coherence(report, &file, reliability.into())
        }
        Command::Order {
            first,
            second,
            probe_resolution,
        } => commands::order(report, &first, &second, probe_resolution),
        Command::Expand {
            file,
            mode,
            reliability,
            threshold,
        } => {
            let mode = match mode {
                ModeArg::Fixed => Mode::Fixed,
                ModeArg::Averaged => Mode::Averaged,
            };
            commands::expand(report, &file, mode, reliability.into(), threshold)
        }
        Command::Bn {
            network,
            evidence,
            query,
            d_sep,
        } => commands::bn(
            report,
            &network,
            evidence.as_deref(),
            query.as_deref(),
            &d_sep,
        ),
        Command::Figure {
            which,
            spec,
            threshold,
            emit,
        } => {
            let which = match which {
                FigureArg::One => Figure::One,
                FigureArg::Two => Figure::Two,
            };
            commands::figure(report, which, &spec, threshold, emit.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            match cli.format {
                Format::Table => print!("{}", report.to_table()),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_json()).expect("report serializes")
                ),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
