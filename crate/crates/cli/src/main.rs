use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::CliError;

/// Neighbor-joining with certificates: build trees, check the conditions
/// under which a tree is recovered, simulate, and export counterexamples.
#[derive(Debug, Parser)]
#[command(name = "njcert", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a tree from a PHYLIP distance matrix and write it as Newick.
    Build {
        /// PHYLIP distance matrix.
        dist: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Nj)]
        method: Method,
        #[arg(long, value_enum, default_value_t = ReductionArg::Average)]
        reduction: ReductionArg,
        /// Output Newick file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a distance matrix against a reference tree.
    Diagnose {
        /// PHYLIP distance matrix.
        dist: PathBuf,
        /// Newick reference tree on the same taxa.
        tree: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Check::Consistency, Check::Additivity, Check::Atteson])]
        checks: Vec<Check>,
        /// Taxa on one side of the edge used by the `ab` check, comma
        /// separated. Every internal edge is checked when omitted.
        #[arg(long, value_delimiter = ',')]
        split: Option<Vec<String>>,
        /// Taxon count above which additivity is sampled.
        #[arg(long, default_value_t = 25)]
        max_exact_taxa: usize,
        /// Tuples drawn when additivity is sampled.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Print reports as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Also write the reports as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the sequence-length sweep and write one CSV row per replicate.
    Simulate {
        #[arg(long, default_value_t = 20)]
        taxa: usize,
        #[arg(long, default_value_t = 35)]
        trees: usize,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        /// Sequence lengths, comma separated. Defaults to 28 log-spaced
        /// lengths from 100 to 10000.
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0.1)]
        edge_length: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Per-length summary CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long, default_value_t = 25)]
        max_exact_taxa: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Write a counterexample as PHYLIP matrices and a Newick tree.
    Counterexample {
        #[arg(value_enum)]
        which: Which,
        #[arg(long, default_value = ".")]
        outdir: PathBuf,
        /// Inner taxon count (thm34).
        #[arg(long, default_value_t = 40)]
        n: usize,
        /// Leaf edge length (thm34).
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Long edge length (thm34).
        #[arg(long, default_value_t = 4.2)]
        beta: f64,
        /// Total inner subtree length (thm34).
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Print the verification summary as JSON (thm34).
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Nj,
    Fnj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReductionArg {
    Average,
    Rooted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Consistency,
    Additivity,
    Atteson,
    Ab,
    Edges,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Five,
    Eight,
    Thm34,
}

/// Uses the given seed or draws one and reports it so the run can be replayed.
fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Build {
            dist,
            method,
            reduction,
            out,
        } => commands::build(&dist, method, reduction, out.as_deref()).map(|_| true),
        Command::Diagnose {
            dist,
            tree,
            checks,
            split,
            max_exact_taxa,
            samples,
            seed,
            json,
            csv,
        } => commands::diagnose(commands::DiagnoseArgs {
            dist: &dist,
            tree: &tree,
            checks: &checks,
            split: split.as_deref(),
            max_exact_taxa,
            samples,
            seed,
            json,
            csv: csv.as_deref(),
        }),
        Command::Simulate {
            taxa,
            trees,
            replicates,
            lengths,
            edge_length,
            seed,
            out,
            summary,
            max_exact_taxa,
            samples,
        } => {
            let seed = resolve_seed(seed);
            let cfg = njcert::simlab::SweepConfig {
                tree_count: trees,
                taxa_count: taxa,
                edge_length,
                replicates,
                lengths: lengths.unwrap_or_else(njcert::simlab::default_lengths),
                seed,
                additivity: njcert::diagnostics::AdditivityOptions {
                    max_exact_taxa,
                    samples,
                    seed,
                },
            };
            commands::simulate(&cfg, &out, summary.as_deref()).map(|_| true)
        }
        Command::Counterexample {
            which,
            outdir,
            n,
            alpha,
            beta,
            epsilon,
            seed,
            json,
        } => {
            let params = njcert::counterexamples::Thm34Params {
                n,
                alpha,
                beta,
                epsilon,
            };
            commands::counterexample(which, &outdir, params, seed, json).map(|_| true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
