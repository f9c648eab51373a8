//! `pmdsg`: run p-mean densest subgraph solvers on edge-list files, build
//! reduction gadgets and drive the benchmark grid.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pmdsg::bench::{Algorithm, DEFAULT_FW_ITERATIONS, DEFAULT_PEEL_ITERATIONS};
use pmdsg::constructions::Regime;
use pmdsg::oracle::DEFAULT_LIMIT;
use pmdsg::PExponent;

#[derive(Debug, Parser)]
#[command(name = "pmdsg", version, about = "Generalized p-mean densest subgraph toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One-pass peeling: greedy-p, lazy or simple.
    Peel(PeelArgs),
    /// Iterated peeling with loads: greedypp, lazypp or simplepp.
    Iterate(IterateArgs),
    /// Frank-Wolfe over the base polytope, rounded by suffix sweeps.
    Fw(FwArgs),
    /// Exact optimum by subset enumeration (small graphs only).
    Oracle(OracleArgs),
    /// Writes the exact-cover reduction graph for an instance file.
    Gadget(GadgetArgs),
    /// Tabulates the two gap functions over a regime's p interval.
    Scan(ScanArgs),
    /// Tabulates the gadget density as a function of the cover fraction.
    Curve(CurveArgs),
    /// Runs every (graph, algorithm, p) cell and writes one CSV row each.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct GraphInput {
    /// Edge-list file: `u v` or `u v w` per line, `#` comments.
    #[arg(long)]
    input: PathBuf,
    /// Read a third column as the edge weight.
    #[arg(long)]
    weighted: bool,
}

#[derive(Debug, Args)]
struct RecordOutput {
    /// JSON destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Include the labels of the returned vertices.
    #[arg(long)]
    emit_set: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PeelAlgo {
    #[value(name = "greedy-p")]
    GreedyP,
    Lazy,
    Simple,
}

impl From<PeelAlgo> for Algorithm {
    fn from(a: PeelAlgo) -> Algorithm {
        match a {
            PeelAlgo::GreedyP => Algorithm::GreedyP,
            PeelAlgo::Lazy => Algorithm::Lazy,
            PeelAlgo::Simple => Algorithm::Simple,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IterAlgo {
    Greedypp,
    Lazypp,
    Simplepp,
}

impl From<IterAlgo> for Algorithm {
    fn from(a: IterAlgo) -> Algorithm {
        match a {
            IterAlgo::Greedypp => Algorithm::GreedyPP,
            IterAlgo::Lazypp => Algorithm::LazyPP,
            IterAlgo::Simplepp => Algorithm::SimplePP,
        }
    }
}

fn parse_exponent(s: &str) -> Result<PExponent, String> {
    s.parse::<PExponent>().map_err(|e| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse::<Algorithm>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct PeelArgs {
    #[arg(long, value_enum)]
    algo: PeelAlgo,
    /// Exponent; accepts `inf` and `-inf`.
    #[arg(long, value_parser = parse_exponent, allow_hyphen_values = true)]
    p: PExponent,
    /// Degree staleness tolerance for `lazy`.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[command(flatten)]
    graph: GraphInput,
    #[command(flatten)]
    out: RecordOutput,
}

#[derive(Debug, Args)]
struct IterateArgs {
    #[arg(long, value_enum)]
    algo: IterAlgo,
    /// Single exponent.
    #[arg(long, value_parser = parse_exponent, allow_hyphen_values = true, conflicts_with = "ps", required_unless_present = "ps")]
    p: Option<PExponent>,
    /// Comma-separated exponents; `simplepp` shares its orders across them.
    #[arg(long, value_parser = parse_exponent, value_delimiter = ',', allow_hyphen_values = true)]
    ps: Vec<PExponent>,
    #[arg(long, default_value_t = DEFAULT_PEEL_ITERATIONS)]
    iters: usize,
    /// Degree staleness tolerance for `lazypp`.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Run the per-exponent evaluation on one thread.
    #[arg(long)]
    sequential: bool,
    /// Per-iteration best density as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphInput,
    #[command(flatten)]
    out: RecordOutput,
}

#[derive(Debug, Args)]
struct FwArgs {
    /// Exponent, at least 1.
    #[arg(long, value_parser = parse_exponent, allow_hyphen_values = true)]
    p: PExponent,
    #[arg(long, default_value_t = DEFAULT_FW_ITERATIONS)]
    iters: usize,
    /// Per-iteration best rounded density as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphInput,
    #[command(flatten)]
    out: RecordOutput,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, value_parser = parse_exponent, allow_hyphen_values = true)]
    p: PExponent,
    /// Largest vertex count to enumerate.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    graph: GraphInput,
    #[command(flatten)]
    out: RecordOutput,
}

#[derive(Debug, Args)]
struct GadgetArgs {
    /// Instance file: `n m` header, then `m` lines of three elements in `0..3n`.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    p: f64,
    /// Weighted reduction; the unweighted one needs an even `n`.
    #[arg(long)]
    weighted: bool,
    /// Edge-list destination.
    #[arg(long)]
    edges: PathBuf,
    /// JSON destination for the threshold, regime and vertex ranges.
    #[arg(long)]
    spec: PathBuf,
    /// Also solve the gadget exactly and record the decision.
    #[arg(long)]
    decide: bool,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse()
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Regime name; all four when omitted.
    #[arg(long, value_parser = parse_regime)]
    regime: Option<Regime>,
    /// Evenly spaced interior points per regime.
    #[arg(long, default_value_t = 50, conflicts_with = "grid")]
    points: usize,
    /// Explicit comma-separated p values (requires --regime).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "regime")]
    grid: Vec<f64>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long, allow_hyphen_values = true)]
    p: f64,
    /// Internal element degree; defaults to the weighted regime's choice.
    #[arg(long)]
    d: Option<f64>,
    /// Explicit comma-separated cover fractions in [0, 10].
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
    /// Evenly spaced fractions from 0 to --max, used without --grid.
    #[arg(long, default_value_t = 301, conflicts_with = "grid")]
    points: usize,
    #[arg(long, default_value_t = 3.0, conflicts_with = "grid")]
    max: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated algorithm names; `oracle` adds the exact column.
    #[arg(long, value_parser = parse_algorithm, value_delimiter = ',', default_value = "greedy-p,lazy,simple,greedypp,simplepp,fw,oracle")]
    algos: Vec<Algorithm>,
    #[arg(long, value_parser = parse_exponent, value_delimiter = ',', allow_hyphen_values = true, default_value = "1.5")]
    ps: Vec<PExponent>,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Overrides each iterative algorithm's default pass count.
    #[arg(long)]
    iters: Option<usize>,
    /// Edge-list files; the seeded random suite is used when none is given.
    #[arg(long, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    weighted: bool,
    /// Seed of the random suite.
    #[arg(long, default_value_t = 2023)]
    seed: u64,
    /// Number of suite graphs.
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 4)]
    min_n: usize,
    #[arg(long, default_value_t = 10)]
    max_n: usize,
    /// Run cells one at a time instead of on the worker pool.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Peel(a) => commands::peel(a),
        Command::Iterate(a) => commands::iterate(a),
        Command::Fw(a) => commands::fw(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Gadget(a) => commands::gadget(a),
        Command::Scan(a) => commands::scan(a),
        Command::Curve(a) => commands::curve(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pmdsg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
