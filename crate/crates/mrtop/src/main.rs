use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mrtop::cli::{
    self, BatchConfig, BatchMode, CliError, DEFAULT_TAU,
};
use mrtop::ingest::Distribution;

#[derive(Parser)]
#[command(
    name = "mrtop",
    about = "Maximal reverse top-k queries over 2-D data via a k-polygon index",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a k-polygon index from a dataset CSV
    Build(BuildArgs),
    /// Answer a batch of queries from a CSV file
    Batch(BatchArgs),
    /// Emit per-k structure sizes as CSV
    Stats(StatsArgs),
    /// Render contours for a range of k into an SVG
    Contours(ContoursArgs),
    /// Generate a synthetic dataset CSV
    Gen(GenArgs),
    /// Scale a raw dataset into (0,1] and remove duplicate values
    Prep(PrepArgs),
    /// Print a human-readable dump of an index file
    Dump(DumpArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Dataset CSV (rows of id,a1,a2)
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[arg(long, default_value_t = DEFAULT_TAU, value_parser = parse_tau)]
    tau: f64,
    /// Output index file
    #[arg(long)]
    out: PathBuf,
    /// Sweep every line instead of pruning to the skyband approximation
    #[arg(long)]
    no_prune: bool,
}

#[derive(Args)]
struct BatchArgs {
    /// Query CSV (rows of id,a1,a2)
    #[arg(long)]
    queries: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Index)]
    mode: ModeArg,
    /// Index file (mode=index)
    #[arg(long)]
    index: Option<PathBuf>,
    /// Dataset CSV (mode=wang|oracle)
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[arg(long, value_parser = parse_tau)]
    tau: Option<f64>,
    /// Scan every pocket in the inside span instead of only crossed hull
    /// edges (index mode)
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    strict: bool,
    /// Shuffle the dataset rows with this seed before querying
    #[arg(long)]
    shuffle: Option<u64>,
    /// Result stream destination; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the query phase; defaults to the hardware count
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Index,
    Wang,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Correlated,
    Anticorrelated,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Inclusive range, e.g. 1..10, or a single k
    #[arg(long, value_parser = parse_k_range)]
    k_range: (usize, usize),
    #[arg(long, default_value_t = DEFAULT_TAU, value_parser = parse_tau)]
    tau: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ContoursArgs {
    #[arg(long)]
    input: PathBuf,
    /// Inclusive range, e.g. 1..4, or a single k
    #[arg(long, value_parser = parse_k_range)]
    k_range: (usize, usize),
    #[arg(long, default_value_t = DEFAULT_TAU, value_parser = parse_tau)]
    tau: f64,
    #[arg(long)]
    out: PathBuf,
    /// Overlay each contour's convex hull dashed
    #[arg(long)]
    hulls: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, value_enum)]
    dist: DistArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PrepArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    index: PathBuf,
}

fn parse_tau(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("bad tau {s:?}: {e}"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("tau must be positive and finite, got {v}"));
    }
    Ok(v)
}

fn parse_k_range(s: &str) -> Result<(usize, usize), String> {
    let parse_one = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad k value {t:?}: {e}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse_one(lo)?, parse_one(hi.trim_start_matches('='))?),
        None => {
            let k = parse_one(s)?;
            (k, k)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("empty k range {s:?}"));
    }
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build(a) => {
            let report = cli::cmd_build(&a.input, a.k as usize, a.tau, &a.out, !a.no_prune)?;
            eprintln!("input tuples:          {}", report.n);
            eprintln!("lines swept:           {}", report.pruned);
            eprintln!("hull vertices:         {}", report.hull);
            eprintln!("polygon vertices:      {}", report.vertices);
            eprintln!("build time:            {:?}", report.wall);
            Ok(())
        }
        Command::Batch(a) => {
            let cfg = BatchConfig {
                mode: match a.mode {
                    ModeArg::Index => BatchMode::Index,
                    ModeArg::Wang => BatchMode::Wang,
                    ModeArg::Oracle => BatchMode::Oracle,
                },
                queries: a.queries,
                index: a.index,
                input: a.input,
                k: a.k as usize,
                tau: a.tau,
                strict: a.strict,
                shuffle: a.shuffle,
                workers: a.workers.unwrap_or_else(|| {
                    std::thread::available_parallelism().map_or(1, |n| n.get())
                }),
            };
            let (results, timing) = cli::cmd_batch(&cfg)?;
            match &a.out {
                Some(path) => {
                    let f = std::fs::File::create(path)?;
                    cli::write_result_stream(&results, std::io::BufWriter::new(f))?;
                }
                None => {
                    let stdout = std::io::stdout();
                    cli::write_result_stream(&results, stdout.lock())?;
                }
            }
            eprintln!("load:        {:?}", timing.load);
            eprintln!("build:       {:?}", timing.build);
            eprintln!(
                "queries:     {} in {:?} wall, {:?} aggregate cpu",
                timing.queries, timing.query_wall, timing.query_cpu
            );
            if timing.queries > 0 {
                eprintln!(
                    "per query:   {:?}",
                    timing.query_wall / timing.queries as u32
                );
            }
            Ok(())
        }
        Command::Stats(a) => {
            cli::cmd_stats(&a.input, a.k_range, a.tau, &a.out)?;
            Ok(())
        }
        Command::Contours(a) => {
            cli::cmd_contours(&a.input, a.k_range, a.tau, &a.out, a.hulls)?;
            Ok(())
        }
        Command::Gen(a) => {
            let dist = match a.dist {
                DistArg::Uniform => Distribution::Uniform,
                DistArg::Correlated => Distribution::Correlated,
                DistArg::Anticorrelated => Distribution::Anticorrelated,
            };
            cli::cmd_gen(a.n as usize, dist, a.seed, &a.out)
        }
        Command::Prep(a) => cli::cmd_prep(&a.input, &a.out),
        Command::Dump(a) => {
            print!("{}", cli::cmd_dump(&a.index)?);
            Ok(())
        }
    }
}
