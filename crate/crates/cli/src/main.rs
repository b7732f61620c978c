//! `dforest`: build, query, verify, benchmark and maintain D-Forest indexes.
//!
//! Exit codes: 0 success, 2 I/O, parse or index-format error, 3 unknown
//! vertex, 4 verification failure.

mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dforest", version, about = "Community search on directed graphs with a D-Forest index")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from an edge list and write it to disk.
    Build(BuildArgs),
    /// Answer one community query from a stored index.
    Query(QueryArgs),
    /// Cross-check both builders, the index invariants and every query against the oracles.
    Verify(VerifyArgs),
    /// Time index queries against index-free peeling on seeded query vertices.
    Bench(BenchArgs),
    /// Apply an update stream to a stored index.
    Maintain(MaintainArgs),
    /// Print a stored index as text, one node per line.
    Dump(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Topdown,
    Bottomup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Edge list, one `u v` pair per line; `.gz` files are decompressed.
    #[arg(long)]
    pub graph: PathBuf,
    /// Where to write the index.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Bottomup)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Query vertex label.
    #[arg(long)]
    pub q: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub l: usize,
    /// Require the community to be strongly connected (needs --graph).
    #[arg(long, requires = "graph")]
    pub scsd: bool,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Also check that this stored index equals a fresh build.
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Maximum number of (q, k, l) queries checked against peeling.
    #[arg(long, default_value_t = 200_000)]
    pub budget: usize,
    /// Maximum number of strongly connected queries checked against the fixpoint oracle.
    #[arg(long, default_value_t = 20_000)]
    pub scsd_budget: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Number of query vertices.
    #[arg(long, default_value_t = 200)]
    pub queries: usize,
    /// Degree threshold used for both k and l.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write rows here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MaintainArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// The graph the index was built from.
    #[arg(long)]
    pub graph: PathBuf,
    /// Update stream: `+ u v`, `- u v`, `+v label`, `-v label`.
    #[arg(long)]
    pub ops: PathBuf,
    /// Compare against a full rebuild after every operation.
    #[arg(long)]
    pub check_rebuild: bool,
    /// Where to write the updated index (default: overwrite --index).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the updated graph as an edge list (isolated vertices are not representable).
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long)]
    pub index: PathBuf,
}

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let mut out = std::io::stdout().lock();
    let result = match cfg.command {
        Command::Build(a) => commands::run_build(&a, &mut out),
        Command::Query(a) => commands::run_query(&a, &mut out),
        Command::Verify(a) => commands::run_verify(&a, &mut out),
        Command::Bench(a) => commands::run_bench(&a, &mut out),
        Command::Maintain(a) => commands::run_maintain(&a, &mut out),
        Command::Dump(a) => commands::run_dump(&a, &mut out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
