use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "polyshape", version, about = "Shape-theoretic persistence of sampled compact metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and validate an adjusted ladder of approximations.
    Approximate(Common),
    /// Dump the complexes of one tower and its bonding maps.
    Build(Common),
    /// Homology groups of one tower with the induced bonding homomorphisms.
    Homology(Common),
    /// Persistent groups, error quotients and limit data of one tower.
    Persist(Common),
    /// Check the commuting diagrams of the towers; exits 1 on any failure.
    Verify(Common),
    /// Emit a built-in space and, optionally, its ladder.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorpusName {
    Hawaiian,
    Solenoid,
    Circle,
    Point,
    Discrete,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Point cloud, distance matrix or ladder JSON file.
    #[arg(long, conflicts_with = "corpus")]
    pub input: Option<PathBuf>,
    /// Built-in space.
    #[arg(long, value_enum)]
    pub corpus: Option<CorpusName>,
    /// Number of ladder levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// First epsilon: `p/q`, or `p/q*sqrt2` for a multiple of √2.
    #[arg(long)]
    pub eps1: Option<String>,
    /// Square count for the Hawaiian earring.
    #[arg(long)]
    pub squares: Option<usize>,
    /// Point count for the circle and discrete spaces.
    #[arg(long)]
    pub size: Option<usize>,
    /// Bonding multiplier for the solenoid.
    #[arg(long)]
    pub base: Option<i64>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Tower kind: rips, mccord, cech, witness, dowker-upper or dowker-lower.
    #[arg(long)]
    pub complex: Option<String>,
    /// Homology degree.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    /// Last level used by persistence.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Report only this level in `persist`.
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long, default_value_t = 20_000_000, value_parser = clap::value_parser!(usize))]
    pub max_simplices: usize,
    #[arg(long, default_value_t = 2_000_000, value_parser = clap::value_parser!(usize))]
    pub max_elements: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Output file for the space; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output file for the ladder.
    #[arg(long)]
    pub ladder_out: Option<PathBuf>,
}
