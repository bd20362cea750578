use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "icard", version, about = "Ordinals, GL, bouquets and d-maps")]
pub struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Tableau step budget.
    #[arg(long, global = true, default_value_t = icard::gl::DEFAULT_BUDGET)]
    pub budget: usize,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ordinal calculator.
    #[command(subcommand)]
    Ord(Ord),
    /// GL prover and tree models.
    #[command(subcommand)]
    Gl(Gl),
    /// Bouquet tools.
    #[command(subcommand)]
    Bouquet(BouquetCmd),
    /// d-map evaluation, witnesses and certificates.
    #[command(subcommand)]
    Dmap(Dmap),
    /// Find an ordinal witness point for a consistent set or stream.
    Satisfy(SatisfyArgs),
}

#[derive(Debug, Subcommand)]
pub enum Ord {
    /// Normal form of an expression.
    Eval { expr: String },
    /// Prints <, = or >.
    Cmp { a: String, b: String },
    Add { a: String, b: String },
    /// Hyperlogarithm `ℓ^level`.
    Log {
        x: String,
        #[arg(long, default_value = "1")]
        level: String,
    },
    /// Hyperexponential `e^level`.
    Exp {
        x: String,
        #[arg(long, default_value = "1")]
        level: String,
    },
    /// The first terms of the canonical fundamental sequence.
    Fundseq {
        x: String,
        #[arg(long, default_value_t = 5)]
        count: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum Gl {
    /// Theorem or countermodel.
    Prove { formula: String },
    /// A finite tree satisfying every formula at its root.
    Model { formulas: Vec<String> },
    /// Truth of a formula at a node of a tree model file.
    Check {
        formula: String,
        #[arg(long)]
        model: String,
        /// Node id; defaults to the root.
        #[arg(long)]
        node: Option<usize>,
    },
    Consistent {
        formulas: Vec<String>,
        /// Also bound the characteristic up to this value.
        #[arg(long)]
        char_cap: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct BouquetFile {
    /// Bouquet JSON file.
    #[arg(long)]
    pub bouquet: String,
}

#[derive(Debug, Args)]
pub struct NodePath {
    /// Comma-separated node ids from the root's daughters downward.
    #[arg(long, default_value = "")]
    pub path: String,
    /// Read `--path` as daughter positions instead of node ids.
    #[arg(long)]
    pub positions: bool,
}

#[derive(Debug, Subcommand)]
pub enum BouquetCmd {
    Rank {
        #[command(flatten)]
        file: BouquetFile,
    },
    /// Model check a formula at a node.
    Mc {
        formula: String,
        #[command(flatten)]
        file: BouquetFile,
        #[command(flatten)]
        node: NodePath,
        #[arg(long, default_value_t = 5)]
        prefix: usize,
    },
    /// Expand generated families up to a prefix.
    Materialize {
        #[command(flatten)]
        file: BouquetFile,
        #[arg(long, default_value_t = 5)]
        prefix: usize,
    },
}

#[derive(Debug, Args)]
pub struct DmapTarget {
    #[arg(long, default_value = "1")]
    pub lambda: String,
    #[command(flatten)]
    pub file: BouquetFile,
}

#[derive(Debug, Subcommand)]
pub enum Dmap {
    /// Image of a point.
    Eval {
        #[command(flatten)]
        target: DmapTarget,
        #[arg(long)]
        xi: String,
        /// Print the recursion steps.
        #[arg(long)]
        trace: bool,
    },
    /// A verified preimage point of a node.
    Witness {
        #[command(flatten)]
        target: DmapTarget,
        #[command(flatten)]
        node: NodePath,
    },
    /// Certificate report over sampled points and witness round-trips.
    Selftest {
        #[command(flatten)]
        target: DmapTarget,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        prefix: usize,
    },
}

#[derive(Debug, Args)]
pub struct SatisfyArgs {
    /// A finite formula set.
    pub formulas: Vec<String>,
    #[arg(long, default_value = "1")]
    pub lambda: String,
    /// A built-in stream: diamond-chain or top.
    #[arg(long, conflicts_with_all = ["formulas", "psi"])]
    pub stream: Option<String>,
    /// Stream templates with `{i}` and `{i+k}` placeholders.
    #[arg(long, requires = "phi", conflicts_with = "formulas")]
    pub psi: Option<String>,
    #[arg(long, requires = "psi")]
    pub phi: Option<String>,
    /// Root variables of a stream bouquet, comma separated.
    #[arg(long, default_value = "")]
    pub root: String,
    /// Stream prefix and model-checking prefix budget.
    #[arg(long, default_value_t = 5)]
    pub prefix: usize,
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Compare `e^λ ω` with this ambient ordinal.
    #[arg(long)]
    pub ambient: Option<String>,
}
