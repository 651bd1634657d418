use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "phoeg", version, about = "Extremal graph theory workbench")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Output does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
    /// Write data here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    All,
    Connected,
}

impl From<ClassArg> for phoeg_core::GraphClass {
    fn from(c: ClassArg) -> phoeg_core::GraphClass {
        match c {
            ClassArg::All => phoeg_core::GraphClass::All,
            ClassArg::Connected => phoeg_core::GraphClass::Connected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirArg {
    #[value(alias = "increase")]
    Max,
    #[value(alias = "decrease")]
    Min,
}

impl From<DirArg> for phoeg_core::store::Direction {
    fn from(d: DirArg) -> phoeg_core::store::Direction {
        match d {
            DirArg::Max => phoeg_core::store::Direction::Max,
            DirArg::Min => phoeg_core::store::Direction::Min,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
    G6,
    Dot,
    Tikz,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every graph of one order up to isomorphism, as canonical graph6.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
        n: u8,
        #[arg(long, value_enum, default_value = "all")]
        class: ClassArg,
        /// g6 or json
        #[arg(long, value_enum, default_value = "g6")]
        format: Format,
    },
    /// Evaluate an invariant on graph6 input, one graph per line.
    Invariant(InvariantArgs),
    /// Build invariant columns.
    #[command(subcommand)]
    Store(StoreCommand),
    /// Queries over stored invariant columns.
    #[command(subcommand)]
    Query(QueryCommand),
    /// Convex hull and facet inequalities of an invariant point cloud.
    Hull(HullArgs),
    /// Minimal obstructions of a graph class.
    Obstruct(ObstructArgs),
    /// Transformation metagraphs.
    #[command(subcommand)]
    Meta(MetaCommand),
    /// Apply or list transformations on a single graph.
    #[command(subcommand)]
    Transform(TransformCommand),
}

#[derive(Debug, Args)]
pub struct InvariantArgs {
    /// Invariant name; see --list.
    #[arg(required_unless_present = "list")]
    pub name: Option<String>,
    /// File of graph6 lines, or - for standard input.
    #[arg(long, required_unless_present = "list")]
    pub g6: Option<String>,
    /// List the available invariants.
    #[arg(long)]
    pub list: bool,
    /// text (one value per line), csv or json
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct StoreArg {
    /// Store directory.
    #[arg(long, default_value = "phoeg-store")]
    pub store: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum StoreCommand {
    /// Compute invariant columns for all orders 1..=n.
    Build {
        #[arg(long, visible_alias = "max-n", value_parser = clap::value_parser!(u8).range(1..=10))]
        n: u8,
        #[arg(long, value_enum, default_value = "connected")]
        class: ClassArg,
        /// Comma-separated invariant names, or all.
        #[arg(long, default_value = "all")]
        invariants: String,
        #[command(flatten)]
        store: StoreArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum QueryCommand {
    /// Optimum and witnesses of an invariant per (n, m) cell.
    Extremal {
        #[arg(long)]
        invariant: String,
        #[arg(long, value_enum, default_value = "max")]
        dir: DirArg,
        /// Largest order included.
        #[arg(long, visible_alias = "max-n", value_parser = clap::value_parser!(u8).range(1..=10))]
        n: u8,
        #[arg(long, value_enum, default_value = "connected")]
        class: ClassArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        store: StoreArg,
    },
    /// Distinct (x, y) coordinates at one order with multiplicities.
    Points {
        #[command(flatten)]
        plane: PlaneArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Points annotated with an aggregate of a third invariant.
    Annotate {
        #[command(flatten)]
        plane: PlaneArgs,
        #[arg(long)]
        annotation: String,
        #[arg(long, value_enum, default_value = "max")]
        agg: DirArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct PlaneArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
    pub n: u8,
    #[arg(long, value_enum, default_value = "connected")]
    pub class: ClassArg,
    /// Sample signatures kept per point.
    #[arg(long, default_value_t = phoeg_core::store::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[command(flatten)]
    pub store: StoreArg,
}

#[derive(Debug, Args)]
pub struct HullArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long, value_enum, default_value = "connected")]
    pub class: ClassArg,
    /// Order, or first order of the range with --n-max.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
    pub n: u8,
    /// Last order of the range (report formats only).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
    pub n_max: Option<u8>,
    /// Sample signatures kept per tight point.
    #[arg(long, default_value_t = phoeg_core::store::DEFAULT_SAMPLES)]
    pub samples: usize,
    /// csv, json, tikz or text
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub store: StoreArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Subgraph,
    #[value(alias = "induced-subgraph")]
    Induced,
}

#[derive(Debug, Args)]
pub struct ObstructArgs {
    /// Class name; see --list.
    #[arg(long, required_unless_present = "list")]
    pub class: Option<String>,
    #[arg(long, value_enum, default_value = "induced")]
    pub relation: RelationArg,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10), default_value_t = 6)]
    pub max_n: u8,
    /// List the built-in classes.
    #[arg(long)]
    pub list: bool,
    /// g6, csv or json
    #[arg(long, value_enum, default_value = "g6")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MetaDirArg {
    /// Metagraph directory.
    #[arg(long, default_value = "phoeg-meta")]
    pub meta: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountMode {
    Raw,
    PerTriple,
    PerPair,
    Ordered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArcDirection {
    Out,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ValueSource {
    Computed,
    Store,
}

#[derive(Debug, Subcommand)]
pub enum MetaCommand {
    /// Build and save the metagraph of one order.
    Build {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
        n: u8,
        #[arg(long, value_enum, default_value = "all")]
        class: ClassArg,
        /// Comma-separated transformation names, or all.
        #[arg(long, default_value = "all")]
        transformations: String,
        #[arg(long, default_value = "phoeg-meta")]
        out: PathBuf,
        /// Refuse builds whose arc file would exceed this many bytes.
        #[arg(long, default_value_t = phoeg_core::transproof::DEFAULT_MAX_BYTES)]
        max_bytes: u64,
    },
    /// Arc count under one counting convention.
    Count {
        #[command(flatten)]
        meta: MetaDirArg,
        #[arg(long, value_enum, default_value = "raw")]
        mode: CountMode,
        /// Leave out arcs whose target is isomorphic to their source.
        #[arg(long)]
        no_self: bool,
    },
    /// Arc counts under every convention for a range of orders, built in memory.
    Calibrate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9), default_value_t = 2)]
        n_min: u8,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9), default_value_t = 6)]
        n_max: u8,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Arcs leaving or entering one graph.
    Neighbors {
        #[command(flatten)]
        meta: MetaDirArg,
        #[arg(long)]
        g6: String,
        #[arg(long, value_enum, default_value = "out")]
        direction: ArcDirection,
        #[arg(long)]
        transformation: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Whole arc list as csv, or a Graphviz digraph.
    Export {
        #[command(flatten)]
        meta: MetaDirArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Proof-by-transformation report for one invariant.
    Proof {
        #[command(flatten)]
        meta: MetaDirArg,
        #[arg(long)]
        invariant: String,
        #[arg(long, value_enum, default_value = "max")]
        dir: DirArg,
        /// Comma-separated invariants kept fixed along arcs.
        #[arg(long, default_value = "")]
        preserve: String,
        /// Extremal graphs from the store's per-(n, m) query, or computed
        /// per class of preserved values.
        #[arg(long, value_enum, default_value = "computed")]
        extremal_from: ValueSource,
        /// Invariant values from the store or computed from the graphs.
        #[arg(long, value_enum, default_value = "computed")]
        values_from: ValueSource,
        #[arg(long, default_value = "phoeg-store")]
        store: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Debug, Subcommand)]
pub enum TransformCommand {
    /// Apply one transformation and print the resulting graph6.
    Apply {
        #[arg(long)]
        g6: String,
        #[arg(long = "transformation", short = 't')]
        transformation: String,
        /// Comma-separated vertices.
        #[arg(long, value_delimiter = ',')]
        params: Vec<usize>,
        /// Print the canonical form of the result.
        #[arg(long)]
        canonical: bool,
    },
    /// Every application of one transformation (or all) to a graph.
    List {
        #[arg(long)]
        g6: String,
        #[arg(long = "transformation", short = 't', default_value = "all")]
        transformation: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}
