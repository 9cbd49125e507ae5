use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plexsim::{Convention, Layer, NullModel, PValueEstimator, PairDomain, Sidedness};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "plexsim",
    version,
    about = "Node similarity and layer overlap in weighted multilayer networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for output files.
    #[arg(long, global = true, env = "PLEXSIM_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,

    /// Worker threads for resampling (0 = one per core). Does not affect results.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Run everything on the calling thread. Does not affect results.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build weighted layers and write them with a manifest.
    Build {
        #[command(flatten)]
        input: InputArgs,
        /// Weight exponent.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
    },
    /// Weighted intraclass correlation per layer and variable.
    Similarity {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        attrs: AttributeArgs,
        /// Weight exponent(s), comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1",
            allow_negative_numbers = true
        )]
        alpha: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ConventionArg::Canonical)]
        convention: ConventionArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Permutation p-values of the ICC.
    Pvalues {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        attrs: AttributeArgs,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "1",
            allow_negative_numbers = true
        )]
        alpha: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ConventionArg::Canonical)]
        convention: ConventionArg,
        #[command(flatten)]
        null: NullArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// ICC over a grid of exponents, with a bootstrap standard deviation.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        attrs: AttributeArgs,
        /// Exponent grid, comma separated [default: 0, 0.1, ..., 2].
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        alphas: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ConventionArg::Canonical)]
        convention: ConventionArg,
        /// Bootstrap replicas per point (0 skips the envelope).
        #[arg(long, default_value_t = 1000)]
        bootstrap_replicas: usize,
        /// Master seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Pearson overlap of link weights between layers over a grid of exponents.
    Overlap {
        #[command(flatten)]
        input: InputArgs,
        /// Exponent grid, comma separated [default: 0, 0.1, ..., 2].
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        alphas: Vec<f64>,
        #[arg(long, value_enum, default_value_t = PairDomainArg::Union)]
        pair_domain: PairDomainArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Generate a synthetic dataset (counts and attributes).
    Synth {
        /// JSON generator configuration; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Plant each node's strongest link across the first binary attribute.
        #[arg(long)]
        cross_link: bool,
        /// Shared share of pair strength across layers, in [0, 1].
        #[arg(long)]
        layer_coupling: Option<f64>,
    },
    /// Node and edge tables of each weighted layer for external drawing.
    ExportGraph {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        /// Leave out edges lighter than this.
        #[arg(long)]
        prune: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Raw interaction events CSV (timestamp,source,target,layer,magnitude).
    #[arg(long, conflicts_with = "counts", required_unless_present = "counts")]
    pub events: Option<PathBuf>,
    /// Aggregated counts CSV (layer,source,target,count).
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Layers to use, comma separated [default: all present].
    #[arg(long, value_delimiter = ',')]
    pub layers: Vec<Layer>,
    #[command(flatten)]
    pub filters: FilterArgs,
}

/// Only used with `--events`.
#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long, default_value_t = 90.0)]
    pub min_span_days: f64,
    #[arg(long, default_value_t = 170)]
    pub min_calls: u64,
    #[arg(long, default_value_t = 950)]
    pub min_sms: u64,
    #[arg(long, default_value_t = 200.0)]
    pub min_proximity_hours: f64,
    /// Keep every participant regardless of activity.
    #[arg(long)]
    pub no_activity_filter: bool,
    /// Weakest signal (dBm) that counts as a proximity detection.
    #[arg(long, default_value_t = -75.0, allow_hyphen_values = true)]
    pub rssi_threshold: f64,
    /// Longest scan separation (seconds) credited as contact time.
    #[arg(long, default_value_t = 600)]
    pub gap_cap: i64,
    /// Proximity bin width in seconds.
    #[arg(long, default_value_t = 300)]
    pub bin_seconds: i64,
    /// Local UTC offset for the evening/weekend proximity window.
    #[arg(long, default_value = "+00:00", allow_hyphen_values = true)]
    pub utc_offset: String,
    /// Use proximity scans from all hours.
    #[arg(long)]
    pub no_window: bool,
}

#[derive(Debug, Args)]
pub struct AttributeArgs {
    /// Attribute CSV (node,variable,value,kind).
    #[arg(long)]
    pub attributes: PathBuf,
    /// Variables to analyse, comma separated [default: all].
    #[arg(long, value_delimiter = ',')]
    pub variables: Vec<String>,
    /// Categorical encoding, e.g. `politics=left:0,centre:1,right:2`. Repeatable.
    #[arg(long)]
    pub encoding: Vec<String>,
}

#[derive(Debug, Args)]
pub struct NullArgs {
    /// Null replicas per test.
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = NullModelArg::LinkReshuffle)]
    pub null_model: NullModelArg,
    #[arg(long, value_enum, default_value_t = SidednessArg::Greater)]
    pub sidedness: SidednessArg,
    /// `literal` is count/B; `smoothed` is (1 + count)/(B + 1).
    #[arg(long, value_enum, default_value_t = EstimatorArg::Literal)]
    pub estimator: EstimatorArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

// clap-facing mirrors of the library enums

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Canonical,
    StrictLiteral,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Canonical => Convention::Canonical,
            ConventionArg::StrictLiteral => Convention::StrictLiteral,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NullModelArg {
    LinkReshuffle,
    AttributePermutation,
}

impl From<NullModelArg> for NullModel {
    fn from(m: NullModelArg) -> Self {
        match m {
            NullModelArg::LinkReshuffle => NullModel::LinkReshuffle,
            NullModelArg::AttributePermutation => NullModel::AttributePermutation,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SidednessArg {
    Greater,
    TwoSided,
}

impl From<SidednessArg> for Sidedness {
    fn from(s: SidednessArg) -> Self {
        match s {
            SidednessArg::Greater => Sidedness::Greater,
            SidednessArg::TwoSided => Sidedness::TwoSided,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Literal,
    Smoothed,
}

impl From<EstimatorArg> for PValueEstimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Literal => PValueEstimator::Literal,
            EstimatorArg::Smoothed => PValueEstimator::Smoothed,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PairDomainArg {
    Union,
    Intersection,
    All,
}

impl From<PairDomainArg> for PairDomain {
    fn from(d: PairDomainArg) -> Self {
        match d {
            PairDomainArg::Union => PairDomain::Union,
            PairDomainArg::Intersection => PairDomain::Intersection,
            PairDomainArg::All => PairDomain::All,
        }
    }
}
