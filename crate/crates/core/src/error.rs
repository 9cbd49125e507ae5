use std::path::PathBuf;

use crate::Layer;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("alpha must be a finite number >= 0, got {0}")]
    NegativeAlpha(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("no edge of layer {layer} has `{variable}` on both endpoints")]
    NoEligiblePairs { layer: Layer, variable: String },

    #[error(
        "ICC undefined for `{variable}` on layer {layer}: zero variance over the linked sample"
    )]
    UndefinedIcc { layer: Layer, variable: String },

    #[error("overlap undefined between {a} and {b}: zero weight variance over the pair domain")]
    UndefinedOverlap { a: Layer, b: Layer },

    #[error("layers {a} and {b} are defined on different node sets")]
    NodeSetMismatch { a: Layer, b: Layer },

    #[error("cannot place {edges} edges on {nodes} nodes ({pairs} distinct pairs)")]
    ImpossiblePlacement {
        edges: usize,
        nodes: usize,
        pairs: u64,
    },

    #[error("layer {0} has no edges")]
    EmptyLayer(Layer),

    #[error(
        "{defined} of {requested} replicas produced a defined statistic (need at least {needed})"
    )]
    TooFewReplicas {
        requested: usize,
        defined: usize,
        needed: usize,
    },

    #[error("scans by `{device}` are not time ordered (t={prev} then t={next})")]
    UnsortedScans {
        device: String,
        prev: i64,
        next: i64,
    },
}

impl Error {
    /// True for errors caused by a statistic that is undefined on otherwise
    /// valid input.
    pub fn is_undefined_statistic(&self) -> bool {
        matches!(
            self,
            Error::UndefinedIcc { .. }
                | Error::UndefinedOverlap { .. }
                | Error::NoEligiblePairs { .. }
                | Error::TooFewReplicas { .. }
        )
    }
}
