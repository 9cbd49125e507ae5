//! Weighted multilayer social networks with an exponent-tunable link weight.
//!
//! The crate turns raw interaction records (calls, messages, proximity scans)
//! into per-layer directed counts, converts those into symmetric weighted
//! layers for a chosen exponent `alpha`, and computes:
//!
//! - the weighted intraclass correlation of a node attribute over a layer
//!   ([`simmetrics`]),
//! - permutation p-values and bootstrap standard deviations for it
//!   ([`nullmodels`]),
//! - the Pearson overlap between the link weights of two layers ([`overlap`]).
//!
//! [`synthgen`] produces synthetic data with planted homophily and planted
//! layer coupling so all of the above can be exercised without a real study.
//!
//! ## Feature flags
//!
//! - `parallel` (default): resampling replicas and sweeps run on the rayon
//!   thread pool. Without it every [`Execution`] falls back to a sequential
//!   loop. Results are bit-identical either way.

pub mod error;
pub mod exec;
pub mod ingest;
pub mod netcore;
pub mod nullmodels;
pub mod overlap;
pub mod simmetrics;
pub mod synthgen;

mod layer;
mod numeric;

pub use error::{Error, Result};
pub use exec::{derive_seed, Execution};
pub use ingest::{
    aggregate_counts, aggregate_proximity, filter_participants, filter_proximity_window,
    parse_counts, parse_events, write_counts, ActivityThresholds, DirectedCountLayer,
    InteractionEvent, ParticipantActivity, ProximityConfig,
};
pub use layer::Layer;
pub use netcore::{alpha_weights, build_layer, symmetrize, DirectedWeights, Edge, WeightedLayer};
pub use nullmodels::{
    icc_p_value, icc_std_envelope, reshuffle_layer, Envelope, NullModel, PValueEstimator,
    PValueOptions, Sidedness, SignificanceResult,
};
pub use overlap::{layer_overlap, overlap_alpha_sweep, OverlapMatrix, OverlapValue, PairDomain};
pub use simmetrics::{
    default_alpha_grid, icc_alpha_sweep, weighted_icc, AttributeTable, Convention, IccResult,
    SweepPoint, VariableKind,
};
pub use synthgen::{generate, SynthConfig, SynthData};
