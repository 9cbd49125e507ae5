//! Weighted intraclass correlation of a node attribute over a layer.

mod attributes;
mod icc;

pub use attributes::{parse_attributes, write_attributes, AttributeTable, VariableKind};
pub use icc::{
    default_alpha_grid, icc_alpha_sweep, weighted_icc, Convention, IccResult, SweepPoint,
};

pub(crate) use icc::icc_from_triples;
