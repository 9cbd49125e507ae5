//! Raw interaction records to per-layer directed counts.
//!
//! Typical pipeline: [`parse_events`] → [`filter_participants`] →
//! [`filter_proximity_window`] (proximity only) → [`aggregate_counts`] /
//! [`aggregate_proximity`]. Pre-aggregated counts can be read directly with
//! [`parse_counts`].

mod activity;
mod counts;
mod events;
mod proximity;

use std::fs::File;
use std::path::Path;

pub use activity::{filter_participants, ActivityThresholds, ParticipantActivity};
pub use counts::{aggregate_counts, parse_counts, write_counts, DirectedCountLayer};
pub use events::{parse_events, InteractionEvent};
pub use proximity::{
    aggregate_proximity, filter_proximity_window, parse_utc_offset, ProximityConfig,
};

use crate::{Error, Result};

/// Opens `path` for reading, attaching the path to any I/O error.
pub fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads an events CSV from disk.
pub fn read_events(path: &Path) -> Result<Vec<InteractionEvent>> {
    parse_events(open(path)?)
}

/// Reads a pre-aggregated counts CSV from disk.
pub fn read_counts(path: &Path) -> Result<Vec<DirectedCountLayer>> {
    parse_counts(open(path)?)
}

/// Validates the header row. Returns `false` for a completely empty input.
pub(crate) fn check_header(
    reader: &mut csv::Reader<impl std::io::Read>,
    expected: &[&str],
) -> Result<bool> {
    let header = reader.headers()?.clone();
    if header.is_empty() {
        return Ok(false);
    }
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            ),
        });
    }
    Ok(true)
}

pub(crate) fn csv_reader<R: std::io::Read>(rdr: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(rdr)
}

pub(crate) fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}
