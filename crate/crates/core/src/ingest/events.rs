use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{check_header, csv_reader, record_line};
use crate::{Error, Layer, Result};

pub(crate) const EVENTS_HEADER: [&str; 5] = ["timestamp", "source", "target", "layer", "magnitude"];

/// One timestamped record between two participants.
///
/// `magnitude` is 1 for call and sms rows and the received signal strength
/// for proximity rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub timestamp: i64,
    pub source: String,
    pub target: String,
    pub layer: Layer,
    pub magnitude: f64,
}

/// Parses an events CSV (`timestamp,source,target,layer,magnitude`).
///
/// The result is sorted by timestamp, ties broken by the remaining fields so
/// the order does not depend on the input row order.
pub fn parse_events<R: Read>(rdr: R) -> Result<Vec<InteractionEvent>> {
    let mut reader = csv_reader(rdr);
    if !check_header(&mut reader, &EVENTS_HEADER)? {
        return Ok(Vec::new());
    }
    let mut events = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record_line(&record);
        let err = |message: String| Error::Parse { line, message };
        if record.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", record.len())));
        }
        let timestamp: i64 = record[0]
            .parse()
            .map_err(|_| err(format!("invalid timestamp `{}`", &record[0])))?;
        let source = record[1].to_string();
        let target = record[2].to_string();
        if source.is_empty() || target.is_empty() {
            return Err(err("empty node identifier".into()));
        }
        if source == target {
            return Err(err(format!("self-interaction of `{source}`")));
        }
        let layer: Layer = record[3].parse().map_err(err)?;
        let magnitude: f64 = record[4]
            .parse()
            .map_err(|_| err(format!("invalid magnitude `{}`", &record[4])))?;
        if !magnitude.is_finite() {
            return Err(err(format!("non-finite magnitude `{}`", &record[4])));
        }
        if layer != Layer::Proximity && magnitude < 0.0 {
            return Err(err(format!("negative magnitude {magnitude}")));
        }
        events.push(InteractionEvent {
            timestamp,
            source,
            target,
            layer,
            magnitude,
        });
    }
    events.sort_by(|a, b| {
        a.timestamp
            .cmp(&b.timestamp)
            .then_with(|| a.layer.cmp(&b.layer))
            .then_with(|| a.source.cmp(&b.source))
            .then_with(|| a.target.cmp(&b.target))
            .then_with(|| a.magnitude.total_cmp(&b.magnitude))
    });
    Ok(events)
}
