use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::proximity::contact_seconds;
use super::{InteractionEvent, ProximityConfig};
use crate::{Layer, Result};

/// Minimum activity a participant needs to enter the network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivityThresholds {
    pub min_span_days: f64,
    pub min_calls: u64,
    pub min_sms: u64,
    pub min_proximity_hours: f64,
}

impl Default for ActivityThresholds {
    fn default() -> Self {
        Self {
            min_span_days: 90.0,
            min_calls: 170,
            min_sms: 950,
            min_proximity_hours: 200.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantActivity {
    pub node: String,
    /// Days between the first and last event involving the node.
    pub span_days: f64,
    /// Calls the node took part in, either side.
    pub call_count: u64,
    pub sms_count: u64,
    /// Binned co-presence with any detected device, in hours.
    pub proximity_hours: f64,
}

impl ParticipantActivity {
    fn empty(node: &str) -> Self {
        Self {
            node: node.to_string(),
            span_days: 0.0,
            call_count: 0,
            sms_count: 0,
            proximity_hours: 0.0,
        }
    }

    pub fn meets(&self, t: &ActivityThresholds) -> bool {
        self.span_days >= t.min_span_days
            && self.call_count >= t.min_calls
            && self.sms_count >= t.min_sms
            && self.proximity_hours >= t.min_proximity_hours
    }
}

/// Summarizes every node seen in `events` and returns those meeting all
/// thresholds, together with the summaries (sorted by node).
pub fn filter_participants(
    events: &[InteractionEvent],
    thresholds: &ActivityThresholds,
    proximity: &ProximityConfig,
) -> Result<(BTreeSet<String>, Vec<ParticipantActivity>)> {
    let mut acts: BTreeMap<&str, ParticipantActivity> = BTreeMap::new();
    let mut spans: BTreeMap<&str, (i64, i64)> = BTreeMap::new();
    for e in events {
        for node in [e.source.as_str(), e.target.as_str()] {
            let a = acts
                .entry(node)
                .or_insert_with(|| ParticipantActivity::empty(node));
            match e.layer {
                Layer::Call => a.call_count += 1,
                Layer::Sms => a.sms_count += 1,
                Layer::Proximity => {}
            }
            let span = spans.entry(node).or_insert((e.timestamp, e.timestamp));
            span.0 = span.0.min(e.timestamp);
            span.1 = span.1.max(e.timestamp);
        }
    }
    for ((a, b), secs) in contact_seconds(events, |_| true, proximity)? {
        for node in [a, b] {
            if let Some(act) = acts.get_mut(node) {
                act.proximity_hours += secs / 3600.0;
            }
        }
    }
    for (node, (first, last)) in spans {
        if let Some(a) = acts.get_mut(node) {
            a.span_days = (last - first) as f64 / 86_400.0;
        }
    }
    let included = acts
        .values()
        .filter(|a| a.meets(thresholds))
        .map(|a| a.node.clone())
        .collect();
    Ok((included, acts.into_values().collect()))
}
