use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use super::{check_header, csv_reader, record_line, InteractionEvent};
use crate::{Error, Layer, Result};

pub(crate) const COUNTS_HEADER: [&str; 4] = ["layer", "source", "target", "value"];

/// Accumulated interaction magnitude per ordered node pair for one layer.
///
/// Values are counts for call and sms layers and seconds of co-presence for
/// the proximity layer. Only strictly positive values are stored and
/// self-pairs never are.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedCountLayer {
    layer: Layer,
    node_set: BTreeSet<String>,
    entries: BTreeMap<(String, String), f64>,
}

impl DirectedCountLayer {
    pub fn new(layer: Layer, node_set: BTreeSet<String>) -> Self {
        Self {
            layer,
            node_set,
            entries: BTreeMap::new(),
        }
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn node_set(&self) -> &BTreeSet<String> {
        &self.node_set
    }

    pub fn entries(&self) -> &BTreeMap<(String, String), f64> {
        &self.entries
    }

    pub fn get(&self, source: &str, target: &str) -> Option<f64> {
        self.entries
            .get(&(source.to_string(), target.to_string()))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all stored values.
    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Adds `value` to the entry `source → target`, registering both
    /// endpoints in the node set. Zero values only register the endpoints.
    pub fn add(&mut self, source: &str, target: &str, value: f64) -> Result<()> {
        if source == target {
            return Err(Error::Config(format!("self-pair `{source}`")));
        }
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Config(format!(
                "count {source}->{target} must be finite and >= 0, got {value}"
            )));
        }
        self.node_set.insert(source.to_string());
        self.node_set.insert(target.to_string());
        if value > 0.0 {
            *self
                .entries
                .entry((source.to_string(), target.to_string()))
                .or_insert(0.0) += value;
        }
        Ok(())
    }

    /// Replaces the node set with `nodes`, which must contain every endpoint.
    pub fn with_node_set(mut self, nodes: BTreeSet<String>) -> Result<Self> {
        for (s, t) in self.entries.keys() {
            if !nodes.contains(s) || !nodes.contains(t) {
                return Err(Error::Config(format!(
                    "node set does not contain the endpoints of {s}->{t}"
                )));
            }
        }
        self.node_set = nodes;
        Ok(self)
    }

    /// Copy with every value multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v *= factor;
        }
        out
    }
}

/// Counts events of `layer` from `i` to `j` with both endpoints in `node_set`.
pub fn aggregate_counts(
    layer: Layer,
    events: &[InteractionEvent],
    node_set: &BTreeSet<String>,
) -> DirectedCountLayer {
    let mut entries: BTreeMap<(String, String), f64> = BTreeMap::new();
    for e in events.iter().filter(|e| e.layer == layer) {
        if node_set.contains(&e.source) && node_set.contains(&e.target) {
            *entries
                .entry((e.source.clone(), e.target.clone()))
                .or_insert(0.0) += 1.0;
        }
    }
    DirectedCountLayer {
        layer,
        node_set: node_set.clone(),
        entries,
    }
}

/// Parses a counts CSV (`layer,source,target,value`).
///
/// Returns one layer per layer tag present, in [`Layer`] order. Every layer
/// gets the union of all endpoints as its node set so that layers stay
/// comparable. Duplicate rows accumulate.
pub fn parse_counts<R: Read>(rdr: R) -> Result<Vec<DirectedCountLayer>> {
    let mut reader = csv_reader(rdr);
    if !check_header(&mut reader, &COUNTS_HEADER)? {
        return Ok(Vec::new());
    }
    let mut by_layer: BTreeMap<Layer, DirectedCountLayer> = BTreeMap::new();
    let mut nodes = BTreeSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record_line(&record);
        let err = |message: String| Error::Parse { line, message };
        if record.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", record.len())));
        }
        let layer: Layer = record[0].parse().map_err(err)?;
        let value: f64 = record[3]
            .parse()
            .map_err(|_| err(format!("invalid value `{}`", &record[3])))?;
        if record[1].is_empty() || record[2].is_empty() {
            return Err(err("empty node identifier".into()));
        }
        by_layer
            .entry(layer)
            .or_insert_with(|| DirectedCountLayer::new(layer, BTreeSet::new()))
            .add(&record[1], &record[2], value)
            .map_err(|e| err(e.to_string()))?;
        nodes.insert(record[1].to_string());
        nodes.insert(record[2].to_string());
    }
    by_layer
        .into_values()
        .map(|l| l.with_node_set(nodes.clone()))
        .collect()
}

/// Writes layers as a counts CSV readable by [`parse_counts`].
pub fn write_counts<W: Write>(wtr: W, layers: &[DirectedCountLayer]) -> Result<()> {
    let mut w = csv::Writer::from_writer(wtr);
    w.write_record(COUNTS_HEADER)?;
    for layer in layers {
        for ((s, t), v) in &layer.entries {
            w.write_record([layer.layer.as_str(), s, t, &v.to_string()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: i64, s: &str, d: &str, layer: Layer) -> InteractionEvent {
        InteractionEvent {
            timestamp: t,
            source: s.into(),
            target: d.into(),
            layer,
            magnitude: 1.0,
        }
    }

    fn nodes(ns: &[&str]) -> BTreeSet<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counts_directed_calls() {
        let events = vec![
            ev(1, "A", "B", Layer::Call),
            ev(2, "A", "B", Layer::Call),
            ev(3, "A", "B", Layer::Call),
            ev(4, "B", "A", Layer::Call),
            ev(5, "B", "A", Layer::Sms),
        ];
        let c = aggregate_counts(Layer::Call, &events, &nodes(&["A", "B"]));
        assert_eq!(c.get("A", "B"), Some(3.0));
        assert_eq!(c.get("B", "A"), Some(1.0));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn out_of_population_endpoints_are_dropped() {
        let events = vec![ev(1, "A", "X", Layer::Call)];
        let c = aggregate_counts(Layer::Call, &events, &nodes(&["A", "B"]));
        assert!(c.is_empty());
        assert_eq!(c.node_set().len(), 2);
    }

    #[test]
    fn no_events_gives_empty_layer() {
        assert!(aggregate_counts(Layer::Sms, &[], &nodes(&["A"])).is_empty());
    }

    #[test]
    fn counts_csv_round_trip_and_shared_node_set() {
        let csv =
            "layer,source,target,value\ncall,A,B,3\nsms,B,C,2\nsms,B,C,1\nproximity,C,A,600\n";
        let layers = parse_counts(csv.as_bytes()).unwrap();
        assert_eq!(layers.len(), 3);
        assert!(layers.iter().all(|l| l.node_set().len() == 3));
        assert_eq!(layers[1].get("B", "C"), Some(3.0));
        let mut buf = Vec::new();
        write_counts(&mut buf, &layers).unwrap();
        assert_eq!(parse_counts(buf.as_slice()).unwrap(), layers);
    }

    #[test]
    fn negative_and_self_rows_are_errors() {
        let e = parse_counts("layer,source,target,value\ncall,A,B,-1\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_counts("layer,source,target,value\ncall,A,A,1\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn zero_rows_register_nodes_only() {
        let layers =
            parse_counts("layer,source,target,value\ncall,A,B,0\ncall,B,C,1\n".as_bytes()).unwrap();
        assert_eq!(layers[0].len(), 1);
        assert_eq!(layers[0].node_set().len(), 3);
    }
}
