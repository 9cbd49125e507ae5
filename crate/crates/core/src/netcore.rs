//! Directed counts to symmetric weighted layers.
//!
//! For exponent `alpha`, node `i` spreads a unit of out-weight over its
//! out-links in proportion to `n_ij^alpha`. The symmetric weight of a pair is
//! the mean of its two directed weights, a missing direction counting as 0.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use crate::ingest::DirectedCountLayer;
use crate::{Error, Layer, Result};

/// Undirected weighted link, `a < b` as node indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub weight: f64,
}

/// Row-normalized directed weights, one sorted row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedWeights {
    layer: Layer,
    alpha: f64,
    nodes: Arc<[String]>,
    rows: Vec<Vec<(u32, f64)>>,
}

impl DirectedWeights {
    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    /// Out-weights of node index `i`, sorted by target.
    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, source: &str, target: &str) -> Option<f64> {
        let i = index_of(&self.nodes, source)?;
        let j = index_of(&self.nodes, target)? as u32;
        self.rows[i]
            .binary_search_by_key(&j, |(t, _)| *t)
            .ok()
            .map(|k| self.rows[i][k].1)
    }
}

/// Symmetric weighted layer for one exponent. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLayer {
    layer: Layer,
    alpha: f64,
    nodes: Arc<[String]>,
    edges: Vec<Edge>,
}

fn index_of(nodes: &[String], name: &str) -> Option<usize> {
    nodes.binary_search_by(|n| n.as_str().cmp(name)).ok()
}

impl WeightedLayer {
    /// Builds a layer from explicit edges over a node list.
    ///
    /// Node names are sorted and deduplicated; weights must be finite and
    /// positive, each unordered pair may appear once.
    pub fn from_named_edges<I, S>(
        layer: Layer,
        alpha: f64,
        nodes: I,
        edges: &[(&str, &str, f64)],
    ) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = nodes.into_iter().map(Into::into).collect();
        names.sort();
        names.dedup();
        let nodes: Arc<[String]> = names.into();
        let mut out = Vec::with_capacity(edges.len());
        for &(s, t, w) in edges {
            let (Some(i), Some(j)) = (index_of(&nodes, s), index_of(&nodes, t)) else {
                return Err(Error::Config(format!(
                    "edge {s}-{t} references an unknown node"
                )));
            };
            if i == j {
                return Err(Error::Config(format!("self-loop on `{s}`")));
            }
            out.push(Edge {
                a: i.min(j) as u32,
                b: i.max(j) as u32,
                weight: w,
            });
        }
        Self::from_edges(layer, alpha, nodes, out)
    }

    pub(crate) fn from_edges(
        layer: Layer,
        alpha: f64,
        nodes: Arc<[String]>,
        mut edges: Vec<Edge>,
    ) -> Result<Self> {
        for e in &edges {
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(Error::Config(format!(
                    "edge weight {} is not positive",
                    e.weight
                )));
            }
            debug_assert!(e.a < e.b && (e.b as usize) < nodes.len());
        }
        edges.sort_by_key(|e| (e.a, e.b));
        if edges
            .windows(2)
            .any(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b))
        {
            return Err(Error::Config("duplicate unordered pair".to_string()));
        }
        Ok(Self {
            layer,
            alpha,
            nodes,
            edges,
        })
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub(crate) fn shared_nodes(&self) -> Arc<[String]> {
        Arc::clone(&self.nodes)
    }

    /// Edges sorted by `(a, b)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        index_of(&self.nodes, name)
    }

    pub fn weight(&self, u: &str, v: &str) -> Option<f64> {
        let (i, j) = (self.node_index(u)?, self.node_index(v)?);
        let key = (i.min(j) as u32, i.max(j) as u32);
        self.edges
            .binary_search_by_key(&key, |e| (e.a, e.b))
            .ok()
            .map(|k| self.edges[k].weight)
    }

    /// Sum of incident weights per node, in node order.
    pub fn strengths(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.nodes.len()];
        for e in &self.edges {
            s[e.a as usize] += e.weight;
            s[e.b as usize] += e.weight;
        }
        s
    }

    /// Copy with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.edges {
            e.weight *= factor;
        }
        out
    }

    /// Writes `source,target,weight`, skipping weights below `prune`.
    pub fn write_edges<W: Write>(&self, wtr: W, prune: Option<f64>) -> Result<()> {
        let mut w = csv::Writer::from_writer(wtr);
        w.write_record(["source", "target", "weight"])?;
        for e in &self.edges {
            if prune.is_some_and(|p| e.weight < p) {
                continue;
            }
            w.write_record([
                self.nodes[e.a as usize].as_str(),
                self.nodes[e.b as usize].as_str(),
                &e.weight.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Writes `node,strength` for every node.
    pub fn write_strengths<W: Write>(&self, wtr: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(wtr);
        w.write_record(["node", "strength"])?;
        for (name, s) in self.nodes.iter().zip(self.strengths()) {
            w.write_record([name.as_str(), &s.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeAlpha(alpha))
    }
}

/// `w_ij = n_ij^alpha / sum_k n_ik^alpha` for every node with out-entries.
///
/// Counts are divided by the row maximum before exponentiation, so large
/// exponents neither overflow nor lose ties.
pub fn alpha_weights(counts: &DirectedCountLayer, alpha: f64) -> Result<DirectedWeights> {
    check_alpha(alpha)?;
    let nodes: Arc<[String]> = counts.node_set().iter().cloned().collect();
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nodes.len()];
    for ((s, t), &n) in counts.entries() {
        let i = index_of(&nodes, s).expect("source in node set");
        let j = index_of(&nodes, t).expect("target in node set");
        rows[i].push((j as u32, n));
    }
    for row in &mut rows {
        if row.is_empty() {
            continue;
        }
        let max = row.iter().map(|&(_, n)| n).fold(f64::MIN, f64::max);
        for entry in row.iter_mut() {
            entry.1 = (entry.1 / max).powf(alpha);
        }
        let total: f64 = row.iter().map(|&(_, w)| w).sum();
        for entry in row.iter_mut() {
            entry.1 /= total;
        }
    }
    Ok(DirectedWeights {
        layer: counts.layer(),
        alpha,
        nodes,
        rows,
    })
}

/// Averages the two directions of every linked pair.
pub fn symmetrize(directed: &DirectedWeights) -> WeightedLayer {
    let mut pairs: BTreeMap<(u32, u32), (f64, f64)> = BTreeMap::new();
    for (i, row) in directed.rows.iter().enumerate() {
        let i = i as u32;
        for &(j, w) in row {
            let slot = pairs.entry((i.min(j), i.max(j))).or_insert((0.0, 0.0));
            if i < j {
                slot.0 = w;
            } else {
                slot.1 = w;
            }
        }
    }
    let edges = pairs
        .into_iter()
        .map(|((a, b), (fwd, back))| Edge {
            a,
            b,
            weight: (fwd + back) / 2.0,
        })
        .collect();
    WeightedLayer {
        layer: directed.layer,
        alpha: directed.alpha,
        nodes: Arc::clone(&directed.nodes),
        edges,
    }
}

/// `symmetrize(alpha_weights(counts, alpha))`.
pub fn build_layer(counts: &DirectedCountLayer, alpha: f64) -> Result<WeightedLayer> {
    Ok(symmetrize(&alpha_weights(counts, alpha)?))
}
