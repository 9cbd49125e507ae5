use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AttributeTable;
use crate::ingest::DirectedCountLayer;
use crate::netcore::{build_layer, WeightedLayer};
use crate::numeric::CompensatedSum;
use crate::{Error, Execution, Layer, Result};

/// Denominator used for the weighted covariance `t²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `t² = Σ w (x_i − x̄)(x_j − x̄) / Σ w`; identical endpoints give r = 1.
    #[default]
    Canonical,
    /// `t² = Σ w (x_i − x̄)(x_j − x̄) / 2Σ w`; r is confined to [−1/2, 1/2].
    StrictLiteral,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Canonical => "canonical",
            Convention::StrictLiteral => "strict-literal",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" => Ok(Convention::Canonical),
            "strict-literal" => Ok(Convention::StrictLiteral),
            other => Err(format!("unknown convention `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IccResult {
    pub layer: Layer,
    pub variable: String,
    pub alpha: f64,
    pub convention: Convention,
    pub r: f64,
    pub s_sq: f64,
    pub t_sq: f64,
    pub x_bar: f64,
    /// Edges with a value on both endpoints.
    pub pair_count: usize,
    /// Edges dropped because an endpoint lacks a value.
    pub excluded_pairs: usize,
    pub total_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct IccStats {
    pub r: f64,
    pub s_sq: f64,
    pub t_sq: f64,
    pub x_bar: f64,
    pub total_weight: f64,
}

/// ICC over `(x_i, x_j, w_ij)` triples. `None` when there are no triples or
/// every value is identical.
pub(crate) fn icc_from_triples(
    triples: &[(f64, f64, f64)],
    convention: Convention,
) -> Option<IccStats> {
    let first = triples.first()?.0;
    if triples
        .iter()
        .all(|&(xi, xj, _)| xi == first && xj == first)
    {
        return None;
    }
    let mut weight = CompensatedSum::default();
    let mut weighted_x = CompensatedSum::default();
    for &(xi, xj, w) in triples {
        weight.add(w);
        weighted_x.add(w * (xi + xj));
    }
    let total_weight = weight.value();
    let x_bar = weighted_x.value() / (2.0 * total_weight);
    let mut var = CompensatedSum::default();
    let mut cov = CompensatedSum::default();
    for &(xi, xj, w) in triples {
        let (di, dj) = (xi - x_bar, xj - x_bar);
        var.add(w * (di * di + dj * dj));
        cov.add(w * di * dj);
    }
    let s_sq = var.value() / (2.0 * total_weight);
    let t_sq = match convention {
        Convention::Canonical => cov.value() / total_weight,
        Convention::StrictLiteral => cov.value() / (2.0 * total_weight),
    };
    if s_sq <= 0.0 {
        return None;
    }
    Some(IccStats {
        r: t_sq / s_sq,
        s_sq,
        t_sq,
        x_bar,
        total_weight,
    })
}

/// Collects the `(x_i, x_j, w)` triples of edges whose endpoints both carry
/// a value; returns them with the number of excluded edges.
pub(crate) fn eligible_triples(
    layer: &WeightedLayer,
    values: &[Option<f64>],
) -> (Vec<(f64, f64, f64)>, usize) {
    let mut triples = Vec::with_capacity(layer.edges().len());
    let mut excluded = 0;
    for e in layer.edges() {
        match (values[e.a as usize], values[e.b as usize]) {
            (Some(xi), Some(xj)) => triples.push((xi, xj, e.weight)),
            _ => excluded += 1,
        }
    }
    (triples, excluded)
}

/// Weighted intraclass correlation of `variable` over `layer`.
///
/// Edges with a missing value on either endpoint are excluded and counted.
pub fn weighted_icc(
    layer: &WeightedLayer,
    attrs: &AttributeTable,
    variable: &str,
    convention: Convention,
) -> Result<IccResult> {
    let values = attrs.resolve(variable, layer.nodes())?;
    let (triples, excluded_pairs) = eligible_triples(layer, &values);
    if triples.is_empty() {
        return Err(Error::NoEligiblePairs {
            layer: layer.layer(),
            variable: variable.to_string(),
        });
    }
    let stats = icc_from_triples(&triples, convention).ok_or_else(|| Error::UndefinedIcc {
        layer: layer.layer(),
        variable: variable.to_string(),
    })?;
    Ok(IccResult {
        layer: layer.layer(),
        variable: variable.to_string(),
        alpha: layer.alpha(),
        convention,
        r: stats.r,
        s_sq: stats.s_sq,
        t_sq: stats.t_sq,
        x_bar: stats.x_bar,
        pair_count: triples.len(),
        excluded_pairs,
        total_weight: stats.total_weight,
    })
}

/// 0.0, 0.1, ..., 2.0.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug)]
pub struct SweepPoint {
    pub alpha: f64,
    pub result: Result<IccResult>,
}

/// Rebuilds the layer at every `alpha` and recomputes the ICC. A failure at
/// one point does not stop the others; points come back in input order.
pub fn icc_alpha_sweep(
    counts: &DirectedCountLayer,
    attrs: &AttributeTable,
    variable: &str,
    alphas: &[f64],
    convention: Convention,
    exec: Execution,
) -> Vec<SweepPoint> {
    exec.map_slice(alphas, |&alpha| SweepPoint {
        alpha,
        result: build_layer(counts, alpha)
            .and_then(|layer| weighted_icc(&layer, attrs, variable, convention)),
    })
}
