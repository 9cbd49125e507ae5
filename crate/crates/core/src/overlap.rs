//! Pearson correlation of link weights between layers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::DirectedCountLayer;
use crate::netcore::{build_layer, WeightedLayer};
use crate::numeric::CompensatedSum;
use crate::{Error, Execution, Layer, Result};

/// Which node pairs enter the correlation. Absent weights count as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairDomain {
    /// Pairs linked in at least one of the two layers.
    #[default]
    Union,
    /// Pairs linked in both layers.
    Intersection,
    /// Every unordered node pair.
    All,
}

impl PairDomain {
    pub fn as_str(self) -> &'static str {
        match self {
            PairDomain::Union => "union",
            PairDomain::Intersection => "intersection",
            PairDomain::All => "all",
        }
    }
}

impl fmt::Display for PairDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairDomain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "union" => Ok(PairDomain::Union),
            "intersection" => Ok(PairDomain::Intersection),
            "all" => Ok(PairDomain::All),
            other => Err(format!("unknown pair domain `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapValue {
    pub r_p: f64,
    /// Number of node pairs in the domain.
    pub pair_count: u64,
}

/// Weight pairs over the union of both supports, merged by node pair.
fn merged_weights(a: &WeightedLayer, b: &WeightedLayer) -> Vec<(f64, f64)> {
    let (ea, eb) = (a.edges(), b.edges());
    let mut out = Vec::with_capacity(ea.len().max(eb.len()));
    let (mut i, mut j) = (0, 0);
    while i < ea.len() || j < eb.len() {
        let ka = ea.get(i).map(|e| (e.a, e.b));
        let kb = eb.get(j).map(|e| (e.a, e.b));
        match (ka, kb) {
            (Some(x), Some(y)) if x == y => {
                out.push((ea[i].weight, eb[j].weight));
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push((ea[i].weight, 0.0));
                i += 1;
            }
            (Some(_), None) => {
                out.push((ea[i].weight, 0.0));
                i += 1;
            }
            _ => {
                out.push((0.0, eb[j].weight));
                j += 1;
            }
        }
    }
    out
}

/// Pearson coefficient of the link weights of two layers over `domain`.
///
/// Symmetric in its arguments bit for bit, and exactly 1 for a layer with
/// itself.
pub fn layer_overlap(
    a: &WeightedLayer,
    b: &WeightedLayer,
    domain: PairDomain,
) -> Result<OverlapValue> {
    if a.nodes() != b.nodes() {
        return Err(Error::NodeSetMismatch {
            a: a.layer(),
            b: b.layer(),
        });
    }
    let undefined = || Error::UndefinedOverlap {
        a: a.layer(),
        b: b.layer(),
    };
    let mut pairs = merged_weights(a, b);
    if domain == PairDomain::Intersection {
        pairs.retain(|&(x, y)| x > 0.0 && y > 0.0);
    }
    let n = a.nodes().len() as u64;
    let zeros = match domain {
        PairDomain::All => n * n.saturating_sub(1) / 2 - pairs.len() as u64,
        _ => 0,
    };
    let count = pairs.len() as u64 + zeros;
    if count < 2 {
        return Err(undefined());
    }
    let (mut sa, mut sb) = (CompensatedSum::default(), CompensatedSum::default());
    for &(x, y) in &pairs {
        sa.add(x);
        sb.add(y);
    }
    let (ma, mb) = (sa.value() / count as f64, sb.value() / count as f64);
    let (mut caa, mut cbb, mut cab) = (
        CompensatedSum::default(),
        CompensatedSum::default(),
        CompensatedSum::default(),
    );
    for &(x, y) in &pairs {
        let (dx, dy) = (x - ma, y - mb);
        caa.add(dx * dx);
        cbb.add(dy * dy);
        cab.add(dx * dy);
    }
    let z = zeros as f64;
    let saa = caa.value() + z * (ma * ma);
    let sbb = cbb.value() + z * (mb * mb);
    let sab = cab.value() + z * (ma * mb);
    if !(saa > 0.0 && sbb > 0.0) {
        return Err(undefined());
    }
    Ok(OverlapValue {
        r_p: (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0),
        pair_count: count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    pub alpha: f64,
    pub domain: PairDomain,
    pub layers: Vec<Layer>,
    /// `None` where the coefficient is undefined. Diagonal is 1.
    pub r_p: Vec<Vec<Option<f64>>>,
    pub pair_domain_size: Vec<Vec<u64>>,
}

impl OverlapMatrix {
    pub fn get(&self, a: Layer, b: Layer) -> Option<f64> {
        let i = self.layers.iter().position(|&l| l == a)?;
        let j = self.layers.iter().position(|&l| l == b)?;
        self.r_p[i][j]
    }
}

/// All pairwise overlaps between `layers`.
pub fn overlap_matrix(layers: &[WeightedLayer], domain: PairDomain) -> Result<OverlapMatrix> {
    let k = layers.len();
    let mut r_p = vec![vec![None; k]; k];
    let mut sizes = vec![vec![0u64; k]; k];
    for i in 0..k {
        r_p[i][i] = Some(1.0);
        for j in i + 1..k {
            match layer_overlap(&layers[i], &layers[j], domain) {
                Ok(v) => {
                    r_p[i][j] = Some(v.r_p);
                    r_p[j][i] = Some(v.r_p);
                    sizes[i][j] = v.pair_count;
                    sizes[j][i] = v.pair_count;
                }
                Err(e) if e.is_undefined_statistic() => {
                    log::warn!("{e}");
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(OverlapMatrix {
        alpha: layers.first().map_or(f64::NAN, |l| l.alpha()),
        domain,
        layers: layers.iter().map(|l| l.layer()).collect(),
        r_p,
        pair_domain_size: sizes,
    })
}

#[derive(Debug)]
pub struct OverlapPoint {
    pub alpha: f64,
    pub result: Result<OverlapMatrix>,
}

/// Rebuilds every layer at each `alpha` and computes all pairwise overlaps.
pub fn overlap_alpha_sweep(
    counts: &[DirectedCountLayer],
    alphas: &[f64],
    domain: PairDomain,
    exec: Execution,
) -> Result<Vec<OverlapPoint>> {
    if counts.len() < 2 {
        return Err(Error::Config(format!(
            "overlap needs at least two layers, got {}",
            counts.len()
        )));
    }
    Ok(exec.map_slice(alphas, |&alpha| OverlapPoint {
        alpha,
        result: counts
            .iter()
            .map(|c| build_layer(c, alpha))
            .collect::<Result<Vec<_>>>()
            .and_then(|layers| overlap_matrix(&layers, domain)),
    }))
}
