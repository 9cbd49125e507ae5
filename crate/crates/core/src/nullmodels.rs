//! Permutation significance and bootstrap spread of the weighted ICC.
//!
//! Replica `b` of a procedure seeded with `seed` always draws from ChaCha
//! stream `b`, so results do not depend on how replicas are scheduled.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::replica_rng;
use crate::netcore::{Edge, WeightedLayer};
use crate::simmetrics::{icc_from_triples, weighted_icc, AttributeTable, Convention};
use crate::{Error, Execution, Layer, Result};

macro_rules! string_enum {
    ($ty:ident { $($variant:ident => $s:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $s),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($s => Ok($ty::$variant),)+
                    other => Err(format!("unknown {} `{other}`", stringify!($ty))),
                }
            }
        }
    };
}

/// What the reference replicas randomize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullModel {
    /// Same weight multiset placed on uniformly random distinct node pairs.
    #[default]
    LinkReshuffle,
    /// Same topology, attribute values permuted among the nodes that have one.
    AttributePermutation,
}
string_enum!(NullModel { LinkReshuffle => "link-reshuffle", AttributePermutation => "attribute-permutation" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    /// Fraction of replicas with r strictly larger than observed.
    #[default]
    Greater,
    /// Fraction of replicas at least as far from the null mean as observed.
    TwoSided,
}
string_enum!(Sidedness { Greater => "greater", TwoSided => "two-sided" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueEstimator {
    /// `count / B`; can be exactly 0.
    #[default]
    Literal,
    /// `(1 + count) / (B + 1)`.
    Smoothed,
}
string_enum!(PValueEstimator { Literal => "literal", Smoothed => "smoothed" });

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValueOptions {
    pub replicas: usize,
    pub seed: u64,
    pub null_model: NullModel,
    pub sidedness: Sidedness,
    pub estimator: PValueEstimator,
    pub convention: Convention,
    pub execution: Execution,
}

impl Default for PValueOptions {
    fn default() -> Self {
        Self {
            replicas: 10_000,
            seed: 0,
            null_model: NullModel::default(),
            sidedness: Sidedness::default(),
            estimator: PValueEstimator::default(),
            convention: Convention::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub layer: Layer,
    pub variable: String,
    pub alpha: f64,
    pub observed_r: f64,
    pub p_value: f64,
    /// Replicas requested.
    pub replicas: usize,
    /// Replicas whose ICC was undefined and were dropped.
    pub discarded_replicas: usize,
    pub null_mean: f64,
    pub null_std: f64,
    pub seed: u64,
    pub null_model: NullModel,
    pub sidedness: Sidedness,
    pub estimator: PValueEstimator,
    /// Replica statistics in replica order, `None` where undefined.
    pub null_distribution: Vec<Option<f64>>,
}

impl SignificanceResult {
    pub fn defined_replicas(&self) -> usize {
        self.replicas - self.discarded_replicas
    }
}

/// Pair spaces up to this size are shuffled in a dense buffer.
const DENSE_SAMPLING_LIMIT: u64 = 1 << 20;

/// Samples `m` distinct values from `0..total` by a partial Fisher–Yates
/// shuffle of the index space: dense for small spaces, through a sparse map
/// of displaced entries otherwise. Both consume the RNG identically.
fn sample_distinct<R: Rng>(total: u64, m: usize, rng: &mut R) -> Vec<u64> {
    if total <= DENSE_SAMPLING_LIMIT {
        let mut space: Vec<u64> = (0..total).collect();
        for k in 0..m {
            let r = rng.random_range(k as u64..total) as usize;
            space.swap(k, r);
        }
        space.truncate(m);
        return space;
    }
    let mut displaced: HashMap<u64, u64> = HashMap::with_capacity(2 * m);
    let mut out = Vec::with_capacity(m);
    for k in 0..m as u64 {
        let r = rng.random_range(k..total);
        let at_r = displaced.get(&r).copied().unwrap_or(r);
        let at_k = displaced.get(&k).copied().unwrap_or(k);
        displaced.insert(r, at_k);
        out.push(at_r);
    }
    out
}

/// Maps `k` in `0..n(n-1)/2` to the pair `(a, b)`, `a < b`, with
/// `k = b(b-1)/2 + a`.
fn decode_pair(k: u64) -> (u32, u32) {
    let mut b = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0) as u64;
    while b * (b - 1) / 2 > k {
        b -= 1;
    }
    while (b + 1) * b / 2 <= k {
        b += 1;
    }
    ((k - b * (b - 1) / 2) as u32, b as u32)
}

fn pair_space(nodes: usize) -> u64 {
    let n = nodes as u64;
    n * n.saturating_sub(1) / 2
}

fn check_placeable(layer: &WeightedLayer) -> Result<u64> {
    if layer.edges().is_empty() {
        return Err(Error::EmptyLayer(layer.layer()));
    }
    let pairs = pair_space(layer.nodes().len());
    if layer.edges().len() as u64 > pairs {
        return Err(Error::ImpossiblePlacement {
            edges: layer.edges().len(),
            nodes: layer.nodes().len(),
            pairs,
        });
    }
    Ok(pairs)
}

fn reshuffled_edges<R: Rng>(layer: &WeightedLayer, pairs: u64, rng: &mut R) -> Vec<Edge> {
    sample_distinct(pairs, layer.edges().len(), rng)
        .into_iter()
        .zip(layer.edges())
        .map(|(k, e)| {
            let (a, b) = decode_pair(k);
            Edge {
                a,
                b,
                weight: e.weight,
            }
        })
        .collect()
}

/// Places the layer's weights on uniformly random distinct node pairs.
pub fn reshuffle_layer(layer: &WeightedLayer, seed: u64) -> Result<WeightedLayer> {
    let pairs = check_placeable(layer)?;
    let mut rng = replica_rng(seed, 0);
    let edges = reshuffled_edges(layer, pairs, &mut rng);
    WeightedLayer::from_edges(layer.layer(), layer.alpha(), layer.shared_nodes(), edges)
}

/// p-value of `observed` against a null sample.
pub fn p_value_from_null(
    observed: f64,
    null: &[f64],
    sidedness: Sidedness,
    estimator: PValueEstimator,
) -> f64 {
    let count = match sidedness {
        Sidedness::Greater => null.iter().filter(|&&r| r > observed).count(),
        Sidedness::TwoSided => {
            let mean = mean(null);
            let d = (observed - mean).abs();
            null.iter().filter(|&&r| (r - mean).abs() >= d).count()
        }
    };
    match estimator {
        PValueEstimator::Literal => count as f64 / null.len() as f64,
        PValueEstimator::Smoothed => (1 + count) as f64 / (null.len() + 1) as f64,
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n − 1 denominator); 0 for fewer than two values.
fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn triples_from_edges<'a>(
    edges: impl Iterator<Item = &'a Edge>,
    values: &[Option<f64>],
) -> Vec<(f64, f64, f64)> {
    edges
        .filter_map(|e| match (values[e.a as usize], values[e.b as usize]) {
            (Some(xi), Some(xj)) => Some((xi, xj, e.weight)),
            _ => None,
        })
        .collect()
}

/// Permutation p-value of the weighted ICC of `variable` on `layer`.
pub fn icc_p_value(
    layer: &WeightedLayer,
    attrs: &AttributeTable,
    variable: &str,
    opts: &PValueOptions,
) -> Result<SignificanceResult> {
    if opts.replicas == 0 {
        return Err(Error::Config("need at least one replica".to_string()));
    }
    let observed = weighted_icc(layer, attrs, variable, opts.convention)?;
    let values = attrs.resolve(variable, layer.nodes())?;
    let convention = opts.convention;

    let null_distribution: Vec<Option<f64>> = match opts.null_model {
        NullModel::LinkReshuffle => {
            let pairs = check_placeable(layer)?;
            opts.execution.map_indexed(opts.replicas, |b| {
                let mut rng = replica_rng(opts.seed, b);
                let edges = reshuffled_edges(layer, pairs, &mut rng);
                let triples = triples_from_edges(edges.iter(), &values);
                icc_from_triples(&triples, convention).map(|s| s.r)
            })
        }
        NullModel::AttributePermutation => {
            let carriers: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_some()).collect();
            opts.execution.map_indexed(opts.replicas, |b| {
                let mut rng = replica_rng(opts.seed, b);
                let mut pool: Vec<f64> = carriers.iter().map(|&i| values[i].unwrap()).collect();
                pool.shuffle(&mut rng);
                let mut permuted = vec![None; values.len()];
                for (&i, v) in carriers.iter().zip(pool) {
                    permuted[i] = Some(v);
                }
                let triples = triples_from_edges(layer.edges().iter(), &permuted);
                icc_from_triples(&triples, convention).map(|s| s.r)
            })
        }
    };

    let defined: Vec<f64> = null_distribution.iter().flatten().copied().collect();
    if defined.is_empty() {
        return Err(Error::TooFewReplicas {
            requested: opts.replicas,
            defined: 0,
            needed: 1,
        });
    }
    let discarded = opts.replicas - defined.len();
    if discarded > 0 {
        log::warn!(
            "{}/{variable}: {discarded} of {} null replicas had undefined ICC and were dropped",
            layer.layer(),
            opts.replicas
        );
    }
    Ok(SignificanceResult {
        layer: layer.layer(),
        variable: variable.to_string(),
        alpha: layer.alpha(),
        observed_r: observed.r,
        p_value: p_value_from_null(observed.r, &defined, opts.sidedness, opts.estimator),
        replicas: opts.replicas,
        discarded_replicas: discarded,
        null_mean: mean(&defined),
        null_std: sample_std(&defined),
        seed: opts.seed,
        null_model: opts.null_model,
        sidedness: opts.sidedness,
        estimator: opts.estimator,
        null_distribution,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// Sample standard deviation of r over defined replicas.
    pub std: f64,
    pub mean: f64,
    pub replicas: usize,
    pub discarded_replicas: usize,
    pub seed: u64,
}

/// Bootstrap standard deviation of the weighted ICC.
///
/// Each replica draws as many edges as the layer has eligible edges
/// (both endpoints valued), with replacement.
pub fn icc_std_envelope(
    layer: &WeightedLayer,
    attrs: &AttributeTable,
    variable: &str,
    replicas: usize,
    seed: u64,
    convention: Convention,
    exec: Execution,
) -> Result<Envelope> {
    // Surfaces the observed-layer errors (unknown variable, no pairs, constant).
    weighted_icc(layer, attrs, variable, convention)?;
    let values = attrs.resolve(variable, layer.nodes())?;
    let triples = triples_from_edges(layer.edges().iter(), &values);
    let m = triples.len();
    let rs: Vec<Option<f64>> = exec.map_indexed(replicas, |b| {
        let mut rng = replica_rng(seed, b);
        let sample: Vec<(f64, f64, f64)> =
            (0..m).map(|_| triples[rng.random_range(0..m)]).collect();
        icc_from_triples(&sample, convention).map(|s| s.r)
    });
    let defined: Vec<f64> = rs.into_iter().flatten().collect();
    if defined.len() < 2 {
        return Err(Error::TooFewReplicas {
            requested: replicas,
            defined: defined.len(),
            needed: 2,
        });
    }
    Ok(Envelope {
        std: sample_std(&defined),
        mean: mean(&defined),
        replicas,
        discarded_replicas: replicas - defined.len(),
        seed,
    })
}
