//! Synthetic multilayer count data with planted homophily and layer coupling.
//!
//! For every unordered pair a relationship strength is drawn per layer as a
//! mix of a shared latent (weight `layer_coupling`) and a layer-specific
//! latent, both Gamma distributed with mean 1. Directed counts are Poisson
//! given the strength, so each layer's counts are negative binomial. The rate
//! is multiplied by `1 + h` for pairs with matching binary attributes and by
//! `exp(-h |x_i - x_j| / sd)` for numeric attributes.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Gamma, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::ingest::DirectedCountLayer;
use crate::simmetrics::AttributeTable;
use crate::{Error, Layer, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub layer: Layer,
    /// Mean count per directed pair before homophily.
    pub base_rate: f64,
    /// Gamma shape of the layer-specific latent; large values approach Poisson.
    pub dispersion: f64,
    /// Multiplier applied to drawn counts (e.g. 300 s per proximity bin).
    #[serde(default = "one")]
    pub unit: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttributeDistribution {
    /// 0/1 with `P(1) = p`.
    Binary {
        p: f64,
    },
    Numeric {
        mean: f64,
        sd: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    #[serde(flatten)]
    pub distribution: AttributeDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomophilySpec {
    pub layer: Layer,
    pub attribute: String,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_nodes: usize,
    pub layers: Vec<LayerSpec>,
    pub attributes: Vec<AttributeSpec>,
    #[serde(default)]
    pub homophily: Vec<HomophilySpec>,
    /// Point every node's largest count at a node of the other group of the
    /// first binary attribute.
    #[serde(default)]
    pub cross_link_mode: bool,
    /// The forced cross link gets `factor * (row maximum) + 1` counts.
    #[serde(default = "default_cross_link_factor")]
    pub cross_link_factor: f64,
    /// Share of the pair strength common to all layers, in [0, 1].
    #[serde(default)]
    pub layer_coupling: f64,
    /// Gamma shape of the shared latent.
    #[serde(default = "default_shared_dispersion")]
    pub shared_dispersion: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_cross_link_factor() -> f64 {
    3.0
}

fn default_shared_dispersion() -> f64 {
    0.3
}

impl Default for SynthConfig {
    fn default() -> Self {
        let layers = vec![
            LayerSpec {
                layer: Layer::Call,
                base_rate: 0.2,
                dispersion: 0.3,
                unit: 1.0,
            },
            LayerSpec {
                layer: Layer::Sms,
                base_rate: 0.8,
                dispersion: 0.3,
                unit: 1.0,
            },
            LayerSpec {
                layer: Layer::Proximity,
                base_rate: 2.0,
                dispersion: 0.3,
                unit: 300.0,
            },
        ];
        let homophily = Layer::ALL
            .iter()
            .flat_map(|&layer| {
                [
                    HomophilySpec {
                        layer,
                        attribute: "sex".into(),
                        h: 0.5,
                    },
                    HomophilySpec {
                        layer,
                        attribute: "extraversion".into(),
                        h: 0.3,
                    },
                ]
            })
            .collect();
        Self {
            n_nodes: 100,
            layers,
            attributes: vec![
                AttributeSpec {
                    name: "sex".into(),
                    distribution: AttributeDistribution::Binary { p: 0.5 },
                },
                AttributeSpec {
                    name: "extraversion".into(),
                    distribution: AttributeDistribution::Numeric { mean: 0.0, sd: 1.0 },
                },
            ],
            homophily,
            cross_link_mode: false,
            cross_link_factor: default_cross_link_factor(),
            layer_coupling: 0.5,
            shared_dispersion: default_shared_dispersion(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_nodes < 2 {
            return bad(format!("n_nodes must be >= 2, got {}", self.n_nodes));
        }
        if self.layers.is_empty() {
            return bad("at least one layer is required".into());
        }
        let mut seen = BTreeSet::new();
        for l in &self.layers {
            if !seen.insert(l.layer) {
                return bad(format!("layer {} listed twice", l.layer));
            }
            if !(l.base_rate > 0.0 && l.base_rate.is_finite()) {
                return bad(format!("base rate of {} must be > 0", l.layer));
            }
            if !(l.dispersion > 0.0 && l.dispersion.is_finite()) {
                return bad(format!("dispersion of {} must be > 0", l.layer));
            }
            if !(l.unit > 0.0 && l.unit.is_finite()) {
                return bad(format!("unit of {} must be > 0", l.layer));
            }
        }
        let mut names = BTreeSet::new();
        for a in &self.attributes {
            if !names.insert(a.name.as_str()) {
                return bad(format!("attribute `{}` listed twice", a.name));
            }
            match a.distribution {
                AttributeDistribution::Binary { p } if !(0.0..=1.0).contains(&p) => {
                    return bad(format!("`{}`: p must lie in [0, 1]", a.name));
                }
                AttributeDistribution::Numeric { sd, .. } if !(sd > 0.0 && sd.is_finite()) => {
                    return bad(format!("`{}`: sd must be > 0", a.name));
                }
                _ => {}
            }
        }
        for h in &self.homophily {
            if !(h.h >= 0.0 && h.h.is_finite()) {
                return bad(format!("homophily for `{}` must be >= 0", h.attribute));
            }
            if !names.contains(h.attribute.as_str()) {
                return bad(format!(
                    "homophily references unknown attribute `{}`",
                    h.attribute
                ));
            }
            if !seen.contains(&h.layer) {
                return bad(format!("homophily references absent layer {}", h.layer));
            }
        }
        if !(0.0..=1.0).contains(&self.layer_coupling) {
            return bad("layer_coupling must lie in [0, 1]".into());
        }
        if !(self.shared_dispersion > 0.0 && self.shared_dispersion.is_finite()) {
            return bad("shared_dispersion must be > 0".into());
        }
        if self.cross_link_mode {
            if self.binary_attribute().is_none() {
                return bad("cross_link_mode needs a binary attribute".into());
            }
            if !(self.cross_link_factor >= 1.0 && self.cross_link_factor.is_finite()) {
                return bad("cross_link_factor must be >= 1".into());
            }
        }
        Ok(())
    }

    fn binary_attribute(&self) -> Option<usize> {
        self.attributes
            .iter()
            .position(|a| matches!(a.distribution, AttributeDistribution::Binary { .. }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    /// One layer per configured layer, in configuration order.
    pub counts: Vec<DirectedCountLayer>,
    pub attributes: AttributeTable,
}

impl SynthData {
    pub fn layer(&self, layer: Layer) -> Option<&DirectedCountLayer> {
        self.counts.iter().find(|c| c.layer() == layer)
    }
}

fn node_names(n: usize) -> Vec<String> {
    let width = (n - 1).to_string().len();
    (0..n).map(|i| format!("n{i:0width$}")).collect()
}

fn gamma_mean_one(shape: f64) -> Gamma<f64> {
    Gamma::new(shape, 1.0 / shape).expect("validated shape")
}

fn poisson<R: Rng>(rate: f64, rng: &mut R) -> f64 {
    if rate > 0.0 && rate.is_finite() {
        Poisson::new(rate).expect("positive rate").sample(rng)
    } else {
        0.0
    }
}

/// Draws one dataset. Same config, same output, bit for bit.
pub fn generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_nodes;
    let names = node_names(n);

    // attribute values, attribute-major
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(config.attributes.len());
    for a in &config.attributes {
        let column = match a.distribution {
            AttributeDistribution::Binary { p } => {
                let d = Bernoulli::new(p).expect("validated p");
                (0..n)
                    .map(|_| f64::from(u8::from(d.sample(&mut rng))))
                    .collect()
            }
            AttributeDistribution::Numeric { mean, sd } => {
                let d = Normal::new(mean, sd).expect("validated sd");
                (0..n).map(|_| d.sample(&mut rng)).collect()
            }
        };
        values.push(column);
    }

    // per layer: (attribute index, h, numeric sd)
    let planted: Vec<Vec<(usize, f64, Option<f64>)>> = config
        .layers
        .iter()
        .map(|l| {
            config
                .homophily
                .iter()
                .filter(|h| h.layer == l.layer && h.h > 0.0)
                .map(|h| {
                    let idx = config
                        .attributes
                        .iter()
                        .position(|a| a.name == h.attribute)
                        .expect("validated attribute");
                    let sd = match config.attributes[idx].distribution {
                        AttributeDistribution::Numeric { sd, .. } => Some(sd),
                        AttributeDistribution::Binary { .. } => None,
                    };
                    (idx, h.h, sd)
                })
                .collect()
        })
        .collect();

    let shared = gamma_mean_one(config.shared_dispersion);
    let own: Vec<Gamma<f64>> = config
        .layers
        .iter()
        .map(|l| gamma_mean_one(l.dispersion))
        .collect();
    let rho = config.layer_coupling;
    let mut raw: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; n]; n]; config.layers.len()];
    for i in 0..n {
        for j in i + 1..n {
            let s = shared.sample(&mut rng);
            for (l, spec) in config.layers.iter().enumerate() {
                let e = own[l].sample(&mut rng);
                let mut rate = spec.base_rate * (rho * s + (1.0 - rho) * e);
                for &(a, h, sd) in &planted[l] {
                    let (xi, xj) = (values[a][i], values[a][j]);
                    rate *= match sd {
                        None if xi == xj => 1.0 + h,
                        None => 1.0,
                        Some(sd) => (-h * (xi - xj).abs() / sd).exp(),
                    };
                }
                raw[l][i][j] = poisson(rate, &mut rng);
                raw[l][j][i] = poisson(rate, &mut rng);
            }
        }
    }

    if config.cross_link_mode {
        let group = &values[config.binary_attribute().expect("validated")];
        for counts in raw.iter_mut() {
            for i in 0..n {
                let others: Vec<usize> = (0..n).filter(|&j| group[j] != group[i]).collect();
                let Some(&target) = others.choose(&mut rng) else {
                    continue;
                };
                let max = counts[i].iter().copied().fold(0.0, f64::max);
                let forced = (config.cross_link_factor * max).ceil() + 1.0;
                counts[i][target] = counts[i][target].max(forced);
            }
        }
    }

    let node_set: BTreeSet<String> = names.iter().cloned().collect();
    let mut out = Vec::with_capacity(config.layers.len());
    for (spec, counts) in config.layers.iter().zip(&raw) {
        let mut layer = DirectedCountLayer::new(spec.layer, node_set.clone());
        for i in 0..n {
            for j in 0..n {
                if counts[i][j] > 0.0 {
                    layer.add(&names[i], &names[j], counts[i][j] * spec.unit)?;
                }
            }
        }
        out.push(layer);
    }

    let mut attributes = AttributeTable::new();
    for (a, column) in config.attributes.iter().zip(&values) {
        for (name, &v) in names.iter().zip(column) {
            attributes.insert_numeric(&a.name, name, v)?;
        }
    }
    Ok(SynthData {
        counts: out,
        attributes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_seed_is_reproducible() {
        let c = SynthConfig {
            n_nodes: 30,
            ..Default::default()
        };
        assert_eq!(generate(&c).unwrap(), generate(&c).unwrap());
        let d = SynthConfig {
            seed: 1,
            ..c.clone()
        };
        assert_ne!(generate(&c).unwrap(), generate(&d).unwrap());
    }

    #[test]
    fn layers_share_the_full_node_set() {
        let data = generate(&SynthConfig {
            n_nodes: 12,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(data.counts.len(), 3);
        for c in &data.counts {
            assert_eq!(c.node_set().len(), 12);
            assert!(c.node_set().contains("n00") && c.node_set().contains("n11"));
        }
        assert_eq!(data.attributes.nodes("sex").len(), 12);
    }

    #[test]
    fn proximity_counts_are_in_bin_units() {
        let data = generate(&SynthConfig {
            n_nodes: 20,
            ..Default::default()
        })
        .unwrap();
        let prox = data.layer(Layer::Proximity).unwrap();
        assert!(!prox.is_empty());
        assert!(prox.entries().values().all(|v| v % 300.0 == 0.0));
    }

    #[test]
    fn cross_links_are_the_row_maximum() {
        let c = SynthConfig {
            n_nodes: 40,
            cross_link_mode: true,
            ..Default::default()
        };
        let data = generate(&c).unwrap();
        for layer in &data.counts {
            for node in layer.node_set() {
                let row: Vec<(&String, f64)> = layer
                    .entries()
                    .iter()
                    .filter(|((s, _), _)| s == node)
                    .map(|((_, t), v)| (t, *v))
                    .collect();
                let max = row.iter().map(|r| r.1).fold(0.0, f64::max);
                let top: Vec<_> = row.iter().filter(|r| r.1 == max).collect();
                assert_eq!(top.len(), 1, "unique maximum for {node}");
                let sex = |n: &str| data.attributes.get("sex", n).unwrap();
                assert_ne!(sex(node), sex(top[0].0));
            }
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = SynthConfig::default();
        assert!(generate(&SynthConfig {
            n_nodes: 1,
            ..base.clone()
        })
        .is_err());
        let mut c = base.clone();
        c.layers[0].base_rate = 0.0;
        assert!(generate(&c).is_err());
        let mut c = base.clone();
        c.homophily[0].h = -1.0;
        assert!(generate(&c).is_err());
        let mut c = base.clone();
        c.layer_coupling = 1.5;
        assert!(generate(&c).is_err());
        let mut c = base;
        c.attributes.retain(|a| a.name != "sex");
        c.homophily.retain(|h| h.attribute != "sex");
        c.cross_link_mode = true;
        assert!(generate(&c).is_err());
    }
}
