#![allow(dead_code)]

pub mod oracle;
pub mod stats;

use plexsim::{AttributeTable, Layer, WeightedLayer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random small instance: dense symmetric weights, a matching layer, and an
/// attribute `x` with some values missing.
pub struct Instance {
    pub names: Vec<String>,
    pub dense: Vec<Vec<f64>>,
    pub layer: WeightedLayer,
    pub values: Vec<Option<f64>>,
    pub attrs: AttributeTable,
}

pub fn random_layer(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    layer: Layer,
) -> (Vec<Vec<f64>>, WeightedLayer) {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut dense = vec![vec![0.0; n]; n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..i {
            if rng.random_bool(density) {
                let w: f64 = rng.random_range(0.001..1.0);
                dense[i][j] = w;
                dense[j][i] = w;
                edges.push((names[i].clone(), names[j].clone(), w));
            }
        }
    }
    let refs: Vec<(&str, &str, f64)> = edges
        .iter()
        .map(|(a, b, w)| (a.as_str(), b.as_str(), *w))
        .collect();
    let l = WeightedLayer::from_named_edges(layer, 1.0, names.iter().cloned(), &refs).unwrap();
    (dense, l)
}

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=10);
    let density = rng.random_range(0.2..1.0);
    let (dense, layer) = random_layer(&mut rng, n, density, Layer::Call);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut attrs = AttributeTable::new();
    let mut values = Vec::with_capacity(n);
    for name in &names {
        let v = if rng.random_bool(0.9) {
            Some(rng.random_range(-3.0..3.0))
        } else {
            None
        };
        if let Some(v) = v {
            attrs.insert_numeric("x", name, v).unwrap();
        }
        values.push(v);
    }
    // make sure the variable exists even if every draw was missing
    if values.iter().all(Option::is_none) {
        attrs.insert_numeric("x", &names[0], 1.0).unwrap();
        values[0] = Some(1.0);
    }
    Instance {
        names,
        dense,
        layer,
        values,
        attrs,
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
