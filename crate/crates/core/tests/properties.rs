mod common;

use std::collections::BTreeSet;

use common::{close, random_instance};
use plexsim::{
    aggregate_counts, aggregate_proximity, alpha_weights, build_layer, filter_participants,
    layer_overlap, nullmodels::p_value_from_null, reshuffle_layer, weighted_icc,
    ActivityThresholds, AttributeTable, Convention, DirectedCountLayer, InteractionEvent, Layer,
    PValueEstimator, PairDomain, ProximityConfig, Sidedness, WeightedLayer,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn counts_strategy() -> impl Strategy<Value = DirectedCountLayer> {
    prop::collection::vec((0usize..8, 0usize..8, 1u32..60), 1..40).prop_map(|entries| {
        let mut c = DirectedCountLayer::new(Layer::Sms, (0..8).map(|i| format!("n{i}")).collect());
        for (i, j, v) in entries {
            if i != j {
                c.add(&format!("n{i}"), &format!("n{j}"), v as f64).unwrap();
            }
        }
        c
    })
}

fn events_strategy() -> impl Strategy<Value = Vec<InteractionEvent>> {
    prop::collection::vec(
        (0i64..20_000, 0usize..5, 0usize..5, 0usize..3, -90i32..-40),
        0..120,
    )
    .prop_map(|rows| {
        let mut out: Vec<InteractionEvent> = rows
            .into_iter()
            .filter(|r| r.1 != r.2)
            .map(|(t, s, d, l, rssi)| InteractionEvent {
                timestamp: t,
                source: format!("p{s}"),
                target: format!("p{d}"),
                layer: Layer::ALL[l],
                magnitude: if l == 2 { rssi as f64 } else { 1.0 },
            })
            .collect();
        out.sort_by_key(|e| e.timestamp);
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn weights_are_scale_invariant(c in counts_strategy(), alpha in 0.0f64..4.0, k in 0.01f64..100.0) {
        let a = build_layer(&c, alpha).unwrap();
        let b = build_layer(&c.scaled(k), alpha).unwrap();
        prop_assert_eq!(a.edges().len(), b.edges().len());
        for (x, y) in a.edges().iter().zip(b.edges()) {
            prop_assert!(close(x.weight, y.weight, 1e-12));
        }
    }

    #[test]
    fn symmetric_weights_lie_in_unit_interval(c in counts_strategy(), alpha in 0.0f64..4.0) {
        let l = build_layer(&c, alpha).unwrap();
        let w = alpha_weights(&c, alpha).unwrap();
        for e in l.edges() {
            prop_assert!(e.weight > 0.0 && e.weight <= 1.0);
            if e.weight == 1.0 {
                prop_assert_eq!(w.row(e.a as usize).len(), 1);
                prop_assert_eq!(w.row(e.b as usize).len(), 1);
            }
        }
    }

    #[test]
    fn raising_alpha_concentrates_weight(c in counts_strategy(), lo in 0.0f64..3.0, step in 0.01f64..2.0) {
        let a = alpha_weights(&c, lo).unwrap();
        let b = alpha_weights(&c, lo + step).unwrap();
        for i in 0..a.nodes().len() {
            let (ra, rb) = (a.row(i), b.row(i));
            if ra.is_empty() { continue; }
            let row_counts: Vec<f64> = c.entries().iter()
                .filter(|((s, _), _)| *s == a.nodes()[i])
                .map(|(_, v)| *v).collect();
            let max = row_counts.iter().copied().fold(0.0, f64::max);
            let min = row_counts.iter().copied().fold(f64::INFINITY, f64::min);
            for ((t, wa), (_, wb)) in ra.iter().zip(rb) {
                let n = c.get(&a.nodes()[i], &a.nodes()[*t as usize]).unwrap();
                // middle ranks may rise or fall; the extremes cannot
                if n == max {
                    prop_assert!(*wb >= *wa - 1e-12);
                }
                if n == min {
                    prop_assert!(*wb <= *wa + 1e-12);
                }
            }
        }
    }

    #[test]
    fn icc_invariants(seed in 0u64..10_000, scale in 0.01f64..100.0, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        prop_assume!(a.abs() > 1e-3);
        let inst = random_instance(seed);
        let Ok(base) = weighted_icc(&inst.layer, &inst.attrs, "x", Convention::Canonical) else {
            return Ok(());
        };
        prop_assert!(base.r >= -1.0 - 1e-12 && base.r <= 1.0 + 1e-12);
        let strict = weighted_icc(&inst.layer, &inst.attrs, "x", Convention::StrictLiteral).unwrap();
        prop_assert!(strict.r >= -0.5 - 1e-12 && strict.r <= 0.5 + 1e-12);

        let scaled = weighted_icc(&inst.layer.scaled(scale), &inst.attrs, "x", Convention::Canonical).unwrap();
        prop_assert!(close(scaled.r, base.r, 1e-9));
        prop_assert!(close(scaled.s_sq, base.s_sq, 1e-9));
        prop_assert!(close(scaled.x_bar, base.x_bar, 1e-9));
        prop_assert_eq!(scaled.pair_count, base.pair_count);

        let mut affine = AttributeTable::new();
        for (name, v) in inst.names.iter().zip(&inst.values) {
            if let Some(v) = v {
                affine.insert_numeric("x", name, a * v + b).unwrap();
            }
        }
        let moved = weighted_icc(&inst.layer, &affine, "x", Convention::Canonical).unwrap();
        prop_assert!((moved.r - base.r).abs() < 1e-9);
        prop_assert!(close(moved.x_bar, a * base.x_bar + b, 1e-9));
        prop_assert!(close(moved.s_sq, a * a * base.s_sq, 1e-9));
    }

    #[test]
    fn overlap_is_symmetric_and_scale_free(seed in 0u64..10_000, k in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, a) = common::random_layer(&mut rng, 8, 0.5, Layer::Call);
        let (_, b) = common::random_layer(&mut rng, 8, 0.5, Layer::Sms);
        for d in [PairDomain::Union, PairDomain::All] {
            let (Ok(ab), Ok(ba)) = (layer_overlap(&a, &b, d), layer_overlap(&b, &a, d)) else { continue };
            prop_assert_eq!(ab.r_p.to_bits(), ba.r_p.to_bits());
            let scaled = layer_overlap(&a.scaled(k), &b, d).unwrap();
            prop_assert!((scaled.r_p - ab.r_p).abs() < 1e-12);
            prop_assert!(ab.r_p.abs() <= 1.0);
            prop_assert_eq!(layer_overlap(&a, &a, d).unwrap().r_p, 1.0);
        }
    }

    #[test]
    fn aggregation_ignores_event_order(events in events_strategy(), seed in 0u64..1000) {
        let nodes: BTreeSet<String> = (0..4).map(|i| format!("p{i}")).collect();
        let mut shuffled = events.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        for layer in [Layer::Call, Layer::Sms] {
            let a = aggregate_counts(layer, &events, &nodes);
            prop_assert_eq!(&a, &aggregate_counts(layer, &shuffled, &nodes));
            let in_population = events.iter()
                .filter(|e| e.layer == layer && nodes.contains(&e.source) && nodes.contains(&e.target))
                .count();
            prop_assert_eq!(a.total(), in_population as f64);
        }
        // proximity needs per-device time order; a stable sort restores it
        shuffled.sort_by_key(|e| e.timestamp);
        let cfg = ProximityConfig::default();
        let p = aggregate_proximity(&events, &nodes, &cfg).unwrap();
        prop_assert_eq!(&p, &aggregate_proximity(&shuffled, &nodes, &cfg).unwrap());
    }

    #[test]
    fn proximity_time_is_bounded_by_scan_gaps(events in events_strategy()) {
        let nodes: BTreeSet<String> = (0..5).map(|i| format!("p{i}")).collect();
        let cfg = ProximityConfig::default();
        let p = aggregate_proximity(&events, &nodes, &cfg).unwrap();
        for ((s, t), secs) in p.entries() {
            prop_assert_eq!(secs % cfg.bin_seconds as f64, 0.0);
            let scans = events.iter()
                .filter(|e| e.layer == Layer::Proximity
                    && ((&e.source, &e.target) == (s, t) || (&e.source, &e.target) == (t, s)))
                .count();
            prop_assert!(*secs <= (scans.saturating_sub(1) * cfg.gap_cap_seconds as usize) as f64);
            prop_assert_eq!(p.get(t, s), Some(*secs));
        }
    }

    #[test]
    fn raising_thresholds_never_adds_nodes(
        events in events_strategy(),
        base in (0.0f64..0.2, 0u64..20, 0u64..20, 0.0f64..0.5),
        bump in (0.0f64..0.1, 0u64..5, 0u64..5, 0.0f64..0.3),
    ) {
        let lo = ActivityThresholds { min_span_days: base.0, min_calls: base.1, min_sms: base.2, min_proximity_hours: base.3 };
        let hi = ActivityThresholds {
            min_span_days: base.0 + bump.0,
            min_calls: base.1 + bump.1,
            min_sms: base.2 + bump.2,
            min_proximity_hours: base.3 + bump.3,
        };
        let cfg = ProximityConfig::default();
        let (a, acts) = filter_participants(&events, &lo, &cfg).unwrap();
        let (b, _) = filter_participants(&events, &hi, &cfg).unwrap();
        prop_assert!(b.is_subset(&a));
        prop_assert!(acts.iter().all(|x| x.span_days >= 0.0 && x.proximity_hours >= 0.0));
    }

    #[test]
    fn reshuffle_preserves_nodes_count_and_weights(seed in 0u64..10_000, rseed in any::<u64>()) {
        let inst = random_instance(seed);
        prop_assume!(!inst.layer.edges().is_empty());
        let r = reshuffle_layer(&inst.layer, rseed).unwrap();
        prop_assert_eq!(r.nodes(), inst.layer.nodes());
        prop_assert_eq!(r.edges().len(), inst.layer.edges().len());
        let sorted = |l: &WeightedLayer| {
            let mut w: Vec<u64> = l.edges().iter().map(|e| e.weight.to_bits()).collect();
            w.sort();
            w
        };
        prop_assert_eq!(sorted(&r), sorted(&inst.layer));
        for e in r.edges() {
            prop_assert!(e.a < e.b);
        }
    }

    #[test]
    fn greater_p_value_is_monotone_in_observed(
        null in prop::collection::vec(-1.0f64..1.0, 1..200),
        lo in -1.5f64..1.5,
        step in 0.0f64..1.0,
    ) {
        for est in [PValueEstimator::Literal, PValueEstimator::Smoothed] {
            let p_lo = p_value_from_null(lo, &null, Sidedness::Greater, est);
            let p_hi = p_value_from_null(lo + step, &null, Sidedness::Greater, est);
            prop_assert!(p_hi <= p_lo);
            prop_assert!((0.0..=1.0).contains(&p_lo));
        }
    }
}
