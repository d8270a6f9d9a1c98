//! Order, cone and cut properties of random circuits.

use std::collections::BTreeSet;

use optcausal_core::circuit::{
    future_cone, past_cone, precedes, recompose, split_prep_obs, topological_order, validate, CausalOrder, Endpoint,
    WireId,
};
use optcausal_testkit::{adjacency, brute_cones, path_exists, random_dag, random_shape};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cones_match_path_enumeration(seed in any::<u64>()) {
        let c = random_dag(&mut ChaCha8Rng::seed_from_u64(seed), 10);
        let order = CausalOrder::new(&c);
        let adj = adjacency(&c);
        for a in c.nodes() {
            let (past, future) = brute_cones(&c, a.id.as_str());
            let got_past: BTreeSet<String> = past_cone(&c, a.id.as_str()).unwrap().iter().map(|n| n.to_string()).collect();
            let got_future: BTreeSet<String> = future_cone(&c, a.id.as_str()).unwrap().iter().map(|n| n.to_string()).collect();
            prop_assert_eq!(&got_past, &past);
            prop_assert_eq!(&got_future, &future);
            for b in c.nodes() {
                let expected = path_exists(&adj, a.id.as_str(), b.id.as_str());
                prop_assert_eq!(precedes(&c, a.id.as_str(), b.id.as_str()).unwrap(), expected);
                prop_assert_eq!(order.precedes(a.id.as_str(), b.id.as_str()).unwrap(), expected);
            }
        }
    }

    #[test]
    fn precedence_is_a_strict_partial_order(seed in any::<u64>()) {
        let c = random_dag(&mut ChaCha8Rng::seed_from_u64(seed), 10);
        let order = CausalOrder::new(&c);
        let ids: Vec<&str> = c.nodes().map(|n| n.id.as_str()).collect();
        for &a in &ids {
            prop_assert!(!order.precedes(a, a).unwrap());
            for &b in &ids {
                if order.precedes(a, b).unwrap() {
                    prop_assert!(!order.precedes(b, a).unwrap());
                    for &x in &ids {
                        if order.precedes(b, x).unwrap() {
                            prop_assert!(order.precedes(a, x).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn topological_order_respects_every_wire(seed in any::<u64>()) {
        let c = random_dag(&mut ChaCha8Rng::seed_from_u64(seed), 10);
        let order = topological_order(&c).unwrap();
        prop_assert_eq!(order.len(), c.node_count());
        let pos = |id: &str| order.iter().position(|n| n.as_str() == id).unwrap();
        for w in c.wires() {
            if let (Endpoint::Port(s), Endpoint::Port(t)) = (&w.source, &w.target) {
                prop_assert!(pos(s.node.as_str()) < pos(t.node.as_str()));
            }
        }
    }

    #[test]
    fn split_then_recompose_is_identity(seed in any::<u64>(), at in 0usize..6) {
        let shape = random_shape(&mut ChaCha8Rng::seed_from_u64(seed), &[("Q2", 2), ("Q3", 3)]);
        let c = shape.build();
        let k = at % shape.nodes.len();
        let index = |id: &str| shape.nodes.iter().position(|n| n.0 == id).unwrap();
        let cut: BTreeSet<WireId> = c
            .wires()
            .iter()
            .filter(|w| {
                let s = index(w.source.port().unwrap().node.as_str());
                let t = index(w.target.port().unwrap().node.as_str());
                s <= k && t > k
            })
            .map(|w| w.id)
            .collect();
        let parts = split_prep_obs(&c, &cut).unwrap();
        prop_assert!(validate(&parts.preparation).is_valid());
        prop_assert!(validate(&parts.observation).is_valid());
        prop_assert_eq!(parts.preparation.output_boundary().count(), cut.len());
        prop_assert_eq!(parts.observation.input_boundary().count(), cut.len());
        prop_assert_eq!(recompose(&parts.preparation, &parts.observation).unwrap(), c);
    }
}
