mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use refgraph_core::format::{parse_graph, to_dsl, to_json};
use refgraph_core::logic::{negate_dnf, simplify_dnf, to_dnf, Literal};
use refgraph_core::semantics::{escape_search, models_of, node_model_expression, partition_check, Polarity};
use refgraph_core::{contradiction_loop_check, enumerate_paths, find_contradictory_cells, Arrow, NodeId, RefGraph};

fn graph_strategy() -> impl Strategy<Value = RefGraph> {
    (any::<u64>(), 1usize..=8, 1usize..=10).prop_map(|(seed, sinks, inner)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        common::random_graph(&mut rng, sinks, inner)
    })
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        rng_seed: proptest::test_runner::RngSeed::Fixed(common::seed()),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn models_partition_the_universe(g in graph_strategy()) {
        for n in g.nodes() {
            prop_assert!(partition_check(&g, n).unwrap());
            let pos = models_of(&g, n, Polarity::Pos).unwrap();
            let neg = models_of(&g, n, Polarity::Neg).unwrap();
            prop_assert!(pos.is_disjoint(&neg));
            prop_assert_eq!(pos.len() + neg.len(), pos.universe_len());
        }
    }

    #[test]
    fn expression_agrees_with_enumeration(g in graph_strategy()) {
        for n in g.nodes() {
            let d = node_model_expression(&g, n).unwrap();
            let sinks = g.reachable_sinks(n);
            let models = common::oracle_models(&g, n, true);
            let table: Vec<bool> = common::assignments(&sinks).map(|a| models.contains(&a)).collect();
            prop_assert_eq!(common::truth_table(&d, &sinks), table);
        }
    }

    #[test]
    fn escape_is_a_model_of_the_negation(g in graph_strategy()) {
        for n in g.nodes() {
            let neg = models_of(&g, n, Polarity::Neg).unwrap();
            match escape_search(&g, n).unwrap() {
                Some(esc) => {
                    prop_assert!(!esc.valuation[n]);
                    prop_assert!(neg.contains(&esc.assignment));
                    prop_assert_eq!(esc.trace.first().map(|s| &s.node), Some(n));
                }
                None => prop_assert!(neg.is_empty()),
            }
        }
    }

    #[test]
    fn negation_complements(seed in any::<u64>(), vars in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_dnf(&mut rng, vars);
        let names: Vec<NodeId> = (1..=vars).map(|i| NodeId::from(format!("v{i}"))).collect();
        let neg = negate_dnf(&d).unwrap();
        let a = common::truth_table(&d, &names);
        let b = common::truth_table(&neg, &names);
        prop_assert!(a.iter().zip(&b).all(|(p, q)| p != q));
    }

    #[test]
    fn simplification_keeps_meaning(seed in any::<u64>(), vars in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = common::random_dnf(&mut rng, vars);
        let names: Vec<NodeId> = (1..=vars).map(|i| NodeId::from(format!("v{i}"))).collect();
        prop_assert_eq!(common::truth_table(&simplify_dnf(&d), &names), common::truth_table(&d, &names));
        prop_assert!(to_dnf(&d.to_formula()).unwrap().len() >= simplify_dnf(&d).len());
    }

    #[test]
    fn documents_round_trip(g in graph_strategy()) {
        let json = to_json(&g);
        let back = parse_graph(&json).unwrap().into_ref().unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(to_json(&back), json);
        let dsl = to_dsl(&g);
        prop_assert_eq!(parse_graph(&dsl).unwrap().into_ref().unwrap(), g);
    }

    /// With at most one successor per node paths are unique, so nothing
    /// contradicts.
    #[test]
    fn functional_graphs_have_no_cells(parents in proptest::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 1..12)) {
        let k = parents.len() + 1;
        let arrows: Vec<Arrow> = parents
            .iter()
            .enumerate()
            .map(|(i, (ix, neg))| {
                let from = NodeId::from(format!("v{}", i + 1));
                let to = NodeId::from(format!("v{}", ix.index(i + 1)));
                if *neg { Arrow::neg(from, to) } else { Arrow::pos(from, to) }
            })
            .collect();
        let g = RefGraph::from_signed_arrows(arrows).unwrap();
        for a in 0..k {
            for b in 0..k {
                let (from, to) = (NodeId::from(format!("v{a}")), NodeId::from(format!("v{b}")));
                if !g.contains(&from) || !g.contains(&to) || a == b {
                    continue;
                }
                let paths = enumerate_paths(&g, &from, &to, 32).unwrap();
                prop_assert!(paths.len() <= 1);
                prop_assert!(find_contradictory_cells(&g, &from, &to).unwrap().is_empty());
                prop_assert!(contradiction_loop_check(&paths).odd_cycle_witness.is_none());
            }
        }
    }
}

#[test]
fn four_component_negation() {
    let d = refgraph_core::Dnf::from_conjuncts([
        vec![Literal::neg("x1"), Literal::neg("x2")],
        vec![Literal::neg("x3"), Literal::neg("x4")],
    ]);
    assert_eq!(negate_dnf(&d).unwrap().to_string(), "(x1 ∧ x3) ∨ (x1 ∧ x4) ∨ (x2 ∧ x3) ∨ (x2 ∧ x4)");
}
