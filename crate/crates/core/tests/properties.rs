use std::collections::HashSet;

use hhin_core::io::{edges_tsv, format_float, nodes_tsv, parse_edges, parse_nodes, parse_schema, schema_json};
use hhin_core::scoring::{closeness, star_score, PathStats};
use hhin_core::synthetic::{generate_synthetic, random_star_query, seeded_rng, SyntheticConfig};
use hhin_core::{sqh, validate_graph, DataGraph, NodeId, ScoringParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ScoringParams> {
    (0.05f64..0.95, 0.0f64..0.95).prop_map(|(a, b)| ScoringParams::new(a, b).unwrap())
}

fn path() -> impl Strategy<Value = PathStats> {
    (0u32..40).prop_flat_map(|l| (Just(l), -(l as i32)..=l as i32)).prop_map(|(l, h)| PathStats { l, h })
}

fn small_graph() -> impl Strategy<Value = SyntheticConfig> {
    (30usize..250, 1u32..8, 0u32..4, any::<u64>()).prop_map(|(nodes, deg, depth, seed)| SyntheticConfig {
        nodes,
        avg_degree: deg as f64,
        depth,
        seed,
        ..SyntheticConfig::default()
    })
}

proptest! {
    #[test]
    fn closeness_in_unit_interval(p in params(), s in path(), pair: bool) {
        let r = closeness(s, &p, pair);
        prop_assert!(r > 0.0 && r <= 1.0);
    }

    #[test]
    fn closeness_grows_with_hierarchy_hops(p in params(), s in path()) {
        prop_assume!(s.h.unsigned_abs() < s.l);
        let more = PathStats { l: s.l, h: if s.h >= 0 { s.h + 1 } else { s.h - 1 } };
        prop_assert!(closeness(more, &p, true) >= closeness(s, &p, true));
        prop_assert_eq!(closeness(more, &p, false), closeness(s, &p, false));
    }

    #[test]
    fn zero_beta_ignores_hierarchy(a in 0.05f64..0.95, s in path(), pair: bool) {
        let p = ScoringParams::new(a, 0.0).unwrap();
        let r = closeness(s, &p, pair);
        let plain = if s.l == 0 { 1.0 } else { a.powf(s.l as f64) };
        prop_assert!((r - plain).abs() < 1e-15);
    }

    #[test]
    fn star_score_ignores_anchor_order(mut rs in prop::collection::vec(0.0f64..1.0, 1..8), seed: u64) {
        let before = star_score(&rs).unwrap();
        let n = rs.len();
        rs.rotate_left((seed as usize) % n);
        rs.reverse();
        prop_assert!((star_score(&rs).unwrap() - before).abs() < 1e-12);
    }

    #[test]
    fn float_text_round_trips(x in -1e6f64..1e6) {
        let back: f64 = format_float(x).parse().unwrap();
        prop_assert!((back - x).abs() <= x.abs() * 1e-11 + 1e-300);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_graphs_validate(config in small_graph()) {
        let (g, schema) = generate_synthetic(&config).unwrap();
        let report = validate_graph(&g, &schema);
        prop_assert!(report.is_valid(), "{}", report);
        prop_assert_eq!(g.node_count(), config.nodes);
    }

    #[test]
    fn bundle_text_round_trips(config in small_graph()) {
        let (g, schema) = generate_synthetic(&config).unwrap();
        let schema2 = parse_schema(&schema_json(&schema), "schema").unwrap();
        prop_assert_eq!(&schema2, &schema);
        let nodes = parse_nodes(&nodes_tsv(&g), "nodes", &schema2).unwrap();
        let known: HashSet<NodeId> = nodes.iter().map(|n| n.id).collect();
        let (normal, hier) = parse_edges(&edges_tsv(&g), "edges", &known).unwrap();
        prop_assert_eq!(DataGraph::new(nodes, normal, hier), g);
    }

    #[test]
    fn pruning_and_reruns_agree(config in small_graph(), p in params(), k in 1usize..12, anchors in 1usize..4) {
        let (g, schema) = generate_synthetic(&config).unwrap();
        let mut rng = seeded_rng(config.seed);
        let q = random_star_query(&g, anchors, &mut rng);
        prop_assume!(q.is_some());
        let q = q.unwrap();
        let on = sqh(&g, &schema, &q, k, &p, true).unwrap();
        let again = sqh(&g, &schema, &q, k, &p, true).unwrap();
        let off = sqh(&g, &schema, &q, k, &p, false).unwrap();
        prop_assert_eq!(&on, &again);
        prop_assert_eq!(on.ranked.len(), off.ranked.len());
        for (a, b) in on.ranked.iter().zip(&off.ranked) {
            prop_assert_eq!(a.0, b.0);
            prop_assert!((a.1 - b.1).abs() < 1e-12);
        }
        prop_assert!(on.stats.visited_nodes <= off.stats.visited_nodes);
    }
}
