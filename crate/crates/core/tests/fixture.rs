use std::path::PathBuf;

use hhin_core::io::{load_bundle, load_query, GraphBundle};
use hhin_core::oracle::oracle_star_topk;
use hhin_core::{sqh, NodeId, QueryGraph, ScoringParams};

fn fig1() -> (GraphBundle, QueryGraph) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/fig1");
    let bundle = load_bundle(&dir.join("nodes.tsv"), &dir.join("edges.tsv"), &dir.join("schema.json")).unwrap();
    let query = load_query(&dir.join("query.json")).unwrap();
    (bundle, query)
}

fn labels(b: &GraphBundle, ranked: &[(NodeId, f64)]) -> Vec<String> {
    ranked
        .iter()
        .map(|(id, _)| b.graph.node(b.graph.index_of(*id).unwrap()).label.clone())
        .collect()
}

#[test]
fn plain_distances_without_discount() {
    let (b, q) = fig1();
    let p = ScoringParams::new(0.5, 0.0).unwrap();
    let res = sqh(&b.graph, &b.schema, &q, 5, &p, true).unwrap();
    assert_eq!(labels(&b, &res.ranked), ["P1", "P2", "P3", "P4", "P5"]);
    // V1 and T1 distances: P1 1+6, P2 5+2, P3 2+5, P4 2+6, P5 3+4.
    let expect = [
        0.5f64.powi(1) + 0.5f64.powi(6),
        0.5f64.powi(5) + 0.5f64.powi(2),
        0.5f64.powi(2) + 0.5f64.powi(5),
        0.5f64.powi(2) + 0.5f64.powi(6),
        0.5f64.powi(3) + 0.5f64.powi(4),
    ];
    for ((_, got), want) in res.ranked.iter().zip(expect) {
        assert!((got - want).abs() < 1e-12, "{got} {want}");
    }
}

#[test]
fn discount_lifts_descendants_of_the_vulnerable_product() {
    let (b, q) = fig1();
    let p = ScoringParams::new(0.5, 0.2).unwrap();
    let res = sqh(&b.graph, &b.schema, &q, 5, &p, true).unwrap();
    assert_eq!(labels(&b, &res.ranked), ["P1", "P3", "P4", "P2", "P5"]);
    let oracle = oracle_star_topk(&b.graph, &b.schema, &q, 5, &p).unwrap().top;
    assert_eq!(res.ranked.len(), oracle.len());
    for (a, o) in res.ranked.iter().zip(&oracle) {
        assert_eq!(a.0, o.0);
        assert!((a.1 - o.1).abs() < 1e-12);
    }
    // V1 reaches P3 over one discounted edge.
    let p3 = res.ranked.iter().find(|r| r.0 == NodeId(3)).unwrap().1;
    assert!((p3 - (0.5f64.powf(1.8) + 0.5f64.powi(5))).abs() < 1e-12);
}

#[test]
fn top_one_is_the_vulnerable_product() {
    let (b, q) = fig1();
    let res = sqh(&b.graph, &b.schema, &q, 1, &ScoringParams::default(), true).unwrap();
    assert_eq!(labels(&b, &res.ranked), ["P1"]);
}
