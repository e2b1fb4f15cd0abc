//! Shared workloads for the criterion benches.

use hhin_core::synthetic::{generate_synthetic, random_general_query, seeded_rng, SyntheticConfig};
use hhin_core::{DataGraph, QueryGraph, Schema};

pub struct Workload {
    pub graph: DataGraph,
    pub schema: Schema,
    pub queries: Vec<QueryGraph>,
}

/// A synthetic graph of `nodes` nodes with `count` random queries of the
/// given shape.
pub fn workload(nodes: usize, specifics: usize, query_nodes: usize, count: usize) -> Workload {
    let config = SyntheticConfig {
        nodes,
        ..SyntheticConfig::default()
    };
    let (graph, schema) = generate_synthetic(&config).expect("valid synthetic config");
    let mut rng = seeded_rng(config.seed);
    let mut queries = Vec::with_capacity(count);
    while queries.len() < count {
        if let Some(q) = random_general_query(&graph, specifics, query_nodes, &mut rng) {
            queries.push(q);
        }
    }
    Workload {
        graph,
        schema,
        queries,
    }
}
