//! Data graph, schema and query graph.

mod graph;
mod query;
mod schema;
mod validate;

pub use graph::{Adjacent, DataGraph, EdgeKind, Node, NodeId, TypeIdx};
pub use query::{
    classify_query, resolve_anchors, Arity, Inheritance, QueryClass, QueryError, QueryGraph,
    QueryNode, SpecificNode,
};
pub use schema::Schema;
pub use validate::{validate_graph, ValidationReport, Violation};

/// An injective assignment of query nodes to data nodes, with its score.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Match {
    /// `(query node id, data node id)` in query-node order.
    pub assignment: Vec<(String, NodeId)>,
    pub score: f64,
}
