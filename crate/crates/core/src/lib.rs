//! Top-k star and general graph queries over heterogeneous information
//! networks whose entities inherit properties along hierarchies.

pub mod bench;
pub mod general;
pub mod io;
pub mod model;
pub mod oracle;
pub mod scoring;
pub mod search;
pub mod star;
pub mod synthetic;

pub use model::{
    classify_query, resolve_anchors, validate_graph, DataGraph, EdgeKind, Match, Node, NodeId,
    QueryClass, QueryError, QueryGraph, QueryNode, Schema, SpecificNode, ValidationReport,
};
pub use general::{gqh, GeneralOptions, GeneralResult, Ks};
pub use scoring::ScoringParams;
pub use star::{sqh, StarResult, StarStats};
