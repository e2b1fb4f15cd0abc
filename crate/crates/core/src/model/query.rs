use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::{DataGraph, NodeId};
use super::schema::Schema;

/// A fully instantiated query node: matched to exactly one data node by
/// type and label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecificNode {
    pub id: String,
    #[serde(rename = "type")]
    pub node_type: String,
    pub label: String,
}

/// A query node given only by its type; its matches are what a query asks for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryNode {
    pub id: String,
    #[serde(rename = "type")]
    pub node_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryGraph {
    pub specific_nodes: Vec<SpecificNode>,
    pub query_nodes: Vec<QueryNode>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("duplicate query id {0:?}")]
    DuplicateId(String),
    #[error("edge references unknown query id {0:?}")]
    UnknownEndpoint(String),
    #[error("self-loop on query id {0:?}")]
    SelfLoop(String),
    #[error("query graph has no query node")]
    NoQueryNode,
    #[error("query graph has no specific node")]
    NoSpecificNode,
    #[error("query graph must be connected")]
    Disconnected,
    #[error("anchor not found ({0})")]
    AnchorNotFound(String),
    #[error("ambiguous anchor ({id}, candidate ids {})", join_ids(.candidates))]
    AmbiguousAnchor { id: String, candidates: Vec<NodeId> },
}

fn join_ids(ids: &[NodeId]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arity {
    Star,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inheritance {
    Hierarchical,
    Mixed,
    NonHierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryClass {
    pub arity: Arity,
    pub inheritance: Inheritance,
}

impl QueryGraph {
    /// A star query: one query node adjacent to every given specific node.
    pub fn star(center: QueryNode, anchors: Vec<SpecificNode>) -> Self {
        let edges = anchors
            .iter()
            .map(|s| (s.id.clone(), center.id.clone()))
            .collect();
        QueryGraph {
            specific_nodes: anchors,
            query_nodes: vec![center],
            edges,
        }
    }

    pub fn specific(&self, id: &str) -> Option<&SpecificNode> {
        self.specific_nodes.iter().find(|s| s.id == id)
    }

    pub fn query_node(&self, id: &str) -> Option<&QueryNode> {
        self.query_nodes.iter().find(|q| q.id == id)
    }

    /// Ids adjacent to `id`, in edge order, without repeats.
    pub fn neighbors(&self, id: &str) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for (a, b) in &self.edges {
            let other = if a == id {
                b.as_str()
            } else if b == id {
                a.as_str()
            } else {
                continue;
            };
            if !out.contains(&other) {
                out.push(other);
            }
        }
        out
    }

    /// Checks the structural invariants: unique ids, known edge endpoints,
    /// both node kinds present, connected.
    pub fn check(&self) -> Result<(), QueryError> {
        let mut ids = HashSet::new();
        let all_ids = self
            .specific_nodes
            .iter()
            .map(|s| &s.id)
            .chain(self.query_nodes.iter().map(|q| &q.id));
        for id in all_ids {
            if !ids.insert(id.as_str()) {
                return Err(QueryError::DuplicateId(id.clone()));
            }
        }
        for (a, b) in &self.edges {
            for end in [a, b] {
                if !ids.contains(end.as_str()) {
                    return Err(QueryError::UnknownEndpoint(end.clone()));
                }
            }
            if a == b {
                return Err(QueryError::SelfLoop(a.clone()));
            }
        }
        if self.query_nodes.is_empty() {
            return Err(QueryError::NoQueryNode);
        }
        if self.specific_nodes.is_empty() {
            return Err(QueryError::NoSpecificNode);
        }

        let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
        for (a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let start = self.query_nodes[0].id.as_str();
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            for &m in adj.get(n).into_iter().flatten() {
                if seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        if seen.len() != ids.len() {
            return Err(QueryError::Disconnected);
        }
        Ok(())
    }
}

pub fn classify_query(q: &QueryGraph, schema: &Schema) -> Result<QueryClass, QueryError> {
    q.check()?;
    let arity = if q.query_nodes.len() == 1 {
        Arity::Star
    } else {
        Arity::General
    };
    let paired = q
        .specific_nodes
        .iter()
        .filter(|s| {
            q.neighbors(&s.id).into_iter().any(|n| {
                q.query_node(n)
                    .is_some_and(|qn| schema.forms_pair(&s.node_type, &qn.node_type))
            })
        })
        .count();
    let inheritance = if paired == q.specific_nodes.len() {
        Inheritance::Hierarchical
    } else if paired > 0 {
        Inheritance::Mixed
    } else {
        Inheritance::NonHierarchical
    };
    Ok(QueryClass { arity, inheritance })
}

/// Maps every specific node to the unique data node with the same type and
/// label (exact, case-sensitive).
pub fn resolve_anchors(
    q: &QueryGraph,
    graph: &DataGraph,
) -> Result<BTreeMap<String, NodeId>, QueryError> {
    let mut out = BTreeMap::new();
    for s in &q.specific_nodes {
        let found = graph.find(&s.node_type, &s.label);
        match found.as_slice() {
            [] => return Err(QueryError::AnchorNotFound(s.id.clone())),
            [idx] => {
                out.insert(s.id.clone(), graph.id_of(*idx));
            }
            many => {
                let mut candidates: Vec<NodeId> = many.iter().map(|&i| graph.id_of(i)).collect();
                candidates.sort();
                return Err(QueryError::AmbiguousAnchor {
                    id: s.id.clone(),
                    candidates,
                });
            }
        }
    }
    Ok(out)
}
