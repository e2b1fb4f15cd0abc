use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// External identifier of a data-graph node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Dense index of an interned node type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeIdx(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    #[serde(rename = "type")]
    pub node_type: String,
    pub label: String,
}

impl Node {
    pub fn new(id: u64, node_type: impl Into<String>, label: impl Into<String>) -> Self {
        Node {
            id: NodeId(id),
            node_type: node_type.into(),
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Normal,
    Hierarchy,
}

/// One entry of a node's adjacency list. Hierarchy edges appear on both
/// endpoints; traversal cost does not depend on direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adjacent {
    pub node: u32,
    pub kind: EdgeKind,
}

/// The data graph: typed, labeled nodes, undirected normal edges and directed
/// (parent to child) hierarchy edges, all of weight one.
///
/// Construction never fails. Inputs that break the graph invariants (unknown
/// endpoints, duplicates, cross-type hierarchy edges, ...) are kept in the raw
/// edge lists so [`validate_graph`](crate::validate_graph) can report them;
/// the adjacency index skips edges whose endpoints do not exist and self-loops.
#[derive(Debug, Clone)]
pub struct DataGraph {
    nodes: Vec<Node>,
    normal_edges: Vec<(NodeId, NodeId)>,
    hierarchy_edges: Vec<(NodeId, NodeId)>,
    index: HashMap<NodeId, usize>,
    type_names: Vec<String>,
    node_types: Vec<TypeIdx>,
    offsets: Vec<usize>,
    adjacency: Vec<Adjacent>,
    by_label: HashMap<String, Vec<usize>>,
}

impl DataGraph {
    pub fn new(
        nodes: Vec<Node>,
        normal_edges: Vec<(NodeId, NodeId)>,
        hierarchy_edges: Vec<(NodeId, NodeId)>,
    ) -> Self {
        let mut index = HashMap::with_capacity(nodes.len());
        let mut type_lookup: HashMap<&str, TypeIdx> = HashMap::new();
        let mut type_names = Vec::new();
        let mut node_types = Vec::with_capacity(nodes.len());
        let mut by_label: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            index.entry(node.id).or_insert(i);
            let ty = *type_lookup.entry(node.node_type.as_str()).or_insert_with(|| {
                type_names.push(node.node_type.clone());
                TypeIdx(type_names.len() as u32 - 1)
            });
            node_types.push(ty);
            by_label.entry(node.label.clone()).or_default().push(i);
        }

        let resolved = |edges: &[(NodeId, NodeId)], kind: EdgeKind| {
            edges
                .iter()
                .filter_map(|(a, b)| Some((*index.get(a)?, *index.get(b)?, kind)))
                .filter(|(a, b, _)| a != b)
                .collect::<Vec<_>>()
        };
        let mut all = resolved(&normal_edges, EdgeKind::Normal);
        all.extend(resolved(&hierarchy_edges, EdgeKind::Hierarchy));

        let mut degree = vec![0usize; nodes.len() + 1];
        for &(a, b, _) in &all {
            degree[a + 1] += 1;
            degree[b + 1] += 1;
        }
        for i in 1..degree.len() {
            degree[i] += degree[i - 1];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut adjacency = vec![
            Adjacent {
                node: 0,
                kind: EdgeKind::Normal
            };
            all.len() * 2
        ];
        for &(a, b, kind) in &all {
            adjacency[fill[a]] = Adjacent { node: b as u32, kind };
            fill[a] += 1;
            adjacency[fill[b]] = Adjacent { node: a as u32, kind };
            fill[b] += 1;
        }

        DataGraph {
            nodes,
            normal_edges,
            hierarchy_edges,
            index,
            type_names,
            node_types,
            offsets,
            adjacency,
            by_label,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of edges of both kinds, as given (including any invalid ones).
    pub fn edge_count(&self) -> usize {
        self.normal_edges.len() + self.hierarchy_edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    pub fn normal_edges(&self) -> &[(NodeId, NodeId)] {
        &self.normal_edges
    }

    pub fn hierarchy_edges(&self) -> &[(NodeId, NodeId)] {
        &self.hierarchy_edges
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn id_of(&self, idx: usize) -> NodeId {
        self.nodes[idx].id
    }

    pub fn type_of(&self, idx: usize) -> TypeIdx {
        self.node_types[idx]
    }

    pub fn type_index(&self, name: &str) -> Option<TypeIdx> {
        self.type_names
            .iter()
            .position(|t| t == name)
            .map(|i| TypeIdx(i as u32))
    }

    pub fn type_name(&self, ty: TypeIdx) -> &str {
        &self.type_names[ty.0 as usize]
    }

    pub fn type_count(&self) -> usize {
        self.type_names.len()
    }

    pub fn neighbors(&self, idx: usize) -> &[Adjacent] {
        &self.adjacency[self.offsets[idx]..self.offsets[idx + 1]]
    }

    /// Indices of nodes with exactly this type and label.
    pub fn find(&self, node_type: &str, label: &str) -> Vec<usize> {
        self.by_label
            .get(label)
            .map(|idxs| {
                idxs.iter()
                    .copied()
                    .filter(|&i| self.nodes[i].node_type == node_type)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Indices of all nodes of the given type, in node order.
    pub fn nodes_of_type(&self, ty: TypeIdx) -> impl Iterator<Item = usize> + '_ {
        self.node_types
            .iter()
            .enumerate()
            .filter(move |(_, t)| **t == ty)
            .map(|(i, _)| i)
    }

    /// The subgraph induced by the nodes for which `keep` holds.
    pub fn induced(&self, mut keep: impl FnMut(&Node) -> bool) -> DataGraph {
        let nodes: Vec<Node> = self.nodes.iter().filter(|n| keep(n)).cloned().collect();
        let kept: std::collections::HashSet<NodeId> = nodes.iter().map(|n| n.id).collect();
        let both = |(a, b): &&(NodeId, NodeId)| kept.contains(a) && kept.contains(b);
        DataGraph::new(
            nodes,
            self.normal_edges.iter().filter(both).copied().collect(),
            self.hierarchy_edges.iter().filter(both).copied().collect(),
        )
    }
}

impl PartialEq for DataGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.normal_edges == other.normal_edges
            && self.hierarchy_edges == other.hierarchy_edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> DataGraph {
        DataGraph::new(
            vec![
                Node::new(1, "Product", "P1"),
                Node::new(2, "Product", "P2"),
                Node::new(7, "Vulnerability", "V1"),
            ],
            vec![(NodeId(7), NodeId(1)), (NodeId(7), NodeId(99))],
            vec![(NodeId(1), NodeId(2))],
        )
    }

    #[test]
    fn adjacency_is_symmetric_and_skips_dangling() {
        let g = tiny();
        let v = g.index_of(NodeId(7)).unwrap();
        assert_eq!(g.neighbors(v).len(), 1);
        let p1 = g.index_of(NodeId(1)).unwrap();
        let kinds: Vec<_> = g.neighbors(p1).iter().map(|a| a.kind).collect();
        assert_eq!(kinds, [EdgeKind::Normal, EdgeKind::Hierarchy]);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn lookup_by_type_and_label() {
        let g = tiny();
        assert_eq!(g.find("Vulnerability", "V1"), vec![2]);
        assert!(g.find("Product", "V1").is_empty());
        let product = g.type_index("Product").unwrap();
        assert_eq!(g.nodes_of_type(product).collect::<Vec<_>>(), [0, 1]);
    }

    #[test]
    fn induced_keeps_only_internal_edges() {
        let g = tiny().induced(|n| n.id != NodeId(2));
        assert_eq!(g.node_count(), 2);
        assert!(g.hierarchy_edges().is_empty());
        assert_eq!(g.normal_edges(), &[(NodeId(7), NodeId(1))]);
    }
}
