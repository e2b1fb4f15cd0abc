use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::graph::{DataGraph, EdgeKind, NodeId};
use super::schema::Schema;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Schema(String),
    DuplicateNodeId(NodeId),
    UnknownNodeType { node: NodeId, node_type: String },
    DanglingEdge { kind: EdgeKind, from: NodeId, to: NodeId, missing: NodeId },
    SelfLoop { kind: EdgeKind, node: NodeId },
    DuplicateEdge { a: NodeId, b: NodeId },
    HierarchyAcrossTypes { parent: NodeId, child: NodeId },
    HierarchyTypeNotInherited { parent: NodeId, child: NodeId, node_type: String },
    HierarchyCycle { nodes: Vec<NodeId> },
}

fn kind_name(kind: &EdgeKind) -> &'static str {
    match kind {
        EdgeKind::Normal => "normal",
        EdgeKind::Hierarchy => "hierarchy",
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Schema(msg) => write!(f, "schema: {msg}"),
            Violation::DuplicateNodeId(id) => write!(f, "duplicate node id {id}"),
            Violation::UnknownNodeType { node, node_type } => {
                write!(f, "node {node} has unknown type {node_type:?}")
            }
            Violation::DanglingEdge { kind, from, to, missing } => write!(
                f,
                "{} edge {from}-{to} references missing node {missing}",
                kind_name(kind)
            ),
            Violation::SelfLoop { kind, node } => {
                write!(f, "{} self-loop on node {node}", kind_name(kind))
            }
            Violation::DuplicateEdge { a, b } => {
                write!(f, "more than one edge between nodes {a} and {b}")
            }
            Violation::HierarchyAcrossTypes { parent, child } => {
                write!(f, "hierarchy edge across types: {parent}->{child}")
            }
            Violation::HierarchyTypeNotInherited { parent, child, node_type } => write!(
                f,
                "hierarchy edge {parent}->{child} on non-inherited type {node_type:?}"
            ),
            Violation::HierarchyCycle { nodes } => {
                let ids: Vec<String> = nodes.iter().map(|n| n.to_string()).collect();
                write!(f, "hierarchy cycle among nodes [{}]", ids.join(", "))
            }
        }
    }
}

/// Violations found by [`validate_graph`]; empty means the graph is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "graph is valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every data-graph invariant against the schema and lists the
/// violations. Violations are data, never an error.
pub fn validate_graph(graph: &DataGraph, schema: &Schema) -> ValidationReport {
    let mut violations: Vec<Violation> =
        schema.problems().into_iter().map(Violation::Schema).collect();

    let mut seen = HashSet::new();
    for node in graph.nodes() {
        if !seen.insert(node.id) {
            violations.push(Violation::DuplicateNodeId(node.id));
        }
        if !schema.node_types.contains(&node.node_type) {
            violations.push(Violation::UnknownNodeType {
                node: node.id,
                node_type: node.node_type.clone(),
            });
        }
    }

    let mut pairs: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut check_edge = |kind: EdgeKind, from: NodeId, to: NodeId, out: &mut Vec<Violation>| {
        for end in [from, to] {
            if graph.index_of(end).is_none() {
                out.push(Violation::DanglingEdge { kind, from, to, missing: end });
                return false;
            }
        }
        if from == to {
            out.push(Violation::SelfLoop { kind, node: from });
            return false;
        }
        let key = if from < to { (from, to) } else { (to, from) };
        if !pairs.insert(key) {
            out.push(Violation::DuplicateEdge { a: key.0, b: key.1 });
        }
        true
    };

    for &(a, b) in graph.normal_edges() {
        check_edge(EdgeKind::Normal, a, b, &mut violations);
    }
    let mut hierarchy = Vec::new();
    for &(parent, child) in graph.hierarchy_edges() {
        if !check_edge(EdgeKind::Hierarchy, parent, child, &mut violations) {
            continue;
        }
        let p = graph.node(graph.index_of(parent).unwrap());
        let c = graph.node(graph.index_of(child).unwrap());
        if p.node_type != c.node_type {
            violations.push(Violation::HierarchyAcrossTypes { parent, child });
        } else if !schema.is_inherited(&p.node_type) {
            violations.push(Violation::HierarchyTypeNotInherited {
                parent,
                child,
                node_type: p.node_type.clone(),
            });
        }
        hierarchy.push((parent, child));
    }

    violations.extend(
        hierarchy_cycles(&hierarchy)
            .into_iter()
            .map(|nodes| Violation::HierarchyCycle { nodes }),
    );
    ValidationReport { violations }
}

/// Groups of nodes that lie on directed cycles. Repeatedly peels sources and
/// sinks; what remains is grouped into weakly connected pieces.
fn hierarchy_cycles(edges: &[(NodeId, NodeId)]) -> Vec<Vec<NodeId>> {
    let mut out_edges: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    let mut in_edges: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    let mut indeg: HashMap<NodeId, usize> = HashMap::new();
    let mut outdeg: HashMap<NodeId, usize> = HashMap::new();
    for &(p, c) in edges {
        out_edges.entry(p).or_default().push(c);
        in_edges.entry(c).or_default().push(p);
        *outdeg.entry(p).or_default() += 1;
        *indeg.entry(c).or_default() += 1;
        indeg.entry(p).or_default();
        outdeg.entry(c).or_default();
    }
    let mut alive: HashSet<NodeId> = indeg.keys().copied().collect();
    let mut queue: Vec<NodeId> = alive
        .iter()
        .copied()
        .filter(|n| indeg[n] == 0 || outdeg[n] == 0)
        .collect();
    while let Some(n) = queue.pop() {
        if !alive.remove(&n) {
            continue;
        }
        for m in out_edges.get(&n).into_iter().flatten() {
            let d = indeg.get_mut(m).unwrap();
            *d -= 1;
            if *d == 0 && alive.contains(m) {
                queue.push(*m);
            }
        }
        for m in in_edges.get(&n).into_iter().flatten() {
            let d = outdeg.get_mut(m).unwrap();
            *d -= 1;
            if *d == 0 && alive.contains(m) {
                queue.push(*m);
            }
        }
    }

    // Weakly connected groups of the remaining nodes, keyed by smallest id.
    let mut groups: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut visited = HashSet::new();
    let mut remaining: Vec<NodeId> = alive.iter().copied().collect();
    remaining.sort();
    for start in remaining {
        if !visited.insert(start) {
            continue;
        }
        let mut group = vec![start];
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            let next = out_edges.get(&n).into_iter().chain(in_edges.get(&n)).flatten();
            for &m in next {
                if alive.contains(&m) && visited.insert(m) {
                    group.push(m);
                    stack.push(m);
                }
            }
        }
        group.sort();
        groups.insert(group[0], group);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::graph::Node;

    fn schema() -> Schema {
        Schema {
            node_types: ["Product", "Site", "Vulnerability"].map(String::from).into(),
            attaching_types: ["Vulnerability".to_string()].into(),
            inherited_types: ["Product".to_string()].into(),
            inheritance_pairs: [("Vulnerability".to_string(), "Product".to_string())].into(),
        }
    }

    fn products(n: u64) -> Vec<Node> {
        (1..=n).map(|i| Node::new(i, "Product", format!("P{i}"))).collect()
    }

    #[test]
    fn cross_type_hierarchy_edge() {
        let mut nodes = products(1);
        nodes.push(Node::new(10, "Site", "S1"));
        let g = DataGraph::new(nodes, vec![], vec![(NodeId(1), NodeId(10))]);
        let report = validate_graph(&g, &schema());
        assert_eq!(
            report.violations,
            vec![Violation::HierarchyAcrossTypes { parent: NodeId(1), child: NodeId(10) }]
        );
        assert!(report.to_string().contains("hierarchy edge across types"));
    }

    #[test]
    fn hierarchy_cycle_is_reported_once() {
        let g = DataGraph::new(
            products(5),
            vec![],
            vec![
                (NodeId(1), NodeId(3)),
                (NodeId(3), NodeId(4)),
                (NodeId(4), NodeId(1)),
                (NodeId(4), NodeId(5)),
                (NodeId(2), NodeId(1)),
            ],
        );
        let report = validate_graph(&g, &schema());
        assert_eq!(
            report.violations,
            vec![Violation::HierarchyCycle { nodes: vec![NodeId(1), NodeId(3), NodeId(4)] }]
        );
        assert!(report.to_string().contains("hierarchy cycle"));
    }

    #[test]
    fn diamond_hierarchy_is_acyclic() {
        let g = DataGraph::new(
            products(4),
            vec![],
            vec![
                (NodeId(1), NodeId(2)),
                (NodeId(1), NodeId(3)),
                (NodeId(2), NodeId(4)),
                (NodeId(3), NodeId(4)),
            ],
        );
        assert!(validate_graph(&g, &schema()).is_valid());
    }

    #[test]
    fn structural_violations() {
        let mut nodes = products(2);
        nodes.push(Node::new(2, "Product", "dup"));
        nodes.push(Node::new(9, "Planet", "X"));
        nodes.push(Node::new(10, "Site", "S"));
        nodes.push(Node::new(11, "Site", "S2"));
        let g = DataGraph::new(
            nodes,
            vec![
                (NodeId(1), NodeId(42)),
                (NodeId(1), NodeId(1)),
                (NodeId(1), NodeId(2)),
            ],
            vec![(NodeId(2), NodeId(1)), (NodeId(10), NodeId(11))],
        );
        let report = validate_graph(&g, &schema());
        let v = &report.violations;
        assert!(v.contains(&Violation::DuplicateNodeId(NodeId(2))));
        assert!(v.contains(&Violation::UnknownNodeType {
            node: NodeId(9),
            node_type: "Planet".into()
        }));
        assert!(v.contains(&Violation::DanglingEdge {
            kind: EdgeKind::Normal,
            from: NodeId(1),
            to: NodeId(42),
            missing: NodeId(42)
        }));
        assert!(v.contains(&Violation::SelfLoop { kind: EdgeKind::Normal, node: NodeId(1) }));
        assert!(v.contains(&Violation::DuplicateEdge { a: NodeId(1), b: NodeId(2) }));
        assert!(v.contains(&Violation::HierarchyTypeNotInherited {
            parent: NodeId(10),
            child: NodeId(11),
            node_type: "Site".into()
        }));
    }
}
