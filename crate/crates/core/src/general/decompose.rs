use crate::model::QueryGraph;

/// One star per query node: the node and its adjacent specific nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Star {
    pub center: String,
    pub query: QueryGraph,
}

impl Star {
    /// False when no specific node is adjacent; such a star gets its
    /// candidates from its neighbours during assembly.
    pub fn is_anchored(&self) -> bool {
        !self.query.specific_nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarDecomposition {
    /// In query-node order.
    pub stars: Vec<Star>,
    /// Query-node to query-node edges, in input order.
    pub deferred: Vec<(String, String)>,
    /// Specific-to-specific edges; they constrain nothing and are not scored.
    pub ignored: Vec<(String, String)>,
}

pub fn decompose(q: &QueryGraph) -> StarDecomposition {
    let is_query = |id: &str| q.query_node(id).is_some();
    let stars = q
        .query_nodes
        .iter()
        .map(|center| {
            let anchors: Vec<_> = q
                .neighbors(&center.id)
                .into_iter()
                .filter_map(|n| q.specific(n).cloned())
                .collect();
            Star {
                center: center.id.clone(),
                query: QueryGraph::star(center.clone(), anchors),
            }
        })
        .collect();

    let mut deferred: Vec<(String, String)> = Vec::new();
    let mut ignored = Vec::new();
    for (a, b) in &q.edges {
        match (is_query(a), is_query(b)) {
            (true, true) => {
                let dup = deferred
                    .iter()
                    .any(|(x, y)| (x == a && y == b) || (x == b && y == a));
                if !dup {
                    deferred.push((a.clone(), b.clone()));
                }
            }
            (false, false) => ignored.push((a.clone(), b.clone())),
            _ => {}
        }
    }
    StarDecomposition {
        stars,
        deferred,
        ignored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{QueryNode, SpecificNode};

    fn s(id: &str) -> SpecificNode {
        SpecificNode {
            id: id.into(),
            node_type: "Vulnerability".into(),
            label: id.to_uppercase(),
        }
    }

    fn v(id: &str) -> QueryNode {
        QueryNode {
            id: id.into(),
            node_type: "Product".into(),
        }
    }

    fn e(a: &str, b: &str) -> (String, String) {
        (a.into(), b.into())
    }

    #[test]
    fn star_input_is_identity() {
        let q = QueryGraph::star(v("p"), vec![s("a"), s("b")]);
        let d = decompose(&q);
        assert_eq!(d.stars.len(), 1);
        assert_eq!(d.stars[0].query, q);
        assert!(d.deferred.is_empty());
    }

    #[test]
    fn two_query_nodes_share_one_deferred_edge() {
        // Two products, each tied to its own vulnerability, linked to each other.
        let q = QueryGraph {
            specific_nodes: vec![s("a"), s("b")],
            query_nodes: vec![v("x"), v("y")],
            edges: vec![e("a", "x"), e("b", "y"), e("x", "y")],
        };
        let d = decompose(&q);
        assert_eq!(d.stars.len(), 2);
        assert_eq!(d.stars[0].query.specific_nodes, vec![s("a")]);
        assert_eq!(d.stars[1].query.specific_nodes, vec![s("b")]);
        assert_eq!(d.deferred, vec![e("x", "y")]);
    }

    #[test]
    fn anchorless_star_is_flagged() {
        let q = QueryGraph {
            specific_nodes: vec![s("s"), s("t")],
            query_nodes: vec![v("u"), v("v")],
            edges: vec![e("u", "v"), e("s", "u"), e("v", "u"), e("s", "t")],
        };
        let d = decompose(&q);
        assert!(d.stars[0].is_anchored());
        assert!(!d.stars[1].is_anchored());
        assert_eq!(d.stars[1].query.query_nodes, vec![v("v")]);
        assert_eq!(d.deferred, vec![e("u", "v")]);
        assert_eq!(d.ignored, vec![e("s", "t")]);
    }
}
