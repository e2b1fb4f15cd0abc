//! Brute-force reference answers.
//!
//! Everything here works from the raw node and edge lists of a [`DataGraph`]
//! and shares no traversal code with the engines: closeness comes from a
//! plain full Dijkstra per source, star scores from scoring every node of the
//! query type, and general answers from enumerating every injective tuple.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::model::{classify_query, resolve_anchors, DataGraph, Match, NodeId, QueryError, QueryGraph, Schema};
use crate::scoring::{ScoreError, ScoringParams};

/// Default bound on the number of tuples the general oracle will enumerate.
pub const DEFAULT_TUPLE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Params(#[from] ScoreError),
    #[error("oracle instance too large ({tuples} tuples, cap {cap})")]
    TooLarge { tuples: u128, cap: u64 },
}

/// Adjacency built directly from the edge lists.
struct Adjacency<'g> {
    graph: &'g DataGraph,
    out: HashMap<NodeId, Vec<(NodeId, bool)>>,
    types: HashMap<NodeId, &'g str>,
}

impl<'g> Adjacency<'g> {
    fn new(graph: &'g DataGraph) -> Self {
        let mut types = HashMap::new();
        for n in graph.nodes() {
            types.entry(n.id).or_insert(n.node_type.as_str());
        }
        let mut out: HashMap<NodeId, Vec<(NodeId, bool)>> = HashMap::new();
        let edges = graph
            .normal_edges()
            .iter()
            .map(|e| (e, false))
            .chain(graph.hierarchy_edges().iter().map(|e| (e, true)));
        for (&(a, b), hier) in edges {
            if a == b || !types.contains_key(&a) || !types.contains_key(&b) {
                continue;
            }
            out.entry(a).or_default().push((b, hier));
            out.entry(b).or_default().push((a, hier));
        }
        Adjacency { graph, out, types }
    }

    /// Minimum path cost from `source` to every reachable node. Hierarchy
    /// edges between nodes of a type in `discounted` cost `1 - beta`.
    fn costs(&self, source: NodeId, discounted: &HashSet<&str>, beta: f64) -> BTreeMap<NodeId, f64> {
        #[derive(PartialEq)]
        struct Item(f64, NodeId);
        impl Eq for Item {}
        impl Ord for Item {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Item {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }

        let mut best: BTreeMap<NodeId, f64> = BTreeMap::new();
        let mut done: HashSet<NodeId> = HashSet::new();
        let mut heap = BinaryHeap::from([Item(0.0, source)]);
        best.insert(source, 0.0);
        while let Some(Item(cost, u)) = heap.pop() {
            if !done.insert(u) {
                continue;
            }
            for &(v, hier) in self.out.get(&u).into_iter().flatten() {
                let w = if hier && discounted.contains(self.types[&v]) {
                    1.0 - beta
                } else {
                    1.0
                };
                let c = cost + w;
                if best.get(&v).is_none_or(|&old| c < old) {
                    best.insert(v, c);
                    heap.push(Item(c, v));
                }
            }
        }
        best
    }

    fn hops(&self, source: NodeId) -> BTreeMap<NodeId, u32> {
        let mut hops = BTreeMap::from([(source, 0)]);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = hops[&u];
            for &(v, _) in self.out.get(&u).into_iter().flatten() {
                if let std::collections::btree_map::Entry::Vacant(e) = hops.entry(v) {
                    e.insert(d + 1);
                    queue.push_back(v);
                }
            }
        }
        hops
    }

    fn of_type(&self, ty: &str) -> BTreeSet<NodeId> {
        self.graph
            .nodes()
            .iter()
            .filter(|n| n.node_type == ty)
            .map(|n| n.id)
            .collect()
    }
}

fn source_discounts<'s>(schema: &'s Schema, source_type: &str) -> HashSet<&'s str> {
    schema
        .inheritance_pairs
        .iter()
        .filter(|(a, _)| a == source_type)
        .map(|(_, i)| i.as_str())
        .collect()
}

fn pair_discounts<'s>(schema: &'s Schema, a: &str, b: &str) -> HashSet<&'s str> {
    schema
        .inheritance_pairs
        .iter()
        .filter(|(x, y)| (x == a && y == b) || (x == b && y == a))
        .map(|(_, i)| i.as_str())
        .collect()
}

/// Exact `(cost, closeness)` from `source` to every reachable node.
pub fn oracle_closeness(
    graph: &DataGraph,
    schema: &Schema,
    source: NodeId,
    params: &ScoringParams,
) -> BTreeMap<NodeId, (f64, f64)> {
    let adj = Adjacency::new(graph);
    let Some(ty) = adj.types.get(&source) else {
        return BTreeMap::new();
    };
    let discounted = source_discounts(schema, ty);
    adj.costs(source, &discounted, params.beta)
        .into_iter()
        .map(|(n, c)| (n, (c, params.alpha.powf(c))))
        .collect()
}

/// `alpha^hops` by breadth-first search, ignoring hierarchy discounts.
pub fn bfs_closeness(graph: &DataGraph, source: NodeId, alpha: f64) -> BTreeMap<NodeId, f64> {
    Adjacency::new(graph)
        .hops(source)
        .into_iter()
        .map(|(n, h)| (n, alpha.powi(h as i32)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleStar {
    /// Score of every node of the query type except anchors, 0 if unreachable.
    pub scores: BTreeMap<NodeId, f64>,
    /// Best `k` nodes with positive score.
    pub top: Vec<(NodeId, f64)>,
}

fn rank_desc(a: &(NodeId, f64), b: &(NodeId, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

pub fn oracle_star_topk(
    graph: &DataGraph,
    schema: &Schema,
    query: &QueryGraph,
    k: usize,
    params: &ScoringParams,
) -> Result<OracleStar, OracleError> {
    params.check()?;
    classify_query(query, schema)?;
    let anchors = resolve_anchors(query, graph)?;
    let adj = Adjacency::new(graph);
    let per_anchor: Vec<BTreeMap<NodeId, f64>> = query
        .specific_nodes
        .iter()
        .map(|s| {
            let discounted = source_discounts(schema, &s.node_type);
            adj.costs(anchors[&s.id], &discounted, params.beta)
        })
        .collect();
    let anchor_ids: HashSet<NodeId> = anchors.values().copied().collect();
    let mut scores = BTreeMap::new();
    for node in adj.of_type(&query.query_nodes[0].node_type) {
        if anchor_ids.contains(&node) {
            continue;
        }
        let s: f64 = per_anchor
            .iter()
            .filter_map(|m| m.get(&node))
            .map(|&c| params.alpha.powf(c))
            .sum();
        scores.insert(node, s);
    }
    let mut top: Vec<(NodeId, f64)> = scores
        .iter()
        .filter(|(_, &s)| s > 0.0)
        .map(|(&n, &s)| (n, s))
        .collect();
    top.sort_by(rank_desc);
    top.truncate(k);
    Ok(OracleStar { scores, top })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleGeneral {
    /// Candidate set of each query node, in query-node order.
    pub candidates: Vec<(String, Vec<(NodeId, f64)>)>,
    pub tuples: u64,
    pub top: Vec<Match>,
}

/// Exhaustive top-k for a general query over full candidate sets.
///
/// A query node with adjacent specific nodes takes every node of its type
/// (other than an anchor) with positive star score. A query node without
/// any takes, with score 0, every node of its type reachable from a candidate
/// of an earlier neighbouring query node (in breadth-first order from the
/// anchored ones), excluding that candidate itself and all anchors.
pub fn oracle_general_topk(
    graph: &DataGraph,
    schema: &Schema,
    query: &QueryGraph,
    k: usize,
    params: &ScoringParams,
    cap: u64,
) -> Result<OracleGeneral, OracleError> {
    params.check()?;
    classify_query(query, schema)?;
    let anchors = resolve_anchors(query, graph)?;
    let anchor_ids: HashSet<NodeId> = anchors.values().copied().collect();
    let adj = Adjacency::new(graph);

    let is_query = |id: &str| query.query_node(id).is_some();
    let anchored: Vec<bool> = query
        .query_nodes
        .iter()
        .map(|v| query.neighbors(&v.id).iter().any(|n| !is_query(n)))
        .collect();

    let mut lists: Vec<Option<Vec<(NodeId, f64)>>> = vec![None; query.query_nodes.len()];
    for (i, v) in query.query_nodes.iter().enumerate() {
        if !anchored[i] {
            continue;
        }
        let star: Vec<&str> = query
            .neighbors(&v.id)
            .into_iter()
            .filter(|n| !is_query(n))
            .collect();
        let per_anchor: Vec<BTreeMap<NodeId, f64>> = star
            .iter()
            .map(|s| {
                let ty = &query.specific(s).unwrap().node_type;
                adj.costs(anchors[*s], &source_discounts(schema, ty), params.beta)
            })
            .collect();
        let mut list = Vec::new();
        for node in adj.of_type(&v.node_type) {
            if anchor_ids.contains(&node) {
                continue;
            }
            let s: f64 = per_anchor
                .iter()
                .filter_map(|m| m.get(&node))
                .map(|&c| params.alpha.powf(c))
                .sum();
            if s > 0.0 {
                list.push((node, s));
            }
        }
        list.sort_by(rank_desc);
        lists[i] = Some(list);
    }

    let position: HashMap<&str, usize> = query
        .query_nodes
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.as_str(), i))
        .collect();
    let mut order: Vec<usize> = (0..query.query_nodes.len()).filter(|&i| anchored[i]).collect();
    let mut seen: HashSet<usize> = order.iter().copied().collect();
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for n in query.neighbors(&query.query_nodes[u].id) {
            if let Some(&j) = position.get(n) {
                if seen.insert(j) {
                    order.push(j);
                }
            }
        }
    }
    for (pos, &i) in order.iter().enumerate() {
        if anchored[i] {
            continue;
        }
        let v = &query.query_nodes[i];
        let mut found: BTreeSet<NodeId> = BTreeSet::new();
        for n in query.neighbors(&v.id) {
            let Some(&j) = position.get(n) else { continue };
            if !order[..pos].contains(&j) {
                continue;
            }
            for &(y, _) in lists[j].as_ref().unwrap() {
                for x in adj.hops(y).into_keys() {
                    if x != y && !anchor_ids.contains(&x) && adj.types[&x] == v.node_type {
                        found.insert(x);
                    }
                }
            }
        }
        lists[i] = Some(found.into_iter().map(|x| (x, 0.0)).collect());
    }

    let candidates: Vec<(String, Vec<(NodeId, f64)>)> = query
        .query_nodes
        .iter()
        .zip(lists)
        .map(|(v, l)| (v.id.clone(), l.unwrap()))
        .collect();
    let deferred = query_node_edges(query);
    let mut result = oracle_select(graph, schema, query, &candidates, &deferred, k, params, cap)?;
    result.candidates = candidates;
    Ok(result)
}

/// Query-node to query-node edges as index pairs, first occurrence of each
/// unordered pair, in input order.
pub fn query_node_edges(query: &QueryGraph) -> Vec<(usize, usize)> {
    let pos = |id: &str| query.query_nodes.iter().position(|v| v.id == id);
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (a, b) in &query.edges {
        if let (Some(i), Some(j)) = (pos(a), pos(b)) {
            if !out.contains(&(i, j)) && !out.contains(&(j, i)) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Exhaustive top-k over given candidate lists: every injective tuple,
/// scored as the sum of list scores plus the closeness of each query-node
/// edge.
#[allow(clippy::too_many_arguments)]
pub fn oracle_select(
    graph: &DataGraph,
    schema: &Schema,
    query: &QueryGraph,
    lists: &[(String, Vec<(NodeId, f64)>)],
    edges: &[(usize, usize)],
    k: usize,
    params: &ScoringParams,
    cap: u64,
) -> Result<OracleGeneral, OracleError> {
    let total: u128 = lists.iter().map(|(_, l)| l.len() as u128).product();
    if total > cap as u128 {
        return Err(OracleError::TooLarge { tuples: total, cap });
    }
    let adj = Adjacency::new(graph);
    let mut pair_costs: Vec<HashMap<NodeId, BTreeMap<NodeId, f64>>> = Vec::new();
    for &(i, j) in edges {
        let ti = &query.query_nodes[i].node_type;
        let tj = &query.query_nodes[j].node_type;
        let discounted = pair_discounts(schema, ti, tj);
        let mut from = HashMap::new();
        for &(x, _) in &lists[i].1 {
            from.insert(x, adj.costs(x, &discounted, params.beta));
        }
        pair_costs.push(from);
    }

    let m = lists.len();
    let mut all: Vec<Match> = Vec::new();
    let mut idx = vec![0usize; m];
    let mut tuples = 0u64;
    if lists.iter().all(|(_, l)| !l.is_empty()) {
        'outer: loop {
            let picked: Vec<NodeId> = (0..m).map(|q| lists[q].1[idx[q]].0).collect();
            let distinct: HashSet<NodeId> = picked.iter().copied().collect();
            if distinct.len() == m {
                tuples += 1;
                let mut f: f64 = (0..m).map(|q| lists[q].1[idx[q]].1).sum();
                for (e, &(i, j)) in edges.iter().enumerate() {
                    if let Some(&c) = pair_costs[e][&picked[i]].get(&picked[j]) {
                        f += params.alpha.powf(c);
                    }
                }
                all.push(Match {
                    assignment: (0..m).map(|q| (lists[q].0.clone(), picked[q])).collect(),
                    score: f,
                });
            }
            let mut q = m;
            loop {
                if q == 0 {
                    break 'outer;
                }
                q -= 1;
                idx[q] += 1;
                if idx[q] < lists[q].1.len() {
                    break;
                }
                idx[q] = 0;
            }
        }
    }
    all.sort_by(|a, b| {
        b.score.total_cmp(&a.score).then_with(|| {
            let ka: Vec<NodeId> = a.assignment.iter().map(|p| p.1).collect();
            let kb: Vec<NodeId> = b.assignment.iter().map(|p| p.1).collect();
            ka.cmp(&kb)
        })
    });
    all.truncate(k);
    Ok(OracleGeneral {
        candidates: lists.to_vec(),
        tuples,
        top: all,
    })
}
