use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::model::{DataGraph, Match, NodeId, Schema, TypeIdx};
use crate::scoring::ScoringParams;
use crate::search::Ucs;

/// Per query node, its candidates `(node, star score)` best first.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLists {
    pub lists: Vec<(String, Vec<(NodeId, f64)>)>,
}

/// How unassigned query-node edges are bounded during assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum EdgeBound {
    /// 1.0 per edge.
    Unit,
    /// Best closeness still reachable: from the assigned endpoint to the
    /// other endpoint's candidates, or the best over both lists.
    #[default]
    Tight,
}

/// Closeness between candidates of the two endpoints of a query-node edge.
pub trait PairScore {
    /// Closeness of `x` (endpoint `i`) and `y` (endpoint `j`) of edge `edge`.
    fn score(&mut self, edge: usize, x: NodeId, y: NodeId) -> f64;

    /// Upper bound on `score` between `x` and any of `targets` other than `x`.
    /// `targets` are the candidates of endpoint `side` (0 for `i`, 1 for `j`)
    /// and must not change between calls for the same edge and side.
    fn max_to(&mut self, edge: usize, x: NodeId, side: usize, targets: &[NodeId]) -> f64 {
        let _ = side;
        targets
            .iter()
            .filter(|&&y| y != x)
            .map(|&y| self.score(edge, x, y))
            .fold(0.0, f64::max)
    }
}

/// Closeness by resumable uniform-cost search, memoized per source.
pub struct SearchPairScore<'g> {
    graph: &'g DataGraph,
    params: ScoringParams,
    /// Discount flag set of each edge, as an index into `flag_sets`.
    edge_flags: Vec<usize>,
    flag_sets: Vec<Vec<bool>>,
    searches: HashMap<(usize, usize), Ucs>,
    memo: HashMap<(usize, NodeId, NodeId), f64>,
    best: HashMap<(usize, usize, NodeId), f64>,
    evaluations: usize,
}

/// Hierarchy discount flags for closeness between nodes of types `a` and
/// `b`: a type is discounted when it is the inherited side of a pair formed
/// by `a` and `b`.
pub fn pair_flags(graph: &DataGraph, schema: &Schema, a: &str, b: &str) -> Vec<bool> {
    (0..graph.type_count())
        .map(|t| {
            let name = graph.type_name(TypeIdx(t as u32));
            (name == b && schema.is_inheritance_pair(a, b))
                || (name == a && schema.is_inheritance_pair(b, a))
        })
        .collect()
}

impl<'g> SearchPairScore<'g> {
    /// `edge_types` holds the endpoint types of each query-node edge.
    pub fn new(
        graph: &'g DataGraph,
        schema: &Schema,
        params: ScoringParams,
        edge_types: &[(&str, &str)],
    ) -> Self {
        let mut flag_sets: Vec<Vec<bool>> = Vec::new();
        let mut edge_flags = Vec::new();
        for (a, b) in edge_types {
            let flags = pair_flags(graph, schema, a, b);
            let idx = match flag_sets.iter().position(|f| *f == flags) {
                Some(i) => i,
                None => {
                    flag_sets.push(flags);
                    flag_sets.len() - 1
                }
            };
            edge_flags.push(idx);
        }
        SearchPairScore {
            graph,
            params,
            edge_flags,
            flag_sets,
            searches: HashMap::new(),
            memo: HashMap::new(),
            best: HashMap::new(),
            evaluations: 0,
        }
    }

    /// Number of distinct pair closeness values computed.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn search(&mut self, flags: usize, source: usize) -> &mut Ucs {
        let graph = self.graph;
        let beta = self.params.beta;
        let set = &self.flag_sets[flags];
        self.searches
            .entry((flags, source))
            .or_insert_with(|| Ucs::new(graph, source, set.clone(), beta))
    }

    /// The first `limit` nodes of type `ty` in closeness order from `source`,
    /// skipping the source and `skip`.
    pub fn nearest_of_type(
        &mut self,
        edge: usize,
        source: NodeId,
        ty: TypeIdx,
        limit: usize,
        skip: &HashSet<usize>,
    ) -> Vec<NodeId> {
        let graph = self.graph;
        let src = graph.index_of(source).unwrap();
        let flags = self.edge_flags[edge];
        let ucs = self.search(flags, src);
        let mut out = Vec::new();
        let mut emitted = HashSet::new();
        // Replay what is already settled, in cost order, then continue.
        let mut settled: Vec<usize> = (0..graph.node_count())
            .filter(|&u| ucs.is_settled(u))
            .collect();
        settled.sort_by(|&a, &b| ucs.dist(a).total_cmp(&ucs.dist(b)).then(a.cmp(&b)));
        let wanted = |u: usize| u != src && graph.type_of(u) == ty && !skip.contains(&u);
        for u in settled {
            if out.len() >= limit {
                return out;
            }
            if wanted(u) && emitted.insert(u) {
                out.push(graph.id_of(u));
            }
        }
        while out.len() < limit {
            let Some(u) = ucs.settle_next(graph) else { break };
            if wanted(u) && emitted.insert(u) {
                out.push(graph.id_of(u));
            }
        }
        out
    }
}

impl PairScore for SearchPairScore<'_> {
    fn score(&mut self, edge: usize, x: NodeId, y: NodeId) -> f64 {
        let flags = self.edge_flags[edge];
        let key = if x <= y { (flags, x, y) } else { (flags, y, x) };
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let graph = self.graph;
        let params = self.params;
        let (xi, yi) = (graph.index_of(x).unwrap(), graph.index_of(y).unwrap());
        // Reuse whichever endpoint already has a search.
        let (src, dst) = if !self.searches.contains_key(&(flags, xi))
            && self.searches.contains_key(&(flags, yi))
        {
            (yi, xi)
        } else {
            (xi, yi)
        };
        let ucs = self.search(flags, src);
        while !ucs.is_settled(dst) {
            if ucs.settle_next(graph).is_none() {
                break;
            }
        }
        let r = if ucs.is_settled(dst) {
            params.closeness_from_cost(ucs.dist(dst))
        } else {
            0.0
        };
        self.evaluations += 1;
        self.memo.insert(key, r);
        r
    }

    fn max_to(&mut self, edge: usize, x: NodeId, side: usize, targets: &[NodeId]) -> f64 {
        let flags = self.edge_flags[edge];
        let key = (edge, side, x);
        if let Some(&r) = self.best.get(&key) {
            return r;
        }
        let graph = self.graph;
        let src = graph.index_of(x).unwrap();
        let idx: Vec<usize> = targets
            .iter()
            .filter(|&&y| y != x)
            .map(|&y| graph.index_of(y).unwrap())
            .collect();
        let ucs = self.search(flags, src);
        // Settlement order is cost order, so the nearest settled target wins.
        let mut nearest = idx
            .iter()
            .filter(|&&y| ucs.is_settled(y))
            .map(|&y| ucs.dist(y))
            .min_by(f64::total_cmp);
        if nearest.is_none() {
            let wanted: HashSet<usize> = idx.into_iter().collect();
            while let Some(u) = ucs.settle_next(graph) {
                if wanted.contains(&u) {
                    nearest = Some(ucs.dist(u));
                    break;
                }
            }
        }
        let r = nearest.map_or(0.0, |c| self.params.closeness_from_cost(c));
        self.best.insert(key, r);
        r
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BnbStats {
    pub expanded: usize,
    pub pruned: usize,
}

/// Tolerance when comparing a bound against the k-th score.
const BOUND_EPS: f64 = 1e-12;

struct Bnb<'a, P: PairScore> {
    lists: &'a [(String, Vec<(NodeId, f64)>)],
    edges: &'a [(usize, usize)],
    pairs: &'a mut P,
    bound: EdgeBound,
    k: usize,
    order: Vec<usize>,
    suffix: Vec<f64>,
    pair_max: Vec<f64>,
    targets: Vec<Vec<NodeId>>,
    assigned: Vec<Option<NodeId>>,
    results: Vec<Match>,
    seen: HashSet<Vec<NodeId>>,
    stats: BnbStats,
}

fn match_order(a: &Match, b: &Match) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| {
        a.assignment
            .iter()
            .map(|p| p.1)
            .cmp(b.assignment.iter().map(|p| p.1))
    })
}

impl<P: PairScore> Bnb<'_, P> {
    fn kth(&self) -> f64 {
        if self.results.len() >= self.k {
            self.results[self.k - 1].score
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Bound on the edges not fully assigned. `skip` is treated as unassigned.
    fn open_edges_bound(&mut self, skip: Option<usize>) -> f64 {
        let mut total = 0.0;
        for e in 0..self.edges.len() {
            let (i, j) = self.edges[e];
            let ai = if Some(i) == skip { None } else { self.assigned[i] };
            let aj = if Some(j) == skip { None } else { self.assigned[j] };
            total += match (ai, aj, self.bound) {
                (Some(_), Some(_), _) => 0.0,
                (_, _, EdgeBound::Unit) => 1.0,
                (Some(x), None, EdgeBound::Tight) => {
                    let t = std::mem::take(&mut self.targets[j]);
                    let r = self.pairs.max_to(e, x, 1, &t);
                    self.targets[j] = t;
                    r
                }
                (None, Some(y), EdgeBound::Tight) => {
                    let t = std::mem::take(&mut self.targets[i]);
                    let r = self.pairs.max_to(e, y, 0, &t);
                    self.targets[i] = t;
                    r
                }
                (None, None, EdgeBound::Tight) => self.pair_max[e],
            };
        }
        total
    }

    fn offer(&mut self) {
        let key: Vec<NodeId> = self.assigned.iter().map(|a| a.unwrap()).collect();
        if !self.seen.insert(key.clone()) {
            return;
        }
        let mut f: f64 = 0.0;
        for (q, &x) in key.iter().enumerate() {
            f += self.lists[q].1.iter().find(|c| c.0 == x).unwrap().1;
        }
        for e in 0..self.edges.len() {
            let (i, j) = self.edges[e];
            f += self.pairs.score(e, key[i], key[j]);
        }
        let m = Match {
            assignment: self
                .lists
                .iter()
                .zip(&key)
                .map(|(l, &x)| (l.0.clone(), x))
                .collect(),
            score: f,
        };
        let pos = self
            .results
            .binary_search_by(|probe| match_order(probe, &m))
            .unwrap_or_else(|p| p);
        if pos < self.k {
            self.results.insert(pos, m);
            self.results.truncate(self.k);
        }
    }

    fn dfs(&mut self, depth: usize, partial: f64) {
        let level = self.order[depth];
        let rest = self.suffix[depth + 1];
        let pre = partial + rest + self.open_edges_bound(Some(level));
        let list = &self.lists[level].1;
        for (pos, &(x, s)) in list.iter().enumerate() {
            if pre + s + BOUND_EPS < self.kth() {
                // Later siblings have no larger star score.
                self.stats.pruned += list.len() - pos;
                break;
            }
            if self.assigned.contains(&Some(x)) {
                continue;
            }
            self.stats.expanded += 1;
            self.assigned[level] = Some(x);
            let mut exact = partial + s;
            for e in 0..self.edges.len() {
                let (i, j) = self.edges[e];
                if i == level || j == level {
                    if let (Some(a), Some(b)) = (self.assigned[i], self.assigned[j]) {
                        exact += self.pairs.score(e, a, b);
                    }
                }
            }
            if depth + 1 == self.order.len() {
                self.offer();
            } else {
                let bound = exact + rest + self.open_edges_bound(None);
                if bound + BOUND_EPS < self.kth() {
                    self.stats.pruned += 1;
                } else {
                    self.dfs(depth + 1, exact);
                }
            }
            self.assigned[level] = None;
        }
    }
}

/// Branch-and-bound assembly of the top-k injective assignments over the
/// candidate lists. `edges` are query-node edges as list-index pairs.
pub fn candidate_selection<P: PairScore>(
    lists: &CandidateLists,
    edges: &[(usize, usize)],
    pairs: &mut P,
    bound: EdgeBound,
    k: usize,
) -> (Vec<Match>, BnbStats) {
    let lists = &lists.lists;
    let m = lists.len();
    if k == 0 || m == 0 || lists.iter().any(|(_, l)| l.is_empty()) {
        return (Vec::new(), BnbStats::default());
    }

    // Widest score spread first; stable on query order.
    let spread = |l: &Vec<(NodeId, f64)>| l.first().unwrap().1 - l.last().unwrap().1;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| spread(&lists[b].1).total_cmp(&spread(&lists[a].1)));
    let mut suffix = vec![0.0; m + 1];
    for d in (0..m).rev() {
        suffix[d] = suffix[d + 1] + lists[order[d]].1[0].1;
    }
    let targets: Vec<Vec<NodeId>> = lists
        .iter()
        .map(|(_, l)| l.iter().map(|c| c.0).collect())
        .collect();
    let mut pair_max = vec![1.0; edges.len()];
    if bound == EdgeBound::Tight {
        for (e, &(i, j)) in edges.iter().enumerate() {
            pair_max[e] = targets[i]
                .iter()
                .map(|&x| pairs.max_to(e, x, 1, &targets[j]))
                .fold(0.0, f64::max);
        }
    }

    let mut bnb = Bnb {
        lists,
        edges,
        pairs,
        bound,
        k,
        order,
        suffix,
        pair_max,
        targets,
        assigned: vec![None; m],
        results: Vec::new(),
        seen: HashSet::new(),
        stats: BnbStats::default(),
    };
    bnb.dfs(0, 0.0);
    (bnb.results, bnb.stats)
}
