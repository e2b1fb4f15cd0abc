//! Top-k star queries.
//!
//! Every anchor runs its own uniform-cost search. Searches advance together in
//! rounds: round `t` settles, for each anchor, every node whose path cost is at
//! most `t` times that anchor's smallest edge cost. A candidate's score is
//! final once every anchor has settled it (or can reach nothing more), and
//! candidates whose best possible score falls below the k-th lower bound of
//! the queue are dropped early.

mod state;
mod topk;

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::model::{classify_query, resolve_anchors, Arity, DataGraph, NodeId, QueryError, QueryGraph, Schema};
use crate::scoring::{ScoreError, ScoringParams};
use crate::search::{anchor_discounts, Ucs};

pub use state::{StateEntry, VertexStateTable};
pub use topk::{Admission, Candidate, TopKQueue};

use state::AnchorState;

/// Slack when comparing path costs against a round's cost limit.
pub const COST_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StarError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Params(#[from] ScoreError),
    #[error("not a star query: {0} query nodes")]
    NotStar(usize),
    #[error("k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StarStats {
    pub iterations: u32,
    pub visited_nodes: usize,
    pub pruned_nodes: usize,
    pub settled_nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarResult {
    /// `(node, score)`, score descending then node id ascending.
    pub ranked: Vec<(NodeId, f64)>,
    pub stats: StarStats,
}

/// Run configuration beyond the query itself.
#[derive(Debug, Clone, Default)]
pub struct StarOptions {
    pub prune: bool,
    /// Additional nodes never reported as candidates.
    pub exclude: HashSet<usize>,
}

/// True once nothing is left to decide or nothing can change any more.
pub fn check_convergence(alive: usize, messages_pending: bool) -> bool {
    alive == 0 || !messages_pending
}

/// Top-k star query.
pub fn sqh(
    graph: &DataGraph,
    schema: &Schema,
    query: &QueryGraph,
    k: usize,
    params: &ScoringParams,
    prune: bool,
) -> Result<StarResult, StarError> {
    let options = StarOptions {
        prune,
        ..StarOptions::default()
    };
    sqh_observed(graph, schema, query, k, params, &options, &mut |_| {})
}

/// [`sqh`] with extra options, calling `observer` after every round.
pub fn sqh_observed(
    graph: &DataGraph,
    schema: &Schema,
    query: &QueryGraph,
    k: usize,
    params: &ScoringParams,
    options: &StarOptions,
    observer: &mut dyn FnMut(&VertexStateTable),
) -> Result<StarResult, StarError> {
    params.check()?;
    if k == 0 {
        return Err(StarError::ZeroK);
    }
    let class = classify_query(query, schema)?;
    if class.arity != Arity::Star {
        return Err(StarError::NotStar(query.query_nodes.len()));
    }
    let anchors = resolve_anchors(query, graph)?;
    let anchor_idx: Vec<usize> = query
        .specific_nodes
        .iter()
        .map(|s| graph.index_of(anchors[&s.id]).unwrap())
        .collect();
    Ok(run_star(
        graph,
        schema,
        &query.query_nodes[0].node_type,
        &anchor_idx,
        k,
        params,
        options,
        observer,
    ))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    NotCandidate,
    Unseen,
    Alive,
    Pruned,
    Done,
}

/// The star engine on resolved anchors (node indices).
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_star(
    graph: &DataGraph,
    schema: &Schema,
    center_type: &str,
    anchors: &[usize],
    k: usize,
    params: &ScoringParams,
    options: &StarOptions,
    observer: &mut dyn FnMut(&VertexStateTable),
) -> StarResult {
    let mut stats = StarStats::default();
    let n = graph.node_count();
    let mut status = vec![Status::NotCandidate; n];
    let mut unseen = 0usize;
    if let Some(ty) = graph.type_index(center_type) {
        for c in graph.nodes_of_type(ty) {
            if !anchors.contains(&c) && !options.exclude.contains(&c) {
                status[c] = Status::Unseen;
                unseen += 1;
            }
        }
    }
    if unseen == 0 || anchors.is_empty() {
        return StarResult {
            ranked: Vec::new(),
            stats,
        };
    }

    let mut states: Vec<AnchorState> = anchors
        .iter()
        .map(|&a| {
            let discounts = anchor_discounts(graph, schema, &graph.node(a).node_type);
            let search = Ucs::new(graph, a, discounts, params.beta);
            let step = search.min_step();
            AnchorState {
                applicable: step < 1.0,
                search,
                step,
                horizon: 0,
                exhausted: false,
                retired: false,
            }
        })
        .collect();

    let mut visited = vec![false; n];
    let mut alive_touched: Vec<usize> = Vec::new();
    let mut unseen_pruned = false;
    let mut queue = TopKQueue::new(k);
    let mut t: u32 = 0;

    loop {
        stats.iterations += 1;
        for a in states.iter_mut().filter(|a| a.is_active()) {
            let limit = t as f64 * a.step + COST_EPS;
            a.search.settle_until(graph, limit, |u| {
                if !visited[u] {
                    visited[u] = true;
                    stats.visited_nodes += 1;
                }
                if status[u] == Status::Unseen {
                    unseen -= 1;
                    if unseen_pruned {
                        status[u] = Status::Pruned;
                    } else {
                        status[u] = Status::Alive;
                        alive_touched.push(u);
                    }
                }
            });
            a.horizon = t;
            a.exhausted = a.search.is_exhausted();
        }

        // Finalize candidates no active anchor can still change.
        let mut finished = Vec::new();
        alive_touched.retain(|&c| {
            let pending = states
                .iter()
                .any(|a| !a.exhausted && !a.search.is_settled(c));
            if !pending {
                finished.push(c);
            }
            pending
        });
        for c in finished {
            status[c] = Status::Done;
            stats.settled_nodes += 1;
            let s: f64 = states
                .iter()
                .filter(|a| a.search.is_settled(c))
                .map(|a| params.closeness_from_cost(a.search.dist(c)))
                .sum();
            if s > 0.0 {
                queue.offer(Candidate::exact(graph.id_of(c), s));
            }
        }
        if states.iter().all(|a| a.exhausted) && !unseen_pruned {
            // Unreachable from every anchor: final score 0.
            stats.settled_nodes += unseen;
            unseen = 0;
        }

        if options.prune {
            if let Some(kth_lower) = queue.kth_lower() {
                alive_touched.retain(|&c| {
                    let upper: f64 = states
                        .iter()
                        .map(|a| {
                            if a.search.is_settled(c) {
                                params.closeness_from_cost(a.search.dist(c))
                            } else {
                                a.unsettled_upper(params)
                            }
                        })
                        .sum();
                    if upper < kth_lower {
                        status[c] = Status::Pruned;
                        stats.pruned_nodes += 1;
                        false
                    } else {
                        true
                    }
                });
                if !unseen_pruned && unseen > 0 {
                    let upper: f64 = states.iter().map(|a| a.unsettled_upper(params)).sum();
                    if upper < kth_lower {
                        unseen_pruned = true;
                        stats.pruned_nodes += unseen;
                    }
                }
            }
        }

        let unseen_alive = if unseen_pruned { 0 } else { unseen };
        if unseen_alive == 0 {
            // An anchor that has settled every remaining candidate has nothing
            // left to contribute.
            for a in states.iter_mut().filter(|a| a.is_active()) {
                if alive_touched.iter().all(|&c| a.search.is_settled(c)) {
                    a.retired = true;
                }
            }
        }

        observer(&VertexStateTable {
            round: t,
            params,
            anchors: &states,
        });

        let alive = alive_touched.len() + unseen_alive;
        let pending = states.iter().any(|a| a.is_active());
        if check_convergence(alive, pending) {
            break;
        }

        // Skip rounds in which no active search would settle anything.
        let mut next = u32::MAX;
        for a in states.iter_mut().filter(|a| a.is_active()) {
            if let Some(c) = a.search.peek_cost() {
                next = next.min(((c - COST_EPS) / a.step).ceil().max(0.0) as u32);
            }
        }
        t = next.max(t + 1);
    }

    let ranked = queue
        .ranked()
        .into_iter()
        .map(|c| (c.node, c.score.s))
        .collect();
    log::debug!(
        "star {center_type}: {} rounds, {} visited, {} pruned",
        stats.iterations,
        stats.visited_nodes,
        stats.pruned_nodes
    );
    StarResult { ranked, stats }
}
