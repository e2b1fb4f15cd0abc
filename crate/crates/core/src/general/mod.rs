//! Top-k general queries: split into one star per query node, answer each
//! star, then assemble injective assignments by branch and bound.

mod decompose;
mod select;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::model::{classify_query, resolve_anchors, DataGraph, Match, NodeId, QueryError, QueryGraph, Schema};
use crate::scoring::{ScoreError, ScoringParams};
use crate::star::{run_star, StarOptions, StarStats};

pub use decompose::{decompose, Star, StarDecomposition};
pub use select::{candidate_selection, pair_flags, BnbStats, CandidateLists, EdgeBound, PairScore, SearchPairScore};

/// Length of each per-star candidate list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Ks {
    All,
    Top(usize),
}

impl Ks {
    pub fn limit(&self) -> usize {
        match self {
            Ks::All => usize::MAX,
            Ks::Top(n) => *n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneralError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Params(#[from] ScoreError),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k_s ({ks}) must be at least k ({k})")]
    KsBelowK { ks: usize, k: usize },
}

#[derive(Debug, Clone)]
pub struct GeneralOptions {
    /// Candidate list length; `None` means twice `k`.
    pub ks: Option<Ks>,
    pub prune: bool,
    pub bound: EdgeBound,
}

impl Default for GeneralOptions {
    fn default() -> Self {
        GeneralOptions {
            ks: None,
            prune: true,
            bound: EdgeBound::Tight,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneralStats {
    /// Star engine statistics per anchored query node.
    pub stars: Vec<(String, StarStats)>,
    /// Candidate list length per query node.
    pub candidates: Vec<(String, usize)>,
    pub bnb: BnbStats,
    pub pair_evaluations: usize,
    #[serde(skip)]
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub decompose: Duration,
    pub stars: Duration,
    pub assemble: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralResult {
    pub ks: Ks,
    pub matches: Vec<Match>,
    pub stats: GeneralStats,
}

/// Top-k general query.
pub fn gqh(
    graph: &DataGraph,
    schema: &Schema,
    query: &QueryGraph,
    k: usize,
    params: &ScoringParams,
    options: &GeneralOptions,
) -> Result<GeneralResult, GeneralError> {
    params.check()?;
    if k == 0 {
        return Err(GeneralError::ZeroK);
    }
    let ks = options.ks.unwrap_or(Ks::Top(k.saturating_mul(2)));
    if ks.limit() < k {
        return Err(GeneralError::KsBelowK { ks: ks.limit(), k });
    }
    classify_query(query, schema)?;
    let anchors = resolve_anchors(query, graph)?;
    let anchor_idx: HashSet<usize> = anchors
        .values()
        .map(|&id| graph.index_of(id).unwrap())
        .collect();
    let mut stats = GeneralStats::default();

    let started = Instant::now();
    let decomposition = decompose(query);
    stats.timings.decompose = started.elapsed();

    let star_options = StarOptions {
        prune: options.prune,
        exclude: anchor_idx.clone(),
    };
    let star_anchors = |star: &Star| -> Vec<usize> {
        star.query
            .specific_nodes
            .iter()
            .map(|s| graph.index_of(anchors[&s.id]).unwrap())
            .collect()
    };

    // A star query needs no assembly.
    if query.query_nodes.len() == 1 {
        let started = Instant::now();
        let star = &decomposition.stars[0];
        let res = run_star(
            graph,
            schema,
            &star.query.query_nodes[0].node_type,
            &star_anchors(star),
            k,
            params,
            &star_options,
            &mut |_| {},
        );
        stats.timings.stars = started.elapsed();
        stats.stars.push((star.center.clone(), res.stats));
        stats.candidates.push((star.center.clone(), res.ranked.len()));
        let matches = res
            .ranked
            .into_iter()
            .map(|(node, s)| Match {
                assignment: vec![(star.center.clone(), node)],
                score: s,
            })
            .collect();
        return Ok(GeneralResult {
            ks,
            matches,
            stats,
        });
    }

    let started = Instant::now();
    let mut lists: Vec<Option<Vec<(NodeId, f64)>>> = vec![None; decomposition.stars.len()];
    for (i, star) in decomposition.stars.iter().enumerate() {
        if !star.is_anchored() {
            continue;
        }
        let res = run_star(
            graph,
            schema,
            &star.query.query_nodes[0].node_type,
            &star_anchors(star),
            ks.limit(),
            params,
            &star_options,
            &mut |_| {},
        );
        stats.stars.push((star.center.clone(), res.stats));
        lists[i] = Some(res.ranked);
    }
    stats.timings.stars = started.elapsed();

    let started = Instant::now();
    let position: HashMap<&str, usize> = query
        .query_nodes
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.as_str(), i))
        .collect();
    let edges: Vec<(usize, usize)> = decomposition
        .deferred
        .iter()
        .map(|(a, b)| (position[a.as_str()], position[b.as_str()]))
        .collect();
    let edge_types: Vec<(&str, &str)> = edges
        .iter()
        .map(|&(i, j)| {
            (
                query.query_nodes[i].node_type.as_str(),
                query.query_nodes[j].node_type.as_str(),
            )
        })
        .collect();
    let mut pairs = SearchPairScore::new(graph, schema, *params, &edge_types);

    // Query nodes without anchors, in breadth-first order from anchored ones,
    // draw candidates from the neighbourhoods of earlier neighbours' candidates.
    let mut order: Vec<usize> = (0..lists.len()).filter(|&i| lists[i].is_some()).collect();
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &(i, j) in &edges {
            let v = if i == u {
                j
            } else if j == u {
                i
            } else {
                continue;
            };
            if !order.contains(&v) {
                order.push(v);
            }
        }
    }
    for pos in 0..order.len() {
        let v = order[pos];
        if lists[v].is_some() {
            continue;
        }
        let Some(ty) = graph.type_index(&query.query_nodes[v].node_type) else {
            lists[v] = Some(Vec::new());
            continue;
        };
        let mut found: Vec<NodeId> = Vec::new();
        for (e, &(i, j)) in edges.iter().enumerate() {
            let u = if i == v {
                j
            } else if j == v {
                i
            } else {
                continue;
            };
            if !order[..pos].contains(&u) {
                continue;
            }
            let sources: Vec<NodeId> = lists[u].as_ref().unwrap().iter().map(|c| c.0).collect();
            for y in sources {
                found.extend(pairs.nearest_of_type(e, y, ty, ks.limit(), &anchor_idx));
            }
        }
        found.sort();
        found.dedup();
        lists[v] = Some(found.into_iter().map(|x| (x, 0.0)).collect());
    }

    let candidate_lists = CandidateLists {
        lists: query
            .query_nodes
            .iter()
            .zip(lists)
            .map(|(v, l)| (v.id.clone(), l.unwrap_or_default()))
            .collect(),
    };
    stats.candidates = candidate_lists
        .lists
        .iter()
        .map(|(id, l)| (id.clone(), l.len()))
        .collect();
    let (matches, bnb) = candidate_selection(&candidate_lists, &edges, &mut pairs, options.bound, k);
    log::debug!("assembly: {} expanded, {} pruned", bnb.expanded, bnb.pruned);
    stats.bnb = bnb;
    stats.pair_evaluations = pairs.evaluations();
    stats.timings.assemble = started.elapsed();
    Ok(GeneralResult {
        ks,
        matches,
        stats,
    })
}
