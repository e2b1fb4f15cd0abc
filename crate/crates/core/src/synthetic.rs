//! Seeded synthetic networks and random queries.

use std::collections::{HashSet, VecDeque};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::model::{DataGraph, Node, NodeId, QueryGraph, QueryNode, Schema, SpecificNode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid type mix {0:?}, expected attaching+inherited+other such as 2+2+3")]
    TypeMix(String),
    #[error("node count must be positive")]
    NoNodes,
    #[error("average degree {degree} is infeasible for {nodes} nodes")]
    Degree { degree: f64, nodes: usize },
    #[error("fanout must be positive when depth is positive")]
    Fanout,
}

/// Counts of attaching, inherited and other node types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TypeMix {
    pub attaching: usize,
    pub inherited: usize,
    pub other: usize,
}

impl FromStr for TypeMix {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<usize> = s
            .split('+')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| GenError::TypeMix(s.to_string()))?;
        match parts.as_slice() {
            &[attaching, inherited, other] if attaching + inherited + other > 0 => Ok(TypeMix {
                attaching,
                inherited,
                other,
            }),
            _ => Err(GenError::TypeMix(s.to_string())),
        }
    }
}

impl TypeMix {
    pub fn total(&self) -> usize {
        self.attaching + self.inherited + self.other
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SyntheticConfig {
    pub nodes: usize,
    pub type_mix: TypeMix,
    pub avg_degree: f64,
    /// Edge levels of each hierarchy tree; 0 disables hierarchy edges.
    pub depth: u32,
    pub fanout: u32,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            nodes: 1000,
            type_mix: TypeMix {
                attaching: 2,
                inherited: 2,
                other: 3,
            },
            avg_degree: 10.0,
            depth: 3,
            fanout: 3,
            seed: 1,
        }
    }
}

/// The generator's random source, for callers drawing their own queries.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn schema_for(mix: &TypeMix) -> Schema {
    let attaching: Vec<String> = (0..mix.attaching).map(|i| format!("Attach{i}")).collect();
    let inherited: Vec<String> = (0..mix.inherited).map(|i| format!("Inherit{i}")).collect();
    let other: Vec<String> = (0..mix.other).map(|i| format!("Other{i}")).collect();
    let mut pairs = std::collections::BTreeSet::new();
    for a in &attaching {
        for h in &inherited {
            pairs.insert((a.clone(), h.clone()));
        }
    }
    Schema {
        node_types: attaching
            .iter()
            .chain(&inherited)
            .chain(&other)
            .cloned()
            .collect(),
        attaching_types: attaching.into_iter().collect(),
        inherited_types: inherited.into_iter().collect(),
        inheritance_pairs: pairs,
    }
}

/// Builds a random network: types assigned evenly at random, nodes of each
/// inherited type arranged in complete trees, then random normal edges until
/// the average degree is reached. Attaching nodes pick an inherited partner
/// half of the time.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<(DataGraph, Schema), GenError> {
    let n = config.nodes;
    if n == 0 {
        return Err(GenError::NoNodes);
    }
    if config.type_mix.total() == 0 {
        return Err(GenError::TypeMix("0+0+0".into()));
    }
    if config.avg_degree.is_nan() || config.avg_degree < 0.0 || config.avg_degree > (n - 1) as f64 {
        return Err(GenError::Degree {
            degree: config.avg_degree,
            nodes: n,
        });
    }
    if config.depth > 0 && config.fanout == 0 {
        return Err(GenError::Fanout);
    }
    let schema = schema_for(&config.type_mix);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let type_names: Vec<String> = (0..config.type_mix.attaching)
        .map(|i| format!("Attach{i}"))
        .chain((0..config.type_mix.inherited).map(|i| format!("Inherit{i}")))
        .chain((0..config.type_mix.other).map(|i| format!("Other{i}")))
        .collect();
    let mut assignment: Vec<usize> = (0..n).map(|i| i % type_names.len()).collect();
    assignment.shuffle(&mut rng);
    let nodes: Vec<Node> = assignment
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let id = i as u64 + 1;
            Node::new(id, type_names[t].clone(), format!("{}-{id}", type_names[t]))
        })
        .collect();

    let mut taken: HashSet<(usize, usize)> = HashSet::new();
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    let mut hierarchy = Vec::new();
    let first_inherited = config.type_mix.attaching;
    let inherited_range = first_inherited..first_inherited + config.type_mix.inherited;
    if config.depth > 0 {
        let mut tree_size: u64 = 0;
        let mut level: u64 = 1;
        for _ in 0..=config.depth {
            tree_size = tree_size.saturating_add(level);
            level = level.saturating_mul(config.fanout as u64);
        }
        for t in inherited_range.clone() {
            let members: Vec<usize> = (0..n).filter(|&i| assignment[i] == t).collect();
            for tree in members.chunks(tree_size.min(usize::MAX as u64) as usize) {
                for p in 1..tree.len() {
                    let parent = tree[(p - 1) / config.fanout as usize];
                    taken.insert(key(parent, tree[p]));
                    hierarchy.push((NodeId(parent as u64 + 1), NodeId(tree[p] as u64 + 1)));
                }
            }
        }
    }

    let inherited_nodes: Vec<usize> = (0..n)
        .filter(|&i| inherited_range.contains(&assignment[i]))
        .collect();
    let target = ((n as f64 * config.avg_degree / 2.0).round() as usize).saturating_sub(hierarchy.len());
    let mut normal = Vec::with_capacity(target);
    let mut attempts = 0usize;
    while normal.len() < target && attempts < target.saturating_mul(50) + 100 {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = if assignment[u] < config.type_mix.attaching
            && !inherited_nodes.is_empty()
            && rng.gen_bool(0.5)
        {
            inherited_nodes[rng.gen_range(0..inherited_nodes.len())]
        } else {
            rng.gen_range(0..n)
        };
        if u == v || !taken.insert(key(u, v)) {
            continue;
        }
        normal.push((NodeId(u as u64 + 1), NodeId(v as u64 + 1)));
    }
    Ok((DataGraph::new(nodes, normal, hierarchy), schema))
}

/// Nodes in breadth-first order from `start`, at most `limit` of them.
fn nearby(graph: &DataGraph, start: usize, limit: usize) -> Vec<usize> {
    let mut seen = HashSet::from([start]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for a in graph.neighbors(u) {
            let v = a.node as usize;
            if order.len() >= limit {
                return order;
            }
            if seen.insert(v) {
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    order
}

fn specific(graph: &DataGraph, idx: usize, id: String) -> SpecificNode {
    let node = graph.node(idx);
    SpecificNode {
        id,
        node_type: node.node_type.clone(),
        label: node.label.clone(),
    }
}

/// A random star query around a random node: its type becomes the query
/// type, and `anchors` distinct nearby nodes of other types become specific
/// nodes. Returns `None` when the neighbourhood is too small.
pub fn random_star_query(graph: &DataGraph, anchors: usize, rng: &mut impl Rng) -> Option<QueryGraph> {
    if graph.node_count() == 0 {
        return None;
    }
    let center = rng.gen_range(0..graph.node_count());
    let ty = graph.node(center).node_type.clone();
    let mut pool: Vec<usize> = nearby(graph, center, 64)
        .into_iter()
        .filter(|&i| graph.node(i).node_type != ty)
        .collect();
    if pool.len() < anchors {
        return None;
    }
    pool.shuffle(rng);
    let specifics = pool[..anchors]
        .iter()
        .enumerate()
        .map(|(i, &idx)| specific(graph, idx, format!("s{i}")))
        .collect();
    Some(QueryGraph::star(
        QueryNode {
            id: "q0".into(),
            node_type: ty,
        },
        specifics,
    ))
}

/// A random general query: `query_nodes` typed after distinct nearby nodes
/// and joined into a random tree, and `specifics` nearby anchors assigned to
/// query nodes round-robin (query nodes past `specifics` get none).
pub fn random_general_query(
    graph: &DataGraph,
    specifics: usize,
    query_nodes: usize,
    rng: &mut impl Rng,
) -> Option<QueryGraph> {
    if graph.node_count() == 0 || query_nodes == 0 || specifics == 0 {
        return None;
    }
    let seed = rng.gen_range(0..graph.node_count());
    let mut pool = nearby(graph, seed, 64 + 4 * (specifics + query_nodes));
    if pool.len() < specifics + query_nodes {
        return None;
    }
    pool.shuffle(rng);
    let qnodes: Vec<QueryNode> = pool[..query_nodes]
        .iter()
        .enumerate()
        .map(|(i, &idx)| QueryNode {
            id: format!("q{i}"),
            node_type: graph.node(idx).node_type.clone(),
        })
        .collect();
    let mut edges = Vec::new();
    for i in 1..query_nodes {
        let j = rng.gen_range(0..i);
        edges.push((format!("q{j}"), format!("q{i}")));
    }
    let anchors: Vec<SpecificNode> = pool[query_nodes..query_nodes + specifics]
        .iter()
        .enumerate()
        .map(|(i, &idx)| specific(graph, idx, format!("s{i}")))
        .collect();
    for (i, s) in anchors.iter().enumerate() {
        edges.push((s.id.clone(), format!("q{}", i % query_nodes)));
    }
    Some(QueryGraph {
        specific_nodes: anchors,
        query_nodes: qnodes,
        edges,
    })
}
