//! Resumable uniform-cost search over a [`DataGraph`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::model::{DataGraph, EdgeKind};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    cost: f64,
    node: u32,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source uniform-cost search that can be advanced in steps.
///
/// Normal edges cost 1. Hierarchy edges cost `1 - beta` when their node type
/// is marked in `discounted`, else 1.
#[derive(Debug, Clone)]
pub struct Ucs {
    source: usize,
    discounted: Vec<bool>,
    hier_cost: f64,
    dist: Vec<f64>,
    hops: Vec<u32>,
    settled: Vec<bool>,
    heap: BinaryHeap<Frontier>,
    settled_count: usize,
}

impl Ucs {
    /// `discounted` is indexed by [`TypeIdx`](crate::model::TypeIdx).
    pub fn new(graph: &DataGraph, source: usize, discounted: Vec<bool>, beta: f64) -> Self {
        let n = graph.node_count();
        let mut dist = vec![f64::INFINITY; n];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Frontier {
            cost: 0.0,
            node: source as u32,
        });
        Ucs {
            source,
            discounted,
            hier_cost: 1.0 - beta,
            dist,
            hops: vec![0; n],
            settled: vec![false; n],
            heap,
            settled_count: 0,
        }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Smallest step any edge can cost from this source.
    pub fn min_step(&self) -> f64 {
        if self.discounted.iter().any(|&d| d) {
            self.hier_cost
        } else {
            1.0
        }
    }

    fn drop_stale(&mut self) {
        while let Some(top) = self.heap.peek() {
            if self.settled[top.node as usize] || top.cost > self.dist[top.node as usize] {
                self.heap.pop();
            } else {
                break;
            }
        }
    }

    /// Cost of the next node to settle, if any.
    pub fn peek_cost(&mut self) -> Option<f64> {
        self.drop_stale();
        self.heap.peek().map(|f| f.cost)
    }

    pub fn is_exhausted(&mut self) -> bool {
        self.peek_cost().is_none()
    }

    /// Settles the next node and relaxes its edges.
    pub fn settle_next(&mut self, graph: &DataGraph) -> Option<usize> {
        self.drop_stale();
        let Frontier { cost, node } = self.heap.pop()?;
        let u = node as usize;
        self.settled[u] = true;
        self.settled_count += 1;
        for adj in graph.neighbors(u) {
            let v = adj.node as usize;
            if self.settled[v] {
                continue;
            }
            let discounted = adj.kind == EdgeKind::Hierarchy
                && self.discounted[graph.type_of(v).0 as usize];
            let next = cost + if discounted { self.hier_cost } else { 1.0 };
            if next < self.dist[v] {
                self.dist[v] = next;
                self.hops[v] = self.hops[u] + discounted as u32;
                self.heap.push(Frontier { cost: next, node: v as u32 });
            }
        }
        Some(u)
    }

    /// Settles every node with cost at most `limit`, calling `on_settle` for
    /// each in settlement order.
    pub fn settle_until(&mut self, graph: &DataGraph, limit: f64, mut on_settle: impl FnMut(usize)) {
        while let Some(c) = self.peek_cost() {
            if c > limit {
                break;
            }
            let u = self.settle_next(graph).unwrap();
            on_settle(u);
        }
    }

    pub fn dist(&self, node: usize) -> f64 {
        self.dist[node]
    }

    /// Discounted hierarchy hops on the best known path.
    pub fn hops(&self, node: usize) -> u32 {
        self.hops[node]
    }

    pub fn is_settled(&self, node: usize) -> bool {
        self.settled[node]
    }

    pub fn is_reached(&self, node: usize) -> bool {
        self.dist[node].is_finite()
    }

    pub fn settled_count(&self) -> usize {
        self.settled_count
    }
}

/// Per-type discount flags for hierarchy edges seen from a source of type
/// `source_type`: a type is discounted when it forms an inheritance pair with
/// the source.
pub fn anchor_discounts(graph: &DataGraph, schema: &crate::Schema, source_type: &str) -> Vec<bool> {
    (0..graph.type_count())
        .map(|t| {
            let name = graph.type_name(crate::model::TypeIdx(t as u32));
            schema.is_inheritance_pair(source_type, name)
        })
        .collect()
}
