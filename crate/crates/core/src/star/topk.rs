use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use crate::model::NodeId;
use crate::scoring::MatchingScore;

/// A candidate offered to the queue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub node: NodeId,
    pub score: MatchingScore,
}

impl Candidate {
    /// A candidate whose bounds have closed on `s`.
    pub fn exact(node: NodeId, s: f64) -> Self {
        Candidate {
            node,
            score: MatchingScore {
                s,
                s_lower: s,
                s_upper: s,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Inserted,
    /// Took the place of the evicted k-th entry.
    Replaced(NodeId),
    /// Upper bound below the k-th lower bound.
    Pruned,
    Rejected,
}

/// Rank order: score descending, node id ascending.
#[derive(Debug, Clone, Copy)]
struct Rank {
    s: f64,
    node: NodeId,
}

impl Ord for Rank {
    fn cmp(&self, other: &Self) -> Ordering {
        other.s.total_cmp(&self.s).then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for Rank {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Rank {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Rank {}

#[derive(Debug, Clone, Copy)]
struct Lower(f64, NodeId);

impl Ord for Lower {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl PartialOrd for Lower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Lower {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Lower {}

/// Bounded set of the best `capacity` candidates.
#[derive(Debug, Clone)]
pub struct TopKQueue {
    capacity: usize,
    ranks: BTreeSet<Rank>,
    lowers: BTreeSet<Lower>,
    entries: HashMap<NodeId, Candidate>,
}

impl TopKQueue {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "top-k capacity must be positive");
        TopKQueue {
            capacity,
            ranks: BTreeSet::new(),
            lowers: BTreeSet::new(),
            entries: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    /// Smallest lower bound among the entries, once the queue is full.
    pub fn kth_lower(&self) -> Option<f64> {
        if self.is_full() {
            self.lowers.first().map(|l| l.0)
        } else {
            None
        }
    }

    /// The worst-ranked entry.
    pub fn kth(&self) -> Option<&Candidate> {
        self.ranks.last().map(|r| &self.entries[&r.node])
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.entries.contains_key(&node)
    }

    fn insert(&mut self, c: Candidate) {
        self.ranks.insert(Rank {
            s: c.score.s,
            node: c.node,
        });
        self.lowers.insert(Lower(c.score.s_lower, c.node));
        self.entries.insert(c.node, c);
    }

    fn remove(&mut self, node: NodeId) -> Option<Candidate> {
        let c = self.entries.remove(&node)?;
        self.ranks.remove(&Rank {
            s: c.score.s,
            node,
        });
        self.lowers.remove(&Lower(c.score.s_lower, node));
        Some(c)
    }

    /// The top-k emergence test.
    pub fn offer(&mut self, c: Candidate) -> Admission {
        if self.contains(c.node) {
            return Admission::Rejected;
        }
        if !self.is_full() {
            self.insert(c);
            return Admission::Inserted;
        }
        let kth_lower = self.kth_lower().unwrap();
        let kth = *self.kth().unwrap();
        let ahead = Rank {
            s: c.score.s,
            node: c.node,
        } < Rank {
            s: kth.score.s,
            node: kth.node,
        };
        if c.score.s_upper >= kth_lower && ahead {
            self.remove(kth.node);
            self.insert(c);
            Admission::Replaced(kth.node)
        } else if c.score.s_upper < kth_lower {
            Admission::Pruned
        } else {
            Admission::Rejected
        }
    }

    /// Entries best first.
    pub fn ranked(&self) -> Vec<Candidate> {
        self.ranks.iter().map(|r| self.entries[&r.node]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(node: u64, s: f64, lo: f64, hi: f64) -> Candidate {
        Candidate {
            node: NodeId(node),
            score: MatchingScore {
                s,
                s_lower: lo,
                s_upper: hi,
            },
        }
    }

    #[test]
    fn fills_below_capacity() {
        let mut q = TopKQueue::new(2);
        assert_eq!(q.offer(cand(1, 0.9, 0.9, 0.9)), Admission::Inserted);
        assert_eq!(q.kth_lower(), None);
        assert_eq!(q.offer(cand(2, 0.5, 0.5, 0.5)), Admission::Inserted);
        let nodes: Vec<u64> = q.ranked().iter().map(|c| c.node.0).collect();
        assert_eq!(nodes, [1, 2]);
        assert_eq!(q.kth_lower(), Some(0.5));
    }

    #[test]
    fn prunes_below_kth_lower() {
        let mut q = TopKQueue::new(1);
        q.offer(cand(1, 0.6, 0.6, 0.6));
        assert_eq!(q.offer(cand(2, 0.5, 0.5, 0.55)), Admission::Pruned);
        assert_eq!(q.len(), 1);
        assert!(q.contains(NodeId(1)));
    }

    #[test]
    fn evicts_dominated_kth() {
        let mut q = TopKQueue::new(2);
        q.offer(cand(1, 0.9, 0.9, 0.9));
        q.offer(cand(2, 0.6, 0.6, 0.6));
        assert_eq!(q.offer(cand(3, 0.8, 0.7, 0.9)), Admission::Replaced(NodeId(2)));
        let nodes: Vec<u64> = q.ranked().iter().map(|c| c.node.0).collect();
        assert_eq!(nodes, [1, 3]);
        assert_eq!(q.kth_lower(), Some(0.7));
    }

    #[test]
    fn ties_go_to_smaller_id() {
        let mut q = TopKQueue::new(1);
        q.offer(cand(5, 0.5, 0.5, 0.5));
        assert_eq!(q.offer(cand(7, 0.5, 0.5, 0.5)), Admission::Rejected);
        assert_eq!(q.offer(cand(3, 0.5, 0.5, 0.5)), Admission::Replaced(NodeId(5)));
    }
}
