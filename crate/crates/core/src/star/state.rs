use serde::Serialize;

use crate::scoring::{upper_bound_step, ScoringParams};
use crate::search::Ucs;

/// State of one (node, anchor) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateEntry {
    /// Best known path cost; infinite while unreached.
    pub sd: f64,
    /// Discounted hierarchy hops on that path.
    pub hd: u32,
    /// Closeness of the best known path, 0 while unreached.
    pub r: f64,
    pub r_lower: f64,
    pub r_upper: f64,
    pub settled: bool,
}

/// Read-only view of the per-(node, anchor) propagation state after one round.
pub struct VertexStateTable<'a> {
    pub(crate) round: u32,
    pub(crate) params: &'a ScoringParams,
    pub(crate) anchors: &'a [AnchorState],
}

/// One anchor's search with its round bookkeeping.
pub(crate) struct AnchorState {
    pub search: Ucs,
    pub applicable: bool,
    pub step: f64,
    /// Last round fully processed: everything with cost at most
    /// `horizon * step` is settled.
    pub horizon: u32,
    pub exhausted: bool,
    pub retired: bool,
}

impl AnchorState {
    pub fn is_active(&self) -> bool {
        !self.exhausted && !self.retired
    }

    /// Upper bound on the closeness of any node this anchor has not settled.
    pub fn unsettled_upper(&self, params: &ScoringParams) -> f64 {
        if self.exhausted {
            0.0
        } else {
            upper_bound_step(0.0, self.horizon, params, self.applicable)
        }
    }
}

impl VertexStateTable<'_> {
    /// Round counter of the search (bucket index, may skip empty buckets).
    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn anchor_count(&self) -> usize {
        self.anchors.len()
    }

    pub fn entry(&self, node: usize, anchor: usize) -> StateEntry {
        let a = &self.anchors[anchor];
        let sd = a.search.dist(node);
        let hd = a.search.hops(node);
        if a.search.is_settled(node) {
            let r = self.params.closeness_from_cost(sd);
            return StateEntry {
                sd,
                hd,
                r,
                r_lower: r,
                r_upper: r,
                settled: true,
            };
        }
        let r = if sd.is_finite() {
            self.params.closeness_from_cost(sd)
        } else {
            0.0
        };
        StateEntry {
            sd,
            hd,
            r,
            r_lower: r,
            r_upper: a.unsettled_upper(self.params),
            settled: false,
        }
    }
}
