//! Closeness, matching scores and their iterative bounds.
//!
//! Closeness between two nodes decays geometrically with path length:
//! `alpha^(l - beta * h)`, where `l` counts hops and `h` counts the hierarchy
//! hops on the path that fall under an inheritance pair. Equivalently every
//! normal edge costs 1 and every discounted hierarchy edge costs `1 - beta`,
//! and closeness is `alpha^cost`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoringParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for ScoringParams {
    fn default() -> Self {
        ScoringParams {
            alpha: 0.5,
            beta: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("alpha must be in (0, 1], got {0}")]
    Alpha(f64),
    #[error("beta must be in [0, 1), got {0}")]
    Beta(f64),
    #[error("star query has no anchors")]
    NoAnchors,
}

impl ScoringParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, ScoreError> {
        let p = ScoringParams { alpha, beta };
        p.check()?;
        Ok(p)
    }

    /// Rejects out-of-range parameters. `beta >= alpha` is accepted; see
    /// [`ScoringParams::warnings`].
    pub fn check(&self) -> Result<(), ScoreError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ScoreError::Alpha(self.alpha));
        }
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return Err(ScoreError::Beta(self.beta));
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.beta >= self.alpha {
            out.push(format!(
                "beta ({}) is not smaller than alpha ({})",
                self.beta, self.alpha
            ));
        }
        out
    }

    /// Traversal cost of one edge.
    pub fn edge_cost(&self, discounted_hierarchy: bool) -> f64 {
        if discounted_hierarchy {
            1.0 - self.beta
        } else {
            1.0
        }
    }

    pub fn closeness_from_cost(&self, cost: f64) -> f64 {
        self.alpha.powf(cost)
    }
}

/// Hop count `l` and signed hierarchy hop count `h` of a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStats {
    pub l: u32,
    pub h: i32,
}

impl PathStats {
    pub fn is_valid(&self) -> bool {
        self.h.unsigned_abs() <= self.l
    }
}

/// Per-anchor closeness with its bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosenessScore {
    pub r: f64,
    pub r_lower: f64,
    pub r_upper: f64,
}

/// Aggregate matching score of a candidate with its bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchingScore {
    pub s: f64,
    pub s_lower: f64,
    pub s_upper: f64,
}

pub fn closeness(stats: PathStats, params: &ScoringParams, inheritance_pair: bool) -> f64 {
    if stats.l == 0 {
        return 1.0;
    }
    let l = stats.l as f64;
    if inheritance_pair {
        params.alpha.powf(l - params.beta * stats.h.unsigned_abs() as f64)
    } else {
        params.alpha.powf(l)
    }
}

pub fn star_score(per_anchor: &[f64]) -> Result<f64, ScoreError> {
    if per_anchor.is_empty() {
        return Err(ScoreError::NoAnchors);
    }
    Ok(per_anchor.iter().sum())
}

/// One propagation step of the lower bound: a node keeps a positive lower
/// bound, otherwise it inherits its parent's bound scaled by one edge.
pub fn lower_bound_step(
    prev_lower_of_u: f64,
    prev_lower_of_parent: f64,
    edge_is_hierarchy: bool,
    params: &ScoringParams,
) -> f64 {
    if prev_lower_of_u > 0.0 {
        return prev_lower_of_u;
    }
    params.alpha.powf(params.edge_cost(edge_is_hierarchy)) * prev_lower_of_parent
}

/// Upper bound after `t` rounds: closed at the lower bound once positive,
/// otherwise the best closeness still possible for a node more than `t`
/// steps away.
pub fn upper_bound_step(
    current_lower_of_u: f64,
    t: u32,
    params: &ScoringParams,
    applicable: bool,
) -> f64 {
    if current_lower_of_u > 0.0 {
        return current_lower_of_u;
    }
    params.alpha.powf(t as f64 * params.edge_cost(applicable))
}

pub fn aggregate_bounds(per_anchor: &[(f64, f64)]) -> MatchingScore {
    let s_lower: f64 = per_anchor.iter().map(|b| b.0).sum();
    let s_upper: f64 = per_anchor.iter().map(|b| b.1).sum();
    let s = if s_lower == s_upper { s_lower } else { 0.0 };
    MatchingScore {
        s,
        s_lower,
        s_upper,
    }
}

pub fn general_score(star_scores: &[f64], pairwise: &[f64]) -> f64 {
    star_scores.iter().sum::<f64>() + pairwise.iter().sum::<f64>()
}
