//! Scaling sweeps over synthetic networks: answer time against k, against
//! query size and against the fraction of the network loaded.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::general::{gqh, GeneralError, GeneralOptions, GeneralResult};
use crate::model::{DataGraph, NodeId, QueryGraph};
use crate::scoring::ScoringParams;
use crate::synthetic::{generate_synthetic, random_general_query, GenError, SyntheticConfig};

/// Attempts at drawing a random query before giving up on a cell.
const QUERY_ATTEMPTS: usize = 1000;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Query(#[from] GeneralError),
    #[error("could not draw a query with {specifics} specific and {query_nodes} query nodes")]
    NoQuery { specifics: usize, query_nodes: usize },
}

/// `(specific nodes, query nodes)`.
pub type QuerySize = (usize, usize);

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchConfig {
    pub graph: SyntheticConfig,
    pub reps: usize,
    pub params: ScoringParams,
    pub prune: bool,
    pub query_seed: u64,
    pub k_values: Vec<usize>,
    pub k_sweep_sizes: Vec<QuerySize>,
    pub query_sizes: Vec<QuerySize>,
    pub query_size_k: usize,
    pub fractions: Vec<f64>,
    pub fraction_size: QuerySize,
    pub fraction_k: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            graph: SyntheticConfig {
                nodes: 100_000,
                ..SyntheticConfig::default()
            },
            reps: 20,
            params: ScoringParams::default(),
            prune: true,
            query_seed: 7,
            k_values: vec![1, 2, 5, 10, 20, 30],
            k_sweep_sizes: vec![(2, 1), (4, 2), (6, 3)],
            query_sizes: vec![(2, 1), (4, 2), (6, 3), (10, 10)],
            query_size_k: 5,
            fractions: vec![0.1, 0.2, 0.5, 0.8, 1.0],
            fraction_size: (4, 2),
            fraction_k: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Sweep {
    K,
    QuerySize,
    Fraction,
}

impl Sweep {
    pub fn name(self) -> &'static str {
        match self {
            Sweep::K => "k",
            Sweep::QuerySize => "querySize",
            Sweep::Fraction => "fraction",
        }
    }
}

/// Identifies one cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Cell {
    pub sweep: Sweep,
    pub specifics: usize,
    pub query_nodes: usize,
    pub k: usize,
    pub fraction: f64,
}

/// One timed query.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRecord {
    #[serde(flatten)]
    pub cell: Cell,
    pub rep: usize,
    pub nodes: usize,
    pub edges: usize,
    pub millis: f64,
    pub visited: usize,
    pub pruned: usize,
    pub matches: usize,
}

/// Means over the repetitions of a cell.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CellSummary {
    #[serde(flatten)]
    pub cell: Cell,
    pub nodes: usize,
    pub edges: usize,
    pub runs: usize,
    pub mean_millis: f64,
    pub mean_visited: f64,
    pub mean_pruned: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub cells: Vec<CellSummary>,
}

fn draw_queries(graph: &DataGraph, size: QuerySize, reps: usize, seed: u64) -> Result<Vec<QueryGraph>, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((size.0 as u64) << 32) ^ size.1 as u64);
    let mut out = Vec::with_capacity(reps);
    let mut attempts = 0;
    while out.len() < reps {
        attempts += 1;
        if attempts > QUERY_ATTEMPTS * reps.max(1) {
            return Err(BenchError::NoQuery {
                specifics: size.0,
                query_nodes: size.1,
            });
        }
        if let Some(q) = random_general_query(graph, size.0, size.1, &mut rng) {
            out.push(q);
        }
    }
    Ok(out)
}

fn timed(
    graph: &DataGraph,
    schema: &crate::model::Schema,
    query: &QueryGraph,
    k: usize,
    config: &BenchConfig,
) -> Result<(f64, GeneralResult), BenchError> {
    let options = GeneralOptions {
        prune: config.prune,
        ..GeneralOptions::default()
    };
    let started = Instant::now();
    let res = gqh(graph, schema, query, k, &config.params, &options)?;
    Ok((started.elapsed().as_secs_f64() * 1e3, res))
}

fn record(cell: Cell, rep: usize, graph: &DataGraph, millis: f64, res: &GeneralResult) -> BenchRecord {
    BenchRecord {
        cell,
        rep,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        millis,
        visited: res.stats.stars.iter().map(|(_, s)| s.visited_nodes).sum(),
        pruned: res.stats.stars.iter().map(|(_, s)| s.pruned_nodes).sum(),
        matches: res.matches.len(),
    }
}

/// Nested node subsets: each fraction keeps a prefix of one fixed random
/// permutation, so smaller subgraphs are contained in larger ones.
pub fn nested_subgraphs(graph: &DataGraph, fractions: &[f64], seed: u64) -> Vec<DataGraph> {
    let mut order: Vec<NodeId> = graph.nodes().iter().map(|n| n.id).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    fractions
        .iter()
        .map(|&f| {
            let keep = ((graph.node_count() as f64 * f).round() as usize).min(order.len());
            let ids: HashSet<NodeId> = order[..keep].iter().copied().collect();
            graph.induced(|n| ids.contains(&n.id))
        })
        .collect()
}

/// Runs every sweep. `progress` receives one line per finished cell.
pub fn run_bench(config: &BenchConfig, progress: &mut dyn FnMut(&str)) -> Result<BenchReport, BenchError> {
    let (graph, schema) = generate_synthetic(&config.graph)?;
    let mut records = Vec::new();

    // k sweep: per repetition, every k runs on the same query.
    for &size in &config.k_sweep_sizes {
        let queries = draw_queries(&graph, size, config.reps, config.query_seed)?;
        timed(&graph, &schema, &queries[0], 1, config)?;
        for (rep, q) in queries.iter().enumerate() {
            for &k in &config.k_values {
                let (ms, res) = timed(&graph, &schema, q, k, config)?;
                let cell = Cell {
                    sweep: Sweep::K,
                    specifics: size.0,
                    query_nodes: size.1,
                    k,
                    fraction: 1.0,
                };
                records.push(record(cell, rep, &graph, ms, &res));
            }
        }
        progress(&format!("k sweep {}+{} done", size.0, size.1));
    }

    let sized: Vec<Vec<QueryGraph>> = config
        .query_sizes
        .iter()
        .map(|&s| draw_queries(&graph, s, config.reps, config.query_seed))
        .collect::<Result<_, _>>()?;
    for rep in 0..config.reps {
        for (&size, queries) in config.query_sizes.iter().zip(&sized) {
            let (ms, res) = timed(&graph, &schema, &queries[rep], config.query_size_k, config)?;
            let cell = Cell {
                sweep: Sweep::QuerySize,
                specifics: size.0,
                query_nodes: size.1,
                k: config.query_size_k,
                fraction: 1.0,
            };
            records.push(record(cell, rep, &graph, ms, &res));
        }
    }
    progress("query size sweep done");

    // Queries come from the smallest subgraph so they resolve in all of them.
    let subgraphs = nested_subgraphs(&graph, &config.fractions, config.graph.seed ^ 0x5eed);
    drop(graph);
    let smallest = config
        .fractions
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i);
    if let Some(smallest) = smallest {
        let queries = draw_queries(&subgraphs[smallest], config.fraction_size, config.reps, config.query_seed)?;
        for (rep, q) in queries.iter().enumerate() {
            for (&fraction, sub) in config.fractions.iter().zip(&subgraphs) {
                let (ms, res) = timed(sub, &schema, q, config.fraction_k, config)?;
                let cell = Cell {
                    sweep: Sweep::Fraction,
                    specifics: config.fraction_size.0,
                    query_nodes: config.fraction_size.1,
                    k: config.fraction_k,
                    fraction,
                };
                records.push(record(cell, rep, sub, ms, &res));
            }
        }
        progress("fraction sweep done");
    }

    let cells = summarize(&records);
    Ok(BenchReport { records, cells })
}

fn summarize(records: &[BenchRecord]) -> Vec<CellSummary> {
    let mut cells: Vec<CellSummary> = Vec::new();
    for r in records {
        let existing = cells.iter_mut().find(|c| c.cell == r.cell);
        let c = match existing {
            Some(c) => c,
            None => {
                cells.push(CellSummary {
                    cell: r.cell,
                    nodes: r.nodes,
                    edges: r.edges,
                    runs: 0,
                    mean_millis: 0.0,
                    mean_visited: 0.0,
                    mean_pruned: 0.0,
                });
                cells.last_mut().unwrap()
            }
        };
        c.runs += 1;
        c.mean_millis += r.millis;
        c.mean_visited += r.visited as f64;
        c.mean_pruned += r.pruned as f64;
    }
    for c in &mut cells {
        let n = c.runs as f64;
        c.mean_millis /= n;
        c.mean_visited /= n;
        c.mean_pruned /= n;
    }
    cells
}

impl BenchReport {
    /// Cells of one sweep and query size, in sweep order.
    pub fn series(&self, sweep: Sweep, size: QuerySize) -> Vec<&CellSummary> {
        self.cells
            .iter()
            .filter(|c| c.cell.sweep == sweep && (c.cell.specifics, c.cell.query_nodes) == size)
            .collect()
    }

    pub fn records_tsv(&self) -> String {
        let mut out = String::from("sweep\tspecifics\tqueryNodes\tk\tfraction\trep\tnodes\tedges\tmillis\tvisited\tpruned\tmatches\n");
        for r in &self.records {
            let c = &r.cell;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\t{}\t{}",
                c.sweep.name(),
                c.specifics,
                c.query_nodes,
                c.k,
                c.fraction,
                r.rep,
                r.nodes,
                r.edges,
                r.millis,
                r.visited,
                r.pruned,
                r.matches
            );
        }
        out
    }

    pub fn summary_tsv(&self) -> String {
        let mut out = String::from("sweep\tspecifics\tqueryNodes\tk\tfraction\tnodes\tedges\truns\tmeanMillis\tmeanVisited\tmeanPruned\n");
        for s in &self.cells {
            let c = &s.cell;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{:.1}\t{:.1}",
                c.sweep.name(),
                c.specifics,
                c.query_nodes,
                c.k,
                c.fraction,
                s.nodes,
                s.edges,
                s.runs,
                s.mean_millis,
                s.mean_visited,
                s.mean_pruned
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            graph: SyntheticConfig {
                nodes: 2000,
                ..SyntheticConfig::default()
            },
            reps: 2,
            k_values: vec![1, 5],
            k_sweep_sizes: vec![(2, 1)],
            query_sizes: vec![(2, 1), (4, 2)],
            fractions: vec![0.2, 1.0],
            ..BenchConfig::default()
        }
    }

    #[test]
    fn every_cell_is_filled() {
        let mut lines = 0;
        let report = run_bench(&small(), &mut |_| lines += 1).unwrap();
        assert_eq!(lines, 3);
        assert_eq!(report.records.len(), 2 * 2 + 2 * 2 + 2 * 2);
        assert_eq!(report.cells.len(), 2 + 2 + 2);
        assert!(report.cells.iter().all(|c| c.runs == 2));
        assert_eq!(report.series(Sweep::K, (2, 1)).len(), 2);
        assert_eq!(report.records_tsv().lines().count(), 13);
        assert_eq!(report.summary_tsv().lines().count(), 7);
    }

    #[test]
    fn subgraphs_are_nested() {
        let (g, _) = generate_synthetic(&SyntheticConfig {
            nodes: 500,
            ..SyntheticConfig::default()
        })
        .unwrap();
        let subs = nested_subgraphs(&g, &[0.1, 0.5, 1.0], 3);
        assert_eq!(subs[0].node_count(), 50);
        assert_eq!(subs[2].node_count(), 500);
        for n in subs[0].nodes() {
            assert!(subs[1].index_of(n.id).is_some());
        }
    }
}
