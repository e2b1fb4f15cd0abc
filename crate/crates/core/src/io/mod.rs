//! Files on disk: graph bundles, query files and result documents.

mod bundle;
mod document;
mod query_file;

use std::path::PathBuf;

use thiserror::Error;

use crate::model::{QueryError, ValidationReport};

pub use bundle::{
    edges_tsv, load_bundle, nodes_tsv, parse_edges, parse_nodes, parse_schema, save_bundle,
    schema_json, EdgeLists, GraphBundle,
};
pub use document::{format_float, match_results, render_matches, round_sig, Document};
pub use query_file::{load_query, parse_query};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{file}:{line}:{column}: {message}")]
    Parse {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}: {source}")]
    Json {
        file: String,
        source: serde_json::Error,
    },
    #[error("{file}: {source}")]
    Query { file: String, source: QueryError },
    #[error("graph failed validation:\n{0}")]
    Invalid(ValidationReport),
}
