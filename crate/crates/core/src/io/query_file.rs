use std::path::Path;

use crate::model::QueryGraph;

use super::bundle::read;
use super::IoError;

/// Parses a query graph and checks its structure.
pub fn parse_query(text: &str, file: &str) -> Result<QueryGraph, IoError> {
    let q: QueryGraph = serde_json::from_str(text).map_err(|source| IoError::Json {
        file: file.to_string(),
        source,
    })?;
    q.check().map_err(|source| IoError::Query {
        file: file.to_string(),
        source,
    })?;
    Ok(q)
}

pub fn load_query(path: &Path) -> Result<QueryGraph, IoError> {
    parse_query(&read(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_query_parses() {
        let q = parse_query(
            r#"{"specificNodes":[{"id":"v","type":"Vulnerability","label":"V1"}],
                "queryNodes":[{"id":"p","type":"Product"}],
                "edges":[["v","p"]]}"#,
            "q.json",
        )
        .unwrap();
        assert_eq!(q.query_nodes[0].id, "p");
        assert_eq!(q.edges, vec![("v".to_string(), "p".to_string())]);
    }

    #[test]
    fn disconnected_query_is_rejected() {
        let err = parse_query(
            r#"{"specificNodes":[{"id":"v","type":"A","label":"x"}],
                "queryNodes":[{"id":"p","type":"B"}],"edges":[]}"#,
            "q.json",
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "q.json: query graph must be connected");
    }

    #[test]
    fn bad_json_reports_position() {
        let err = parse_query("{\"specificNodes\": [", "q.json").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }
}
