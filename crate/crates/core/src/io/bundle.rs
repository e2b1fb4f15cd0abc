use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::model::{validate_graph, DataGraph, Node, NodeId, Schema};

use super::IoError;

/// A loaded and validated graph with its schema.
#[derive(Debug, Clone)]
pub struct GraphBundle {
    pub nodes_path: PathBuf,
    pub edges_path: PathBuf,
    pub schema_path: PathBuf,
    pub graph: DataGraph,
    pub schema: Schema,
}

pub(crate) fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Tab-separated fields of a line with their 1-based start columns.
fn fields(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut col = 1;
    for f in line.split('\t') {
        out.push((col, f));
        col += f.chars().count() + 1;
    }
    out
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

pub fn parse_schema(text: &str, file: &str) -> Result<Schema, IoError> {
    serde_json::from_str(text).map_err(|source| IoError::Json {
        file: file.to_string(),
        source,
    })
}

/// Parses `id<TAB>type<TAB>label` rows. Types must be declared in `schema`.
pub fn parse_nodes(text: &str, file: &str, schema: &Schema) -> Result<Vec<Node>, IoError> {
    let err = |line, column, message: String| IoError::Parse {
        file: file.to_string(),
        line,
        column,
        message,
    };
    let mut nodes = Vec::new();
    let mut seen = HashSet::new();
    for (line, row) in rows(text) {
        let f = fields(row);
        if f.len() != 3 {
            return Err(err(line, 1, format!("expected 3 tab-separated fields, found {}", f.len())));
        }
        let id: u64 = f[0]
            .1
            .trim()
            .parse()
            .map_err(|_| err(line, f[0].0, format!("invalid node id {:?}", f[0].1)))?;
        if !seen.insert(id) {
            return Err(err(line, f[0].0, format!("duplicate node id {id}")));
        }
        let ty = f[1].1.trim();
        if !schema.node_types.contains(ty) {
            return Err(err(line, f[1].0, format!("unknown type name {ty:?}")));
        }
        nodes.push(Node::new(id, ty, f[2].1));
    }
    Ok(nodes)
}

pub type EdgeLists = (Vec<(NodeId, NodeId)>, Vec<(NodeId, NodeId)>);

/// Parses `src<TAB>dst<TAB>kind` rows, kind `N` (normal) or `H` (hierarchy,
/// parent to child). Endpoints must be in `known`.
pub fn parse_edges(text: &str, file: &str, known: &HashSet<NodeId>) -> Result<EdgeLists, IoError> {
    let err = |line, column, message: String| IoError::Parse {
        file: file.to_string(),
        line,
        column,
        message,
    };
    let mut normal = Vec::new();
    let mut hierarchy = Vec::new();
    for (line, row) in rows(text) {
        let f = fields(row);
        if f.len() != 3 {
            return Err(err(line, 1, format!("expected 3 tab-separated fields, found {}", f.len())));
        }
        let mut ends = [NodeId(0); 2];
        for (slot, &(col, raw)) in ends.iter_mut().zip(&f[..2]) {
            let id: u64 = raw
                .trim()
                .parse()
                .map_err(|_| err(line, col, format!("invalid node id {raw:?}")))?;
            if !known.contains(&NodeId(id)) {
                return Err(err(line, col, format!("unknown node id {id}")));
            }
            *slot = NodeId(id);
        }
        match f[2].1.trim() {
            "N" => normal.push((ends[0], ends[1])),
            "H" => hierarchy.push((ends[0], ends[1])),
            other => {
                return Err(err(line, f[2].0, format!("edge kind must be N or H, got {other:?}")))
            }
        }
    }
    Ok((normal, hierarchy))
}

/// Reads, parses and validates a bundle.
pub fn load_bundle(nodes: &Path, edges: &Path, schema: &Path) -> Result<GraphBundle, IoError> {
    let schema_text = read(schema)?;
    let parsed_schema = parse_schema(&schema_text, &schema.display().to_string())?;
    let node_list = parse_nodes(&read(nodes)?, &nodes.display().to_string(), &parsed_schema)?;
    let known: HashSet<NodeId> = node_list.iter().map(|n| n.id).collect();
    let (normal, hierarchy) = parse_edges(&read(edges)?, &edges.display().to_string(), &known)?;
    let graph = DataGraph::new(node_list, normal, hierarchy);
    let report = validate_graph(&graph, &parsed_schema);
    if !report.is_valid() {
        return Err(IoError::Invalid(report));
    }
    Ok(GraphBundle {
        nodes_path: nodes.to_path_buf(),
        edges_path: edges.to_path_buf(),
        schema_path: schema.to_path_buf(),
        graph,
        schema: parsed_schema,
    })
}

pub fn nodes_tsv(graph: &DataGraph) -> String {
    let mut out = String::from("# id\ttype\tlabel\n");
    for n in graph.nodes() {
        let _ = writeln!(out, "{}\t{}\t{}", n.id, n.node_type, n.label);
    }
    out
}

pub fn edges_tsv(graph: &DataGraph) -> String {
    let mut out = String::from("# src\tdst\tkind\n");
    for (a, b) in graph.normal_edges() {
        let _ = writeln!(out, "{a}\t{b}\tN");
    }
    for (a, b) in graph.hierarchy_edges() {
        let _ = writeln!(out, "{a}\t{b}\tH");
    }
    out
}

pub fn schema_json(schema: &Schema) -> String {
    let mut s = serde_json::to_string_pretty(schema).expect("schema serializes");
    s.push('\n');
    s
}

/// Writes `nodes.tsv`, `edges.tsv` and `schema.json` into `dir`.
pub fn save_bundle(dir: &Path, graph: &DataGraph, schema: &Schema) -> Result<(), IoError> {
    fs::create_dir_all(dir).map_err(|source| IoError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write(&dir.join("nodes.tsv"), &nodes_tsv(graph))?;
    write(&dir.join("edges.tsv"), &edges_tsv(graph))?;
    write(&dir.join("schema.json"), &schema_json(schema))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> Schema {
        Schema {
            node_types: ["Product", "Site"].map(String::from).into(),
            ..Schema::default()
        }
    }

    #[test]
    fn minimal_bundle_parses() {
        let nodes = parse_nodes("# header\n1\tProduct\tP1\n\n2\tSite\tS 1\n", "n", &schema()).unwrap();
        assert_eq!(nodes.len(), 2);
        assert_eq!(nodes[1].label, "S 1");
        let known = nodes.iter().map(|n| n.id).collect();
        let (normal, hier) = parse_edges("1\t2\tN\n", "e", &known).unwrap();
        assert_eq!(normal, vec![(NodeId(1), NodeId(2))]);
        assert!(hier.is_empty());
    }

    #[test]
    fn saved_bundle_loads_back() {
        let dir = tempfile::tempdir().unwrap();
        let graph = DataGraph::new(
            vec![Node::new(1, "Product", "P1"), Node::new(2, "Product", "P2"), Node::new(3, "Site", "S1")],
            vec![(NodeId(3), NodeId(1))],
            vec![(NodeId(1), NodeId(2))],
        );
        let mut schema = schema();
        schema.inherited_types.insert("Product".into());
        save_bundle(dir.path(), &graph, &schema).unwrap();
        let b = load_bundle(
            &dir.path().join("nodes.tsv"),
            &dir.path().join("edges.tsv"),
            &dir.path().join("schema.json"),
        )
        .unwrap();
        assert_eq!(b.graph, graph);
        assert_eq!(b.schema, schema);
    }

    #[test]
    fn missing_endpoint_names_line_and_column() {
        let known = [NodeId(1), NodeId(2)].into();
        let err = parse_edges("1\t2\tN\n1\t99\tN\n", "edges.tsv", &known).unwrap_err();
        assert_eq!(err.to_string(), "edges.tsv:2:3: unknown node id 99");
    }

    #[test]
    fn malformed_rows() {
        let err = parse_nodes("1\tPlanet\tX\n", "nodes.tsv", &schema()).unwrap_err();
        assert_eq!(err.to_string(), "nodes.tsv:1:3: unknown type name \"Planet\"");
        let err = parse_nodes("x\tProduct\tX\n", "nodes.tsv", &schema()).unwrap_err();
        assert!(err.to_string().starts_with("nodes.tsv:1:1: invalid node id"));
        let err = parse_nodes("1\tProduct\n", "nodes.tsv", &schema()).unwrap_err();
        assert!(err.to_string().contains("expected 3 tab-separated fields"));
        let known = [NodeId(1), NodeId(2)].into();
        let err = parse_edges("1\t2\tX\n", "e", &known).unwrap_err();
        assert_eq!(err.to_string(), "e:1:5: edge kind must be N or H, got \"X\"");
    }
}
