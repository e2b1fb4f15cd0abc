use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fig1() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/fig1")
}

fn hhin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hhin")).args(args).output().unwrap()
}

fn graph_args(dir: &Path) -> Vec<String> {
    ["nodes.tsv", "edges.tsv", "schema.json"]
        .iter()
        .zip(["--nodes", "--edges", "--schema"])
        .flat_map(|(f, flag)| [flag.to_string(), dir.join(f).display().to_string()])
        .collect()
}

fn run(dir: &Path, cmd: &str, query: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd.to_string()];
    args.extend(graph_args(dir));
    args.push("--query".into());
    args.push(query.display().to_string());
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    hhin(&refs)
}

#[test]
fn star_query_ranks_products() {
    let dir = fig1();
    let out = run(&dir, "query", &dir.join("query.json"), &["--k", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].contains("p=P1(1)"));
    assert!(lines[1].contains("p=P3(3)"));
}

#[test]
fn machine_output_is_byte_stable_and_agrees_with_oracle() {
    let dir = fig1();
    let q = dir.join("query.json");
    let a = run(&dir, "query", &q, &["--k", "5", "--format", "machine"]);
    let b = run(&dir, "query", &q, &["--k", "5", "--format", "machine"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let engine: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let oracle = run(&dir, "oracle", &q, &["--k", "5", "--format", "machine"]);
    let oracle: serde_json::Value = serde_json::from_slice(&oracle.stdout).unwrap();
    assert_eq!(engine["results"], oracle["results"]);
    assert_eq!(engine["config"]["ks"], 10);
    assert!(engine["stats"]["stars"][0]["visitedNodes"].as_u64().unwrap() > 0);
}

#[test]
fn missing_anchor_exits_with_two() {
    let dir = fig1();
    let tmp = tempfile::tempdir().unwrap();
    let q = tmp.path().join("q.json");
    let text = fs::read_to_string(dir.join("query.json")).unwrap().replace("\"V1\"", "\"V9\"");
    fs::write(&q, text).unwrap();
    let out = run(&dir, "query", &q, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("anchor not found (v)"));
}

#[test]
fn malformed_edge_file_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    for f in ["nodes.tsv", "schema.json", "query.json"] {
        fs::copy(fig1().join(f), tmp.path().join(f)).unwrap();
    }
    fs::write(tmp.path().join("edges.tsv"), "10\t1\tN\n10\t99\tN\n").unwrap();
    let out = run(tmp.path(), "query", &tmp.path().join("query.json"), &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("edges.tsv:2:4: unknown node id 99"));
}

#[test]
fn invalid_parameters_exit_with_one() {
    let dir = fig1();
    let q = dir.join("query.json");
    assert_eq!(run(&dir, "query", &q, &["--alpha", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&dir, "query", &q, &["--k", "4", "--ks", "2"]).status.code(), Some(1));
    assert_eq!(run(&dir, "query", &q, &["--k", "0"]).status.code(), Some(1));
}

#[test]
fn validate_reports_cross_type_hierarchy() {
    let tmp = tempfile::tempdir().unwrap();
    for f in ["nodes.tsv", "edges.tsv", "schema.json"] {
        fs::copy(fig1().join(f), tmp.path().join(f)).unwrap();
    }
    let mut edges = fs::read_to_string(tmp.path().join("edges.tsv")).unwrap();
    edges.push_str("1\t20\tH\n");
    fs::write(tmp.path().join("edges.tsv"), edges).unwrap();
    let mut args = vec!["validate".to_string()];
    args.extend(graph_args(tmp.path()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = hhin(&refs);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("hierarchy edge across types: 1->20"));

    let mut args = vec!["validate".to_string()];
    args.extend(graph_args(&fig1()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    assert!(hhin(&refs).status.success());
}

#[test]
fn generated_bundle_validates_and_answers_its_queries() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("g");
    let out = hhin(&[
        "generate",
        "--out",
        out_dir.to_str().unwrap(),
        "--node-count",
        "300",
        "--avg-degree",
        "4",
        "--seed",
        "9",
        "--queries",
        "3",
        "--specifics",
        "2",
        "--query-nodes",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut args = vec!["validate".to_string()];
    args.extend(graph_args(&out_dir));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    assert!(hhin(&refs).status.success());
    for i in 0..3 {
        let q = out_dir.join(format!("query-{i}.json"));
        let engine = run(&out_dir, "query", &q, &["--k", "3", "--ks", "all", "--format", "machine"]);
        let oracle = run(&out_dir, "oracle", &q, &["--k", "3", "--format", "machine"]);
        assert!(engine.status.success() && oracle.status.success());
        let e: serde_json::Value = serde_json::from_slice(&engine.stdout).unwrap();
        let o: serde_json::Value = serde_json::from_slice(&oracle.stdout).unwrap();
        assert_eq!(e["results"], o["results"], "query {i}");
    }
}
