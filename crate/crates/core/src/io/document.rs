use std::fmt::Write as _;

use serde_json::{json, Map, Number, Value};

use crate::model::{DataGraph, Match};

/// Significant digits kept for every float in a document.
pub const SIG_DIGITS: usize = 12;

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap()
}

/// Shortest decimal text of `x` rounded to [`SIG_DIGITS`] significant digits.
pub fn format_float(x: f64) -> String {
    let r = round_sig(x);
    if r.fract() == 0.0 && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else if r.abs() < 1e-4 || r.abs() >= 1e15 {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap());
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

/// Machine-readable output: `{config, results, stats}`.
///
/// Keys are emitted in sorted order and floats are rounded, so equal runs
/// produce identical bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub config: Value,
    pub results: Value,
    pub stats: Value,
}

impl Document {
    pub fn new(config: Value, results: Value, stats: Value) -> Self {
        Document {
            config,
            results,
            stats,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut top = Map::new();
        top.insert("config".into(), canonical(self.config.clone()));
        top.insert("results".into(), canonical(self.results.clone()));
        top.insert("stats".into(), canonical(self.stats.clone()));
        Value::Object(top)
    }

    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("document serializes");
        s.push('\n');
        s
    }
}

/// Ranked matches with each assigned node's type and label.
pub fn match_results(graph: &DataGraph, matches: &[Match]) -> Value {
    let rows = matches
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let assignment: Vec<Value> = m
                .assignment
                .iter()
                .map(|(q, id)| {
                    let node = graph.index_of(*id).map(|idx| graph.node(idx));
                    json!({
                        "queryNode": q,
                        "id": id.0,
                        "type": node.map(|n| n.node_type.as_str()),
                        "label": node.map(|n| n.label.as_str()),
                    })
                })
                .collect();
            json!({ "rank": i + 1, "score": m.score, "assignment": assignment })
        })
        .collect();
    Value::Array(rows)
}

/// One line per match: rank, score and `query=label(id)` per query node.
pub fn render_matches(graph: &DataGraph, matches: &[Match]) -> String {
    if matches.is_empty() {
        return "no matches\n".into();
    }
    let mut out = String::new();
    for (i, m) in matches.iter().enumerate() {
        let _ = write!(out, "{:>3}  {:<14}", i + 1, format_float(m.score));
        for (q, id) in &m.assignment {
            let label = graph
                .index_of(*id)
                .map(|idx| graph.node(idx).label.as_str())
                .unwrap_or("?");
            let _ = write!(out, "  {q}={label}({id})");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Node, NodeId};

    #[test]
    fn floats_keep_twelve_digits() {
        assert_eq!(format_float(0.1 + 0.2), "0.3");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(2.0), "2");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(0.51795462969184), "0.517954629692");
        assert_eq!(format_float(1e-7 / 3.0), "3.33333333333e-8");
    }

    #[test]
    fn machine_output_is_stable() {
        let graph = DataGraph::new(vec![Node::new(1, "Product", "P1")], vec![], vec![]);
        let m = vec![Match {
            assignment: vec![("p".into(), NodeId(1))],
            score: 2.0 / 3.0,
        }];
        let doc = Document::new(json!({"k": 1, "alpha": 0.5}), match_results(&graph, &m), json!({}));
        let a = doc.to_machine();
        assert_eq!(a, doc.clone().to_machine());
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["results"][0]["score"], json!(0.666666666667));
        assert_eq!(v["results"][0]["assignment"][0]["label"], "P1");
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["config", "results", "stats"]);
        assert!(render_matches(&graph, &m).contains("p=P1(1)"));
    }
}
