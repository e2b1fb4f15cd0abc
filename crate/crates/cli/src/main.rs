use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hhin_core::bench::{run_bench, BenchConfig};
use hhin_core::general::{EdgeBound, GeneralError};
use hhin_core::io::{
    load_bundle, load_query, match_results, render_matches, save_bundle, Document, GraphBundle, IoError,
};
use hhin_core::model::validate_graph;
use hhin_core::oracle::{oracle_general_topk, OracleError, DEFAULT_TUPLE_CAP};
use hhin_core::synthetic::{generate_synthetic, random_general_query, seeded_rng, SyntheticConfig, TypeMix};
use hhin_core::{classify_query, gqh, GeneralOptions, Ks, QueryError, ScoringParams};

#[derive(Parser)]
#[command(name = "hhin", version, about = "Top-k queries over hierarchical information networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph bundle against its schema.
    Validate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Write a synthetic graph bundle, optionally with random queries.
    Generate(GenerateArgs),
    /// Answer a query with the pruning engines.
    Query(QueryArgs),
    /// Answer a query by exhaustive enumeration.
    Oracle(QueryArgs),
    /// Time the engines over synthetic sweeps.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    schema: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    query: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Candidate list length per query node: a number or `all` (default 2k).
    #[arg(long)]
    ks: Option<KsArg>,
    #[arg(long)]
    no_prune: bool,
    /// Edge bound used while assembling general matches.
    #[arg(long, value_enum, default_value_t = BoundArg::Tight)]
    bound: BoundArg,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long = "node-count", default_value_t = 1000)]
    node_count: usize,
    /// Attaching+inherited+other type counts.
    #[arg(long, default_value = "2+2+3")]
    type_mix: TypeMix,
    #[arg(long, default_value_t = 10.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long, default_value_t = 3)]
    fanout: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random queries written as query-N.json.
    #[arg(long, default_value_t = 0)]
    queries: usize,
    #[arg(long, default_value_t = 2)]
    specifics: usize,
    #[arg(long, default_value_t = 1)]
    query_nodes: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long = "node-count", default_value_t = 100_000)]
    node_count: usize,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    /// Comma-separated k values of the k sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 5, 10, 20, 30])]
    ks: Vec<usize>,
    #[arg(long)]
    no_prune: bool,
    /// Directory for records.tsv and summary.tsv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Tight,
    Unit,
}

#[derive(Clone, Copy)]
struct KsArg(Ks);

impl std::str::FromStr for KsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(KsArg(Ks::All));
        }
        s.parse::<usize>()
            .map(|n| KsArg(Ks::Top(n)))
            .map_err(|_| format!("expected a number or `all`, got {s:?}"))
    }
}

fn ks_value(ks: Ks) -> Value {
    match ks {
        Ks::All => json!("all"),
        Ks::Top(n) => json!(n),
    }
}

/// A failed command and its exit status.
struct Failure {
    code: u8,
    message: String,
    /// Printed to stdout before the message.
    output: String,
}

impl Failure {
    fn parse(message: impl fmt::Display) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
            output: String::new(),
        }
    }
}

fn query_failure(e: &QueryError) -> Failure {
    let code = match e {
        QueryError::AnchorNotFound(_) | QueryError::AmbiguousAnchor { .. } => 2,
        _ => 1,
    };
    Failure {
        code,
        message: e.to_string(),
        output: String::new(),
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::Query { source, .. } => query_failure(source),
            _ => Failure::parse(e),
        }
    }
}

impl From<GeneralError> for Failure {
    fn from(e: GeneralError) -> Self {
        match &e {
            GeneralError::Query(q) => query_failure(q),
            _ => Failure::parse(e),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match &e {
            OracleError::Query(q) => query_failure(q),
            _ => Failure::parse(e),
        }
    }
}

fn load(graph: &GraphArgs) -> Result<GraphBundle, Failure> {
    Ok(load_bundle(&graph.nodes, &graph.edges, &graph.schema)?)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn validate(graph: &GraphArgs, format: Format) -> Result<String, Failure> {
    let b = match load_bundle(&graph.nodes, &graph.edges, &graph.schema) {
        Err(IoError::Invalid(report)) => {
            let output = match format {
                Format::Human => format!("{report}\n"),
                Format::Machine => {
                    let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
                    Document::new(json!({"command": "validate"}), json!(violations), json!({"valid": false}))
                        .to_machine()
                }
            };
            return Err(Failure {
                code: 1,
                message: format!("{} violation(s)", report.violations.len()),
                output,
            });
        }
        other => other?,
    };
    let report = validate_graph(&b.graph, &b.schema);
    let stats = json!({
        "valid": true,
        "nodes": b.graph.node_count(),
        "edges": b.graph.edge_count(),
        "hierarchyEdges": b.graph.hierarchy_edges().len(),
    });
    Ok(match format {
        Format::Human => format!(
            "{report}: {} nodes, {} edges ({} hierarchy)\n",
            b.graph.node_count(),
            b.graph.edge_count(),
            b.graph.hierarchy_edges().len()
        ),
        Format::Machine => Document::new(json!({"command": "validate"}), json!([]), stats).to_machine(),
    })
}

fn generate(args: &GenerateArgs) -> Result<String, Failure> {
    let config = SyntheticConfig {
        nodes: args.node_count,
        type_mix: args.type_mix,
        avg_degree: args.avg_degree,
        depth: args.depth,
        fanout: args.fanout,
        seed: args.seed,
    };
    let (graph, schema) = generate_synthetic(&config).map_err(Failure::parse)?;
    save_bundle(&args.out, &graph, &schema)?;
    let mut rng = seeded_rng(args.seed);
    let mut written = 0;
    let mut attempts = 0;
    while written < args.queries && attempts < 1000 * args.queries {
        attempts += 1;
        if let Some(q) = random_general_query(&graph, args.specifics, args.query_nodes, &mut rng) {
            let text = serde_json::to_string_pretty(&q).expect("query serializes") + "\n";
            write_file(&args.out.join(format!("query-{written}.json")), &text)?;
            written += 1;
        }
    }
    if written < args.queries {
        return Err(Failure::parse(format!("could only draw {written} of {} queries", args.queries)));
    }
    Ok(format!(
        "wrote {} nodes, {} edges and {written} queries to {}\n",
        graph.node_count(),
        graph.edge_count(),
        args.out.display()
    ))
}

fn run_query(args: &QueryArgs, exhaustive: bool) -> Result<String, Failure> {
    let params = ScoringParams::new(args.alpha, args.beta).map_err(Failure::parse)?;
    for w in params.warnings() {
        log::warn!("{w}");
    }
    let b = load(&args.graph)?;
    let query = load_query(&args.query)?;
    let class = classify_query(&query, &b.schema).map_err(|e| query_failure(&e))?;
    let mut config = json!({
        "command": if exhaustive { "oracle" } else { "query" },
        "alpha": params.alpha,
        "beta": params.beta,
        "k": args.k,
        "queryClass": class,
        "graph": {"nodes": b.graph.node_count(), "edges": b.graph.edge_count()},
    });
    let (matches, stats) = if exhaustive {
        let res = oracle_general_topk(&b.graph, &b.schema, &query, args.k, &params, DEFAULT_TUPLE_CAP)?;
        let candidates: Vec<Value> = res
            .candidates
            .iter()
            .map(|(q, l)| json!({"queryNode": q, "count": l.len()}))
            .collect();
        (res.top, json!({"tuples": res.tuples, "candidates": candidates}))
    } else {
        let options = GeneralOptions {
            ks: args.ks.map(|k| k.0),
            prune: !args.no_prune,
            bound: match args.bound {
                BoundArg::Tight => EdgeBound::Tight,
                BoundArg::Unit => EdgeBound::Unit,
            },
        };
        let res = gqh(&b.graph, &b.schema, &query, args.k, &params, &options)?;
        let t = res.stats.timings;
        log::info!(
            "decompose {:?}, stars {:?}, assemble {:?}",
            t.decompose,
            t.stars,
            t.assemble
        );
        config["ks"] = ks_value(res.ks);
        config["prune"] = json!(options.prune);
        config["bound"] = json!(match options.bound {
            EdgeBound::Tight => "tight",
            EdgeBound::Unit => "unit",
        });
        let stars: Vec<Value> = res
            .stats
            .stars
            .iter()
            .map(|(q, s)| {
                let mut v = serde_json::to_value(s).expect("stats serialize");
                v["queryNode"] = json!(q);
                v
            })
            .collect();
        let candidates: Vec<Value> = res
            .stats
            .candidates
            .iter()
            .map(|(q, n)| json!({"queryNode": q, "count": n}))
            .collect();
        let stats = json!({
            "stars": stars,
            "candidates": candidates,
            "bnb": res.stats.bnb,
            "pairEvaluations": res.stats.pair_evaluations,
        });
        (res.matches, stats)
    };
    Ok(match args.format {
        Format::Human => render_matches(&b.graph, &matches),
        Format::Machine => Document::new(config, match_results(&b.graph, &matches), stats).to_machine(),
    })
}

fn bench(args: &BenchArgs) -> Result<String, Failure> {
    let params = ScoringParams::new(args.alpha, args.beta).map_err(Failure::parse)?;
    let defaults = BenchConfig::default();
    let config = BenchConfig {
        graph: SyntheticConfig {
            nodes: args.node_count,
            seed: args.seed,
            ..defaults.graph.clone()
        },
        reps: args.reps,
        params,
        prune: !args.no_prune,
        k_values: args.ks.clone(),
        ..defaults
    };
    let report = run_bench(&config, &mut |line| log::info!("{line}")).map_err(Failure::parse)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| Failure::parse(format!("{}: {e}", dir.display())))?;
        write_file(&dir.join("records.tsv"), &report.records_tsv())?;
        write_file(&dir.join("summary.tsv"), &report.summary_tsv())?;
    }
    Ok(match args.format {
        Format::Human => report.summary_tsv(),
        Format::Machine => {
            let cells = serde_json::to_value(&report.cells).expect("cells serialize");
            let config = serde_json::to_value(&config).expect("config serializes");
            Document::new(config, cells, json!({"records": report.records.len()})).to_machine()
        }
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Validate { graph, format } => validate(graph, *format),
        Command::Generate(args) => generate(args),
        Command::Query(args) => run_query(args, false),
        Command::Oracle(args) => run_query(args, true),
        Command::Bench(args) => bench(args),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            print!("{}", f.output);
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
