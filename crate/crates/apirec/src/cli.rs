//! Command-line front end: deterministic, scriptable subcommands over the
//! library pipeline. Machine output (JSON or CSV) goes to stdout; human
//! diagnostics go to stderr.

use std::fs;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::eval::{
    generate_corpus, leave_one_out_eval, run_sweep, EvalError, EvalOptions, SweepSpec,
    SyntheticSpec,
};
use crate::graph::{CorrelationGraph, GraphError};
use crate::ids::{AppId, Keyword};
use crate::ingest::{derive_query_sets, parse_corpus, write_corpus, IngestError};
use crate::oracle::verify_against_oracle;
use crate::pipeline::{recommend, PipelineError, RecommendOptions};
use crate::sampler::{dump_subgraphs_json, sample_subgraphs, SampleConfig, SampleError};
use crate::seeding::{mix_seed, stream_rng, STREAM_EVAL_APPS};
use crate::steiner::{Query, QueryError, SearchError};
use crate::DEFAULT_SEED;

/// Exit codes: 0 ok, 2 input error, 3 unknown keyword, 4 infeasible query,
/// 5 internal assertion.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    UnknownKeyword(String),
    Infeasible(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::UnknownKeyword(_) => 3,
            CliError::Infeasible(_) => 4,
            CliError::Internal(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m)
            | CliError::UnknownKeyword(m)
            | CliError::Infeasible(m)
            | CliError::Internal(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::MaskWidthExceeded { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Internal(_) => CliError::Internal(e.to_string()),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}

impl From<SampleError> for CliError {
    fn from(e: SampleError) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::UnknownKeywords(_) => CliError::UnknownKeyword(e.to_string()),
            PipelineError::Sample(inner) => inner.into(),
            PipelineError::Search(inner) => inner.into(),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::ExcludedApp { .. }
            | EvalError::KeywordLost { .. }
            | EvalError::NoRecommendations => CliError::Infeasible(e.to_string()),
            EvalError::Pipeline(inner) => inner.into(),
            EvalError::Query(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "apirec",
    about = "Recommends diverse, compatibility-optimal web API sets for keyword queries"
)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the correlation graph from corpus files and write it to disk.
    Build(BuildArgs),
    /// Recommend top-K diverse API sets for a keyword query.
    Query(QueryArgs),
    /// Leave-one-app-out evaluation on a corpus.
    Eval(EvalArgs),
    /// Run a (z, p, r) parameter sweep and emit a CSV table.
    Sweep(SweepArgs),
    /// Cross-check the tree search against the brute-force solver.
    Verify(VerifyArgs),
    /// Generate a synthetic corpus.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// API catalog, one JSON record per line.
    #[arg(long)]
    pub apis: PathBuf,
    /// App records, one JSON record per line.
    #[arg(long)]
    pub apps: PathBuf,
    /// Output path for the graph file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Graph file produced by `build`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Comma-separated query keywords (commas inside keywords unsupported).
    #[arg(long, value_delimiter = ',', required = true)]
    pub keywords: Vec<String>,
    #[arg(long, default_value_t = 100)]
    pub z: u32,
    #[arg(long, default_value_t = 100)]
    pub p: u32,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Optional path for a JSON dump of the sampled subgraphs.
    #[arg(long)]
    pub dump_subgraphs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub apis: PathBuf,
    #[arg(long)]
    pub apps: PathBuf,
    /// Evaluate exactly this app.
    #[arg(long)]
    pub app: Option<String>,
    /// Without --app: number of evaluable apps to sample.
    #[arg(long, default_value_t = 10)]
    pub sample: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, default_value_t = 100)]
    pub z: u32,
    #[arg(long, default_value_t = 100)]
    pub p: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Rank candidates by precision against the held-out truth.
    #[arg(long)]
    pub accuracy_ranking: bool,
    /// Zero out wall-time fields for byte-reproducible output.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub apis: PathBuf,
    #[arg(long)]
    pub apps: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 50, 100])]
    pub z: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![100])]
    pub p: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![3, 4, 5, 6])]
    pub r: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub reps: u32,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, default_value_t = 100)]
    pub apps_per_cell: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Also write the CSV to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub accuracy_ranking: bool,
    /// Zero out wall-time columns for byte-reproducible output.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    pub instances: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Directory receiving apis.jsonl and apps.jsonl.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub n_apis: usize,
    #[arg(long, default_value_t = 2000)]
    pub n_apps: usize,
    #[arg(long, default_value_t = 60)]
    pub n_keywords: usize,
    #[arg(long, default_value_t = 6)]
    pub communities: usize,
    #[arg(long, default_value_t = 3)]
    pub min_apis_per_app: usize,
    #[arg(long, default_value_t = 5)]
    pub max_apis_per_app: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Parses args, runs, and maps errors to exit codes. The process entry point.
pub fn run(cli: Cli) -> i32 {
    let executed = match cli.jobs {
        Some(jobs) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                Ok(pool) => pool,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            pool.install(|| execute(&cli.command, &mut std::io::stdout().lock()))
        }
        None => execute(&cli.command, &mut std::io::stdout().lock()),
    };
    match executed {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Runs one subcommand, writing machine output to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Build(args) => cmd_build(args, out),
        Command::Query(args) => cmd_query(args, out),
        Command::Eval(args) => cmd_eval(args, out),
        Command::Sweep(args) => cmd_sweep(args, out),
        Command::Verify(args) => cmd_verify(args, out),
        Command::Gen(args) => cmd_gen(args, out),
    }
}

fn load_ecosystem(apis: &PathBuf, apps: &PathBuf) -> Result<crate::ingest::Ecosystem, CliError> {
    let api_file =
        fs::File::open(apis).map_err(|e| CliError::Input(format!("{}: {e}", apis.display())))?;
    let app_file =
        fs::File::open(apps).map_err(|e| CliError::Input(format!("{}: {e}", apps.display())))?;
    Ok(parse_corpus(
        BufReader::new(api_file),
        BufReader::new(app_file),
    )?)
}

fn load_graph(path: &PathBuf) -> Result<CorrelationGraph, CliError> {
    let body = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(CorrelationGraph::from_json(&body)?)
}

fn parse_keywords(raw: &[String]) -> Result<Query, CliError> {
    let mut keywords = Vec::with_capacity(raw.len());
    for s in raw {
        keywords.push(Keyword::new(s).map_err(|e| CliError::Input(format!("keyword {s:?}: {e}")))?);
    }
    Ok(Query::new(keywords)?)
}

fn check_knobs(z: u32, p: u32, k: usize, theta: f64) -> Result<(), CliError> {
    if z < 1 || p < 1 {
        return Err(CliError::Input("--z and --p must be at least 1".into()));
    }
    if k < 1 {
        return Err(CliError::Input("--k must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(CliError::Input("--theta must lie in [0, 1]".into()));
    }
    Ok(())
}

fn cmd_build(args: &BuildArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let eco = load_ecosystem(&args.apis, &args.apps)?;
    let (graph, stats) = CorrelationGraph::build_with_stats(&eco)?;
    fs::write(&args.out, graph.to_json())
        .map_err(|e| CliError::Input(format!("{}: {e}", args.out.display())))?;
    let line = json!({
        "vertices": stats.vertices,
        "edges": stats.edges,
        "edge_bearing_apis": stats.edge_bearing_apis,
        "component_coverage": stats.component_coverage,
    });
    writeln!(out, "{line}")?;
    Ok(())
}

fn cmd_query(args: &QueryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_knobs(args.z, args.p, args.k, args.theta)?;
    let graph = load_graph(&args.graph)?;
    let query = parse_keywords(&args.keywords)?;
    let started = std::time::Instant::now();

    if let Some(dump_path) = &args.dump_subgraphs {
        crate::pipeline::validate_query(&graph, &query)?;
        let cfg = SampleConfig {
            z: args.z,
            p: args.p,
            seed: args.seed,
            max_stall_steps: SampleConfig::default().max_stall_steps,
        };
        let subgraphs = sample_subgraphs(&graph, &query, &cfg)?;
        fs::write(dump_path, dump_subgraphs_json(&subgraphs))
            .map_err(|e| CliError::Input(format!("{}: {e}", dump_path.display())))?;
    }

    let opts = RecommendOptions {
        z: args.z,
        p: args.p,
        k: args.k,
        theta: args.theta,
        seed: args.seed,
        keep_duplicates: false,
    };
    let result = recommend(&graph, &query, &opts)?;
    let report = serde_json::to_string(&result.to_report(query.keywords()))
        .map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out, "{report}")?;
    eprintln!(
        "query returned {} of {} requested lists in {:.3}s",
        result.lists.len(),
        args.k,
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn eval_report_json(report: &crate::metrics::MetricsReport) -> serde_json::Value {
    serde_json::to_value(report).expect("report serialization cannot fail")
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_knobs(args.z, args.p, args.k, args.theta)?;
    let eco = load_ecosystem(&args.apis, &args.apps)?;
    let opts = EvalOptions {
        k: args.k,
        theta: args.theta,
        z: args.z,
        p: args.p,
        seed: args.seed,
        accuracy_ranking: args.accuracy_ranking,
        measure_time: !args.no_timing,
    };

    if let Some(app) = &args.app {
        let app = AppId::new(app).map_err(|e| CliError::Input(format!("app id: {e}")))?;
        let report = leave_one_out_eval(&eco, &app, &opts)?;
        writeln!(
            out,
            "{}",
            json!({"app": app.as_str(), "report": eval_report_json(&report)})
        )?;
        return Ok(());
    }

    // Sample evaluable apps deterministically.
    let mut evaluable: Vec<AppId> = derive_query_sets(&eco)
        .into_iter()
        .filter(|qs| qs.keywords.len() >= 3)
        .map(|qs| qs.app)
        .collect();
    let mut rng = stream_rng(args.seed, STREAM_EVAL_APPS, 0);
    use rand::Rng;
    let take = args.sample.min(evaluable.len());
    for i in 0..take {
        let j = rng.random_range(i..evaluable.len());
        evaluable.swap(i, j);
    }
    evaluable.truncate(take);

    let mut entries = Vec::new();
    for (idx, app) in evaluable.iter().enumerate() {
        let per_app = EvalOptions {
            seed: mix_seed(&[args.seed, idx as u64]),
            ..opts.clone()
        };
        match leave_one_out_eval(&eco, app, &per_app) {
            Ok(report) => entries.push(json!({
                "app": app.as_str(),
                "status": "ok",
                "report": eval_report_json(&report),
            })),
            Err(
                e @ (EvalError::ExcludedApp { .. }
                | EvalError::KeywordLost { .. }
                | EvalError::NoRecommendations),
            ) => entries.push(json!({
                "app": app.as_str(),
                "status": "skipped",
                "reason": e.to_string(),
            })),
            Err(other) => return Err(other.into()),
        }
    }
    writeln!(out, "{}", json!({"apps": entries}))?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_knobs(1, 1, args.k, args.theta)?;
    let eco = load_ecosystem(&args.apis, &args.apps)?;
    let spec = SweepSpec {
        z_values: args.z.clone(),
        p_values: args.p.clone(),
        r_values: args.r.clone(),
        repetitions: args.reps,
        seed: args.seed,
        k: args.k,
        theta: args.theta,
        apps_per_cell: args.apps_per_cell,
        accuracy_ranking: args.accuracy_ranking,
        measure_time: !args.no_timing,
    };
    let table = run_sweep(&eco, &spec)?;
    let csv = table.to_csv();
    if let Some(path) = &args.out {
        fs::write(path, &csv).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    write!(out, "{csv}")?;
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let outcome = verify_against_oracle(args.instances, args.seed);
    let line = json!({
        "instances": outcome.instances,
        "mismatches": outcome.mismatched_instances.len(),
        "seed": args.seed,
    });
    writeln!(out, "{line}")?;
    if outcome.mismatched_instances.is_empty() {
        Ok(())
    } else {
        Err(CliError::Internal(format!(
            "search disagreed with the brute-force solver on instances {:?}",
            &outcome.mismatched_instances[..outcome.mismatched_instances.len().min(10)]
        )))
    }
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = SyntheticSpec {
        n_apis: args.n_apis,
        n_apps: args.n_apps,
        n_keywords: args.n_keywords,
        community_count: args.communities,
        apis_per_app_min: args.min_apis_per_app,
        apis_per_app_max: args.max_apis_per_app,
        seed: args.seed,
    };
    let eco = generate_corpus(&spec)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.out_dir.display())))?;
    let api_path = args.out_dir.join("apis.jsonl");
    let app_path = args.out_dir.join("apps.jsonl");
    let mut api_buf = Vec::new();
    let mut app_buf = Vec::new();
    write_corpus(&eco, &mut api_buf, &mut app_buf)?;
    fs::write(&api_path, api_buf)
        .map_err(|e| CliError::Input(format!("{}: {e}", api_path.display())))?;
    fs::write(&app_path, app_buf)
        .map_err(|e| CliError::Input(format!("{}: {e}", app_path.display())))?;
    let line = json!({
        "apis": eco.api_count(),
        "apps": eco.app_count(),
        "api_file": api_path.display().to_string(),
        "app_file": app_path.display().to_string(),
    });
    writeln!(out, "{line}")?;
    Ok(())
}
