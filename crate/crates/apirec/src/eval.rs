//! Experiment harness: synthetic corpus generation, leave-one-app-out
//! evaluation, and parameter sweeps over (z, p, r) grids.
//!
//! The corpus generator plants keyword communities: each API draws tags
//! mostly from one community and each app draws APIs mostly from one
//! community with a popularity skew, which yields one dominant connected
//! component and co-usage hubs, the shape real app ecosystems show.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{CorrelationGraph, GraphError};
use crate::ids::{ApiId, AppId, Keyword};
use crate::ingest::{derive_query_sets, Ecosystem};
use crate::metrics::MetricsReport;
use crate::pipeline::{candidate_trees, PipelineError};
use crate::ranker::{candidates_by_compatibility, rank_by_accuracy, select_diverse};
use crate::sampler::SampleConfig;
use crate::seeding::{mix_seed, stream_rng, STREAM_CORPUS, STREAM_EVAL_APPS};
use crate::steiner::{Query, QueryError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("infeasible synthetic spec: {0}")]
    InfeasibleSpec(String),
    #[error("unknown app {0}")]
    UnknownApp(AppId),
    #[error("app {app} derives {r} keywords; evaluation needs at least 3")]
    ExcludedApp { app: AppId, r: usize },
    #[error("holdout removed the last vertex for: {}", .missing.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(", "))]
    KeywordLost { missing: Vec<Keyword> },
    #[error("no recommendation lists were produced")]
    NoRecommendations,
    #[error("invalid sweep spec: {0}")]
    InvalidSweep(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Parameters of the planted-community synthetic corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub n_apis: usize,
    pub n_apps: usize,
    pub n_keywords: usize,
    pub community_count: usize,
    pub apis_per_app_min: usize,
    pub apis_per_app_max: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_apis: 500,
            n_apps: 2000,
            n_keywords: 60,
            community_count: 6,
            apis_per_app_min: 3,
            apis_per_app_max: 5,
            seed: crate::DEFAULT_SEED,
        }
    }
}

impl SyntheticSpec {
    fn validate(&self) -> Result<(), EvalError> {
        let fail = |msg: String| Err(EvalError::InfeasibleSpec(msg));
        if self.n_apis == 0 || self.n_apps == 0 || self.n_keywords == 0 {
            return fail("API, app, and keyword counts must be positive".into());
        }
        if self.community_count == 0 || self.community_count > self.n_keywords {
            return fail(format!(
                "community count {} must be in 1..={}",
                self.community_count, self.n_keywords
            ));
        }
        if self.apis_per_app_min < 2 {
            return fail("apps need at least 2 APIs to produce co-usage".into());
        }
        if self.apis_per_app_min > self.apis_per_app_max {
            return fail("apis_per_app range is inverted".into());
        }
        if self.apis_per_app_max > self.n_apis {
            return fail(format!(
                "apps cannot draw {} distinct APIs from a catalog of {}",
                self.apis_per_app_max, self.n_apis
            ));
        }
        Ok(())
    }
}

/// Deterministic planted-community corpus.
pub fn generate_corpus(spec: &SyntheticSpec) -> Result<Ecosystem, EvalError> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, STREAM_CORPUS, 0);
    let cc = spec.community_count;

    // Keywords in contiguous community blocks.
    let keywords: Vec<Keyword> = (0..spec.n_keywords)
        .map(|i| Keyword::new(&format!("kw{i:03}")).expect("generated id"))
        .collect();
    let block = |c: usize| {
        let lo = c * spec.n_keywords / cc;
        let hi = (c + 1) * spec.n_keywords / cc;
        lo..hi.max(lo + 1).min(spec.n_keywords)
    };

    // APIs: home community plus 1..=3 tags, mostly from home.
    let mut apis: BTreeMap<ApiId, BTreeSet<Keyword>> = BTreeMap::new();
    let mut api_ids: Vec<ApiId> = Vec::with_capacity(spec.n_apis);
    let mut by_community: Vec<Vec<ApiId>> = vec![Vec::new(); cc];
    for i in 0..spec.n_apis {
        let id = ApiId::new(&format!("api{i:05}")).expect("generated id");
        let home = rng.random_range(0..cc);
        let n_tags = rng.random_range(1..=3usize);
        let mut tags = BTreeSet::new();
        for _ in 0..n_tags {
            let range = if rng.random_bool(0.9) {
                block(home)
            } else {
                0..spec.n_keywords
            };
            let kw = keywords[rng.random_range(range)].clone();
            tags.insert(kw);
        }
        api_ids.push(id.clone());
        by_community[home].push(id.clone());
        apis.insert(id, tags);
    }

    // Apps: a home community and a popularity-skewed API draw. Low indices
    // within a community act as hubs; a fraction of global picks keeps the
    // co-usage graph in one dominant component.
    let mut apps: BTreeMap<AppId, BTreeSet<ApiId>> = BTreeMap::new();
    for j in 0..spec.n_apps {
        let id = AppId::new(&format!("app{j:05}")).expect("generated id");
        let home = rng.random_range(0..cc);
        let size = rng.random_range(spec.apis_per_app_min..=spec.apis_per_app_max);
        let mut members = BTreeSet::new();
        let mut attempts = 0usize;
        while members.len() < size && attempts < 40 * size {
            attempts += 1;
            let pool: &[ApiId] = if rng.random_bool(0.85) && !by_community[home].is_empty() {
                &by_community[home]
            } else {
                &api_ids
            };
            // Quadratic skew toward the front of the pool.
            let u: f64 = rng.random();
            let idx = ((u * u) * pool.len() as f64) as usize;
            members.insert(pool[idx.min(pool.len() - 1)].clone());
        }
        // The draw above virtually never stalls; pad deterministically if it
        // somehow did so every app keeps >= 2 APIs.
        let mut fill = 0usize;
        while members.len() < 2 {
            members.insert(api_ids[fill].clone());
            fill += 1;
        }
        apps.insert(id, members);
    }

    Ok(Ecosystem::new(apis, apps).expect("generated corpus is internally consistent"))
}

/// Knobs for a single leave-one-out evaluation.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub k: usize,
    pub theta: f64,
    pub z: u32,
    pub p: u32,
    pub seed: u64,
    /// Order candidates by precision against the truth (evaluation-mode
    /// ranking) instead of by compatibility.
    pub accuracy_ranking: bool,
    /// When false, reported wall times are zeroed so output bytes are
    /// reproducible.
    pub measure_time: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            k: 10,
            theta: 0.5,
            z: 100,
            p: 100,
            seed: crate::DEFAULT_SEED,
            accuracy_ranking: false,
            measure_time: true,
        }
    }
}

/// Holdout state for one app: the graph without its co-usage, plus the
/// derived query and truth set.
pub struct Holdout {
    pub graph: CorrelationGraph,
    pub query: Query,
    pub truth: BTreeSet<ApiId>,
}

/// Builds the holdout graph for `app`, removing its pair-count contribution
/// before the graph is built so the instance cannot leak into itself.
pub fn prepare_holdout(eco: &Ecosystem, app: &AppId) -> Result<Holdout, EvalError> {
    let members = eco
        .app_apis(app)
        .ok_or_else(|| EvalError::UnknownApp(app.clone()))?;
    let truth: BTreeSet<ApiId> = members.clone();

    let mut keywords: BTreeSet<Keyword> = BTreeSet::new();
    for api in members {
        keywords.extend(
            eco.api_tags(api)
                .expect("app members are cataloged")
                .iter()
                .cloned(),
        );
    }
    if keywords.len() < 3 {
        return Err(EvalError::ExcludedApp {
            app: app.clone(),
            r: keywords.len(),
        });
    }
    let query = Query::new(keywords.into_iter().collect())?;

    let holdout = eco.without_app(app);
    let graph = CorrelationGraph::build(&holdout)?;

    let missing: Vec<Keyword> = query
        .keywords()
        .iter()
        .filter(|kw| !graph.has_keyword(kw))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::KeywordLost { missing });
    }
    Ok(Holdout {
        graph,
        query,
        truth,
    })
}

/// Runs the pipeline over an already-prepared holdout and scores it.
///
/// Evaluation keeps duplicate API sets from different subgraphs as distinct
/// candidates, mirroring how repeated sampled compositions occur; the
/// wall time covers sampling, search, and ranking.
pub fn run_holdout(holdout: &Holdout, opts: &EvalOptions) -> Result<MetricsReport, EvalError> {
    let started = Instant::now();
    let cfg = SampleConfig {
        z: opts.z,
        p: opts.p,
        seed: opts.seed,
        max_stall_steps: SampleConfig::default().max_stall_steps,
    };
    let trees = candidate_trees(&holdout.graph, &holdout.query, &cfg)?;
    let candidates = candidates_by_compatibility(&trees, false);
    let ordered = if opts.accuracy_ranking {
        rank_by_accuracy(&candidates, &holdout.truth)
    } else {
        candidates
    };
    let selected = select_diverse(ordered, opts.k, opts.theta);
    let wall = if opts.measure_time {
        started.elapsed().as_secs_f64()
    } else {
        0.0
    };
    if selected.is_empty() {
        return Err(EvalError::NoRecommendations);
    }
    Ok(MetricsReport::compute(&selected, &holdout.truth, wall))
}

/// Leave-one-app-out evaluation: the app's derived keyword set is the
/// query, its API set the truth, and its co-usage is removed from the graph.
pub fn leave_one_out_eval(
    eco: &Ecosystem,
    app: &AppId,
    opts: &EvalOptions,
) -> Result<MetricsReport, EvalError> {
    let holdout = prepare_holdout(eco, app)?;
    run_holdout(&holdout, opts)
}

/// Grid of sweep cells, plus shared evaluation settings.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub z_values: Vec<u32>,
    pub p_values: Vec<u32>,
    pub r_values: Vec<usize>,
    pub repetitions: u32,
    pub seed: u64,
    pub k: usize,
    pub theta: f64,
    /// Upper bound on eval apps drawn per r value.
    pub apps_per_cell: usize,
    pub accuracy_ranking: bool,
    pub measure_time: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            z_values: vec![10, 50, 100],
            p_values: vec![100],
            r_values: vec![3, 4, 5, 6],
            repetitions: 1,
            seed: crate::DEFAULT_SEED,
            k: 10,
            theta: 0.5,
            apps_per_cell: 100,
            accuracy_ranking: false,
            measure_time: true,
        }
    }
}

impl SweepSpec {
    fn validate(&self) -> Result<(), EvalError> {
        let fail = |msg: &str| Err(EvalError::InvalidSweep(msg.to_string()));
        if self.z_values.is_empty() || self.p_values.is_empty() || self.r_values.is_empty() {
            return fail("z, p, and r value lists must be nonempty");
        }
        if self.z_values.contains(&0) || self.p_values.contains(&0) {
            return fail("z and p values must be positive");
        }
        if self.r_values.iter().any(|&r| r < 3) {
            return fail("r values below 3 are excluded from evaluation");
        }
        if self.repetitions == 0 {
            return fail("repetitions must be positive");
        }
        if self.apps_per_cell == 0 {
            return fail("apps_per_cell must be positive");
        }
        if self.k == 0 {
            return fail("k must be positive");
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return fail("theta must lie in [0, 1]");
        }
        Ok(())
    }
}

/// Aggregated results of one (z, p, r) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub z: u32,
    pub p: u32,
    pub r: usize,
    pub k: usize,
    pub theta: f64,
    pub seed: u64,
    pub mp: Option<f64>,
    pub mr: Option<f64>,
    pub mild: Option<f64>,
    pub milc: Option<f64>,
    pub harmonic: Option<f64>,
    pub mean_wall_s: Option<f64>,
    pub n_instances: usize,
    pub n_skipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str =
    "z,p,r,K,theta,seed,mp,mr,mild,milc,harmonic,mean_wall_s,n_instances,n_skipped";

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let opt = |v: &Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                row.z,
                row.p,
                row.r,
                row.k,
                row.theta,
                row.seed,
                opt(&row.mp),
                opt(&row.mr),
                opt(&row.mild),
                opt(&row.milc),
                opt(&row.harmonic),
                opt(&row.mean_wall_s),
                row.n_instances,
                row.n_skipped,
            ));
        }
        out
    }
}

fn subsample_apps(candidates: &[AppId], limit: usize, seed: u64, r: usize) -> Vec<AppId> {
    if candidates.len() <= limit {
        return candidates.to_vec();
    }
    // Partial Fisher-Yates over a copy, seeded per r so every cell at the
    // same r evaluates the same apps.
    let mut rng = stream_rng(seed, STREAM_EVAL_APPS, r as u64);
    let mut pool: Vec<AppId> = candidates.to_vec();
    for i in 0..limit {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(limit);
    pool
}

/// Runs the full sweep grid. Instances are independent and run in parallel;
/// per-instance seeds depend only on (sweep seed, r, app, repetition), so at
/// a fixed repetition the z = a and z = b cells share their first
/// min(a, b) sampled subgraphs, pairing the comparison across cells.
pub fn run_sweep(eco: &Ecosystem, spec: &SweepSpec) -> Result<SweepTable, EvalError> {
    spec.validate()?;

    let query_sets = derive_query_sets(eco);
    let mut by_r: BTreeMap<usize, Vec<AppId>> = BTreeMap::new();
    for qs in &query_sets {
        by_r.entry(qs.keywords.len())
            .or_default()
            .push(qs.app.clone());
    }
    let chosen: BTreeMap<usize, Vec<AppId>> = spec
        .r_values
        .iter()
        .map(|&r| {
            let candidates = by_r.get(&r).map(|v| v.as_slice()).unwrap_or(&[]);
            (
                r,
                subsample_apps(candidates, spec.apps_per_cell, spec.seed, r),
            )
        })
        .collect();

    // One holdout graph per app, shared across every cell that uses it.
    let needed: BTreeSet<AppId> = chosen.values().flatten().cloned().collect();
    let needed: Vec<AppId> = needed.into_iter().collect();
    let prepared: BTreeMap<AppId, Result<Holdout, EvalError>> = needed
        .par_iter()
        .map(|app| (app.clone(), prepare_holdout(eco, app)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let mut rows = Vec::new();
    for &z in &spec.z_values {
        for &p in &spec.p_values {
            for &r in &spec.r_values {
                let apps = &chosen[&r];
                let instances: Vec<(usize, u32)> = (0..apps.len())
                    .flat_map(|a| (0..spec.repetitions).map(move |rep| (a, rep)))
                    .collect();
                let results: Vec<Option<MetricsReport>> = instances
                    .par_iter()
                    .map(|&(app_idx, rep)| {
                        let app = &apps[app_idx];
                        let holdout = match &prepared[app] {
                            Ok(h) => h,
                            Err(_) => return None,
                        };
                        let opts = EvalOptions {
                            k: spec.k,
                            theta: spec.theta,
                            z,
                            p,
                            seed: mix_seed(&[spec.seed, r as u64, app_idx as u64, rep as u64]),
                            accuracy_ranking: spec.accuracy_ranking,
                            measure_time: spec.measure_time,
                        };
                        run_holdout(holdout, &opts).ok()
                    })
                    .collect();

                let reports: Vec<&MetricsReport> = results.iter().flatten().collect();
                let n_instances = reports.len();
                let n_skipped = results.len() - n_instances;
                let mean_of = |f: &dyn Fn(&MetricsReport) -> Option<f64>| {
                    let values: Vec<f64> = reports.iter().filter_map(|r| f(r)).collect();
                    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
                };
                rows.push(SweepRow {
                    z,
                    p,
                    r,
                    k: spec.k,
                    theta: spec.theta,
                    seed: spec.seed,
                    mp: mean_of(&|m| Some(m.mp)),
                    mr: mean_of(&|m| Some(m.mr)),
                    mild: mean_of(&|m| m.mild),
                    milc: mean_of(&|m| m.milc),
                    harmonic: mean_of(&|m| m.harmonic),
                    mean_wall_s: mean_of(&|m| Some(m.wall_time_seconds)),
                    n_instances,
                    n_skipped,
                });
            }
        }
    }
    Ok(SweepTable { rows })
}
