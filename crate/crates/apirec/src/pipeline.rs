//! End-to-end query pipeline: sample subgraphs, search each for its optimal
//! tree, rank and diversify. Searches over different subgraphs run in
//! parallel; results are collected in sample order so output is independent
//! of thread count.

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::CorrelationGraph;
use crate::ids::Keyword;
use crate::ranker::{rank_and_diversify, rank_and_diversify_keeping_duplicates, RankedResult};
use crate::sampler::{sample_subgraphs, SampleConfig, SampleError};
use crate::steiner::{min_group_steiner_tree, Query, SearchError, SteinerTree};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unknown keywords: {}", .0.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(", "))]
    UnknownKeywords(Vec<Keyword>),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone)]
pub struct RecommendOptions {
    pub z: u32,
    pub p: u32,
    pub k: usize,
    pub theta: f64,
    pub seed: u64,
    /// Keep identical API sets from different subgraphs as distinct
    /// candidates (evaluation semantics) instead of collapsing them.
    pub keep_duplicates: bool,
}

impl Default for RecommendOptions {
    fn default() -> Self {
        RecommendOptions {
            z: 100,
            p: 100,
            k: 10,
            theta: 0.5,
            seed: crate::DEFAULT_SEED,
            keep_duplicates: false,
        }
    }
}

/// Validates the query against the graph's keyword index.
pub fn validate_query(g: &CorrelationGraph, query: &Query) -> Result<(), PipelineError> {
    let unknown: Vec<Keyword> = query
        .keywords()
        .iter()
        .filter(|kw| !g.has_keyword(kw))
        .cloned()
        .collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(PipelineError::UnknownKeywords(unknown))
    }
}

/// Per-subgraph optimal trees, in sample order. Subgraphs that miss a
/// keyword or are disconnected across keyword groups contribute `None`.
pub fn candidate_trees(
    g: &CorrelationGraph,
    query: &Query,
    cfg: &SampleConfig,
) -> Result<Vec<Option<SteinerTree>>, PipelineError> {
    let subgraphs = sample_subgraphs(g, query, cfg)?;
    let trees: Result<Vec<Option<SteinerTree>>, SearchError> = subgraphs
        .par_iter()
        .map(|sg| match min_group_steiner_tree(&sg.view(), query) {
            Ok(tree) => Ok(tree),
            Err(SearchError::KeywordUncovered { .. }) => Ok(None),
            Err(other) => Err(other),
        })
        .collect();
    Ok(trees?)
}

/// The full recommendation pipeline for one query.
pub fn recommend(
    g: &CorrelationGraph,
    query: &Query,
    opts: &RecommendOptions,
) -> Result<RankedResult, PipelineError> {
    validate_query(g, query)?;
    let cfg = SampleConfig {
        z: opts.z,
        p: opts.p,
        seed: opts.seed,
        max_stall_steps: SampleConfig::default().max_stall_steps,
    };
    let trees = candidate_trees(g, query, &cfg)?;
    Ok(if opts.keep_duplicates {
        rank_and_diversify_keeping_duplicates(&trees, opts.k, opts.theta)
    } else {
        rank_and_diversify(&trees, opts.k, opts.theta)
    })
}
