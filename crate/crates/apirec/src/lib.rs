//! Diverse, compatibility-optimal web API set recommendation.
//!
//! Given a catalog of web APIs tagged with functional keywords and a history
//! of apps built from them, this crate answers keyword queries with ranked
//! sets of APIs that (a) collectively cover every requested keyword,
//! (b) have strong co-usage evidence of working together, and (c) differ
//! meaningfully from one another.
//!
//! The pipeline:
//!
//! 1. [`ingest`] parses the app/API co-usage corpus.
//! 2. [`graph`] builds a correlation graph whose edges carry co-usage counts
//!    and lengths `1/count`.
//! 3. [`sampler`] draws random-walk subgraphs seeded at the query's keyword
//!    vertices; sampling variety is where result diversity comes from.
//! 4. [`steiner`] finds, per subgraph, the minimum group Steiner tree
//!    connecting the query keywords.
//! 5. [`ranker`] deduplicates, ranks by compatibility, and greedily keeps
//!    lists that are pairwise diverse above a threshold.
//! 6. [`metrics`] and [`eval`] score recommendations against held-out apps
//!    and reproduce parameter trend studies.
//!
//! [`oracle`] holds an independent brute-force solver used to cross-check
//! the search on small instances, and [`cli`] backs the `apirec` binary.
//!
//! ```
//! use apirec::eval::{generate_corpus, SyntheticSpec};
//! use apirec::graph::{CorrelationGraph, GraphView};
//! use apirec::ids::Keyword;
//! use apirec::pipeline::{recommend, RecommendOptions};
//! use apirec::steiner::Query;
//!
//! let eco = generate_corpus(&SyntheticSpec {
//!     n_apis: 60,
//!     n_apps: 150,
//!     n_keywords: 24,
//!     community_count: 4,
//!     ..SyntheticSpec::default()
//! })
//! .unwrap();
//! let graph = CorrelationGraph::build(&eco).unwrap();
//! let kw = graph.keywords().next().cloned().unwrap();
//! let query = Query::new(vec![kw]).unwrap();
//! let result = recommend(&graph, &query, &RecommendOptions {
//!     z: 10,
//!     p: 20,
//!     ..RecommendOptions::default()
//! })
//! .unwrap();
//! assert!(!result.lists.is_empty());
//! ```

pub mod cli;
pub mod eval;
pub mod graph;
pub mod ids;
pub mod ingest;
pub mod metrics;
pub mod oracle;
pub mod pipeline;
pub mod ranker;
pub mod rational;
pub mod sampler;
mod seeding;
pub mod steiner;

/// Default seed for every randomized component, so runs without an explicit
/// `--seed` are reproducible.
pub const DEFAULT_SEED: u64 = 0x5EED;

pub use graph::{CorrelationGraph, EdgeLength, GraphView};
pub use ids::{ApiId, AppId, Keyword};
pub use ingest::{derive_query_sets, parse_corpus, write_corpus, Ecosystem};
pub use metrics::MetricsReport;
pub use pipeline::{recommend, RecommendOptions};
pub use ranker::{diversity, rank_and_diversify, RankedResult, RecommendationList};
pub use rational::Rational;
pub use sampler::{coverage_report, sample_subgraphs, SampleConfig, Subgraph};
pub use steiner::{min_group_steiner_tree, tree_compatibility, Query, Score, SteinerTree};
