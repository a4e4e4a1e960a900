//! Random-walk subgraph sampling.
//!
//! Each sample runs a simple random walk over the correlation graph,
//! started from a uniformly chosen keyword vertex of the query, collecting
//! newly visited vertices until the target size is reached. A walk that
//! fails to expand for too many consecutive steps teleports back to a
//! random keyword vertex. Every sample draws from its own RNG stream, so
//! samples are reproducible individually and safe to generate in parallel.

use std::collections::BTreeSet;
use std::collections::HashSet;

use rand::Rng;
use thiserror::Error;

use crate::graph::{CorrelationGraph, GraphView};
use crate::ids::Keyword;
use crate::seeding::{stream_rng, STREAM_SAMPLER};
use crate::steiner::Query;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("query keywords cover no vertex: {}", .0.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(", "))]
    EmptyKeywordCover(Vec<Keyword>),
}

/// Sampling parameters: `z` subgraphs of up to `p` vertices each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleConfig {
    pub z: u32,
    pub p: u32,
    pub seed: u64,
    /// Consecutive non-expanding steps tolerated before teleporting back to
    /// a keyword vertex.
    pub max_stall_steps: u32,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            z: 100,
            p: 100,
            seed: crate::DEFAULT_SEED,
            max_stall_steps: 100,
        }
    }
}

/// An induced subgraph of the correlation graph, identified by its sorted
/// vertex set. Edges and lengths are inherited from the parent.
#[derive(Clone, Debug)]
pub struct Subgraph<'g> {
    parent: &'g CorrelationGraph,
    vertices: Vec<u32>,
}

impl<'g> Subgraph<'g> {
    pub fn parent(&self) -> &'g CorrelationGraph {
        self.parent
    }

    /// Sorted global vertex indices.
    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, global: u32) -> bool {
        self.vertices.binary_search(&global).is_ok()
    }

    pub fn view(&self) -> GraphView<'_> {
        GraphView::restricted(self.parent, &self.vertices)
    }
}

/// The keyword vertices of a query: every vertex advertising at least one
/// query keyword, sorted and deduplicated.
fn keyword_nodes(g: &CorrelationGraph, q: &Query) -> Result<Vec<u32>, SampleError> {
    let mut missing = Vec::new();
    let mut nodes = BTreeSet::new();
    for kw in q.keywords() {
        let covering = g.keyword_vertices(kw);
        if covering.is_empty() {
            missing.push(kw.clone());
        }
        nodes.extend(covering.iter().copied());
    }
    if !missing.is_empty() {
        return Err(SampleError::EmptyKeywordCover(missing));
    }
    Ok(nodes.into_iter().collect())
}

/// Generates `cfg.z` induced subgraphs by seeded random walks.
pub fn sample_subgraphs<'g>(
    g: &'g CorrelationGraph,
    q: &Query,
    cfg: &SampleConfig,
) -> Result<Vec<Subgraph<'g>>, SampleError> {
    let n_key = keyword_nodes(g, q)?;
    Ok((0..cfg.z).map(|i| sample_one(g, &n_key, cfg, i)).collect())
}

/// Builds sample `index` alone. Used by `sample_subgraphs` and directly by
/// order-independence checks.
pub fn sample_single<'g>(
    g: &'g CorrelationGraph,
    q: &Query,
    cfg: &SampleConfig,
    index: u32,
) -> Result<Subgraph<'g>, SampleError> {
    let n_key = keyword_nodes(g, q)?;
    Ok(sample_one(g, &n_key, cfg, index))
}

fn sample_one<'g>(
    g: &'g CorrelationGraph,
    n_key: &[u32],
    cfg: &SampleConfig,
    index: u32,
) -> Subgraph<'g> {
    let mut rng = stream_rng(cfg.seed, STREAM_SAMPLER, index as u64);
    let target = (cfg.p as usize).min(g.vertex_count()).max(1);

    let mut visited: HashSet<u32> = HashSet::with_capacity(target);
    let mut current = n_key[rng.random_range(0..n_key.len())];
    visited.insert(current);
    let mut stall = 0u32;

    while visited.len() < target {
        let nbrs = g.neighbor_counts(current);
        let (next, _) = nbrs[rng.random_range(0..nbrs.len())];
        if visited.insert(next) {
            stall = 0;
        } else {
            stall += 1;
            if stall >= cfg.max_stall_steps {
                // Trapped in an already-visited region; restart from the
                // query's keyword vertices.
                current = n_key[rng.random_range(0..n_key.len())];
                visited.insert(current);
                stall = 0;
                continue;
            }
        }
        current = next;
    }

    let mut vertices: Vec<u32> = visited.into_iter().collect();
    vertices.sort_unstable();
    Subgraph {
        parent: g,
        vertices,
    }
}

/// For each subgraph, the query keywords it covers.
pub fn coverage_report(subgraphs: &[Subgraph<'_>], q: &Query) -> Vec<BTreeSet<Keyword>> {
    subgraphs
        .iter()
        .map(|sg| {
            let view = sg.view();
            q.keywords()
                .iter()
                .filter(|kw| view.covers(kw))
                .cloned()
                .collect()
        })
        .collect()
}

/// Debug dump: one sorted API-id array per subgraph.
pub fn dump_subgraphs_json(subgraphs: &[Subgraph<'_>]) -> String {
    let lists: Vec<Vec<&str>> = subgraphs
        .iter()
        .map(|sg| {
            sg.vertices()
                .iter()
                .map(|&v| sg.parent().api(v).as_str())
                .collect()
        })
        .collect();
    serde_json::to_string(&lists).expect("dump serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::Keyword;
    use crate::ingest::parse_corpus;
    use std::io::Cursor;

    fn ring_graph(n: usize) -> CorrelationGraph {
        // n vertices in a cycle; vertex 0 carries q1, vertex n/2 carries q2.
        let mut apis = String::new();
        for i in 0..n {
            let tags = if i == 0 {
                "[\"q1\"]"
            } else if i == n / 2 {
                "[\"q2\"]"
            } else {
                "[]"
            };
            apis.push_str(&format!("{{\"api\":\"v{i:03}\",\"tags\":{tags}}}\n"));
        }
        let mut apps = String::new();
        for i in 0..n {
            let j = (i + 1) % n;
            apps.push_str(&format!(
                "{{\"app\":\"m{i}\",\"apis\":[\"v{i:03}\",\"v{j:03}\"]}}\n"
            ));
        }
        let eco = parse_corpus(Cursor::new(apis), Cursor::new(apps)).unwrap();
        CorrelationGraph::build(&eco).unwrap()
    }

    fn q12() -> Query {
        Query::new(vec![
            Keyword::new("q1").unwrap(),
            Keyword::new("q2").unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn saturating_p_returns_the_whole_graph() {
        let g = ring_graph(8);
        let cfg = SampleConfig {
            z: 3,
            p: 100,
            seed: 1,
            max_stall_steps: 100,
        };
        let samples = sample_subgraphs(&g, &q12(), &cfg).unwrap();
        assert_eq!(samples.len(), 3);
        for sg in &samples {
            assert_eq!(sg.len(), g.vertex_count());
        }
    }

    #[test]
    fn sample_sizes_hit_the_target_exactly() {
        let g = ring_graph(20);
        let cfg = SampleConfig {
            z: 10,
            p: 7,
            seed: 9,
            max_stall_steps: 100,
        };
        for sg in sample_subgraphs(&g, &q12(), &cfg).unwrap() {
            assert_eq!(sg.len(), 7);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = ring_graph(16);
        let cfg = SampleConfig {
            z: 5,
            p: 6,
            seed: 42,
            max_stall_steps: 100,
        };
        let a = sample_subgraphs(&g, &q12(), &cfg).unwrap();
        let b = sample_subgraphs(&g, &q12(), &cfg).unwrap();
        let va: Vec<&[u32]> = a.iter().map(|s| s.vertices()).collect();
        let vb: Vec<&[u32]> = b.iter().map(|s| s.vertices()).collect();
        assert_eq!(va, vb);
        assert_eq!(dump_subgraphs_json(&a), dump_subgraphs_json(&b));
    }

    #[test]
    fn samples_are_order_independent() {
        let g = ring_graph(16);
        let cfg = SampleConfig {
            z: 6,
            p: 5,
            seed: 3,
            max_stall_steps: 100,
        };
        let batch = sample_subgraphs(&g, &q12(), &cfg).unwrap();
        for i in (0..6).rev() {
            let solo = sample_single(&g, &q12(), &cfg, i).unwrap();
            assert_eq!(solo.vertices(), batch[i as usize].vertices());
        }
    }

    #[test]
    fn missing_cover_is_an_error() {
        let g = ring_graph(8);
        let q = Query::new(vec![
            Keyword::new("q1").unwrap(),
            Keyword::new("nope").unwrap(),
        ])
        .unwrap();
        let err = sample_subgraphs(&g, &q, &SampleConfig::default()).unwrap_err();
        let SampleError::EmptyKeywordCover(missing) = err;
        assert_eq!(missing.len(), 1);
        assert_eq!(missing[0].as_str(), "nope");
    }

    #[test]
    fn coverage_report_tracks_keyword_presence() {
        let g = ring_graph(12);
        let cfg = SampleConfig {
            z: 20,
            p: 3,
            seed: 5,
            max_stall_steps: 100,
        };
        let samples = sample_subgraphs(&g, &q12(), &cfg).unwrap();
        let report = coverage_report(&samples, &q12());
        for (sg, covered) in samples.iter().zip(&report) {
            for kw in q12().keywords() {
                let has = sg.vertices().iter().any(|&v| g.tags(v).contains(kw));
                assert_eq!(has, covered.contains(kw));
            }
        }
        // Full-graph samples cover everything.
        let full = sample_subgraphs(
            &g,
            &q12(),
            &SampleConfig {
                z: 1,
                p: 100,
                seed: 5,
                max_stall_steps: 100,
            },
        )
        .unwrap();
        assert_eq!(coverage_report(&full, &q12())[0].len(), 2);
    }

    #[test]
    fn walk_vertices_stay_reachable_from_keyword_nodes() {
        // All samples are subsets of the connected parent containing at
        // least one keyword vertex.
        let g = ring_graph(10);
        let cfg = SampleConfig {
            z: 8,
            p: 4,
            seed: 11,
            max_stall_steps: 100,
        };
        let n_key = keyword_nodes(&g, &q12()).unwrap();
        for sg in sample_subgraphs(&g, &q12(), &cfg).unwrap() {
            assert!(sg.vertices().iter().any(|v| n_key.binary_search(v).is_ok()));
        }
    }
}
