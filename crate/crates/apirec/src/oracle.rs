//! Brute-force exact group Steiner solver for small instances.
//!
//! Ground truth for the search module: enumerates every vertex subset that
//! covers the query and is connected, takes the minimum spanning tree of
//! each induced subgraph, and returns the lightest. Any minimal tree on a
//! fixed vertex set is an MST of the induced subgraph, so the true optimum
//! is always among the candidates. All arithmetic here is plain rational
//! summation, deliberately sharing nothing with the search's scaled-integer
//! weight path.

use thiserror::Error;

use crate::graph::GraphView;
use crate::rational::Rational;
use crate::steiner::{Query, SearchError, SteinerTree};

/// Subset enumeration is capped here regardless of the caller's limit.
pub const ORACLE_VERTEX_CAP: usize = 14;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {0} vertices, beyond the brute-force cap")]
    TooLarge(usize),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Exhaustive minimum group Steiner tree, or `None` when no connected cover
/// exists. Ties between equal-weight subsets go to the lexicographically
/// smallest sorted vertex list.
pub fn oracle_exact(
    view: &GraphView<'_>,
    query: &Query,
    max_vertices: usize,
) -> Result<Option<SteinerTree>, OracleError> {
    let n = view.len();
    if n > max_vertices.min(ORACLE_VERTEX_CAP) {
        return Err(OracleError::TooLarge(n));
    }

    let mut vertex_masks = vec![0u32; n];
    for (bit, kw) in query.keywords().iter().enumerate() {
        for (v, mask) in vertex_masks.iter_mut().enumerate() {
            if view.tags(v as u32).contains(kw) {
                *mask |= 1 << bit;
            }
        }
    }
    let full = query.full_mask();
    let edges = view.edges();

    // (weight, sorted members, tree edges)
    type Candidate = (Rational, Vec<u32>, Vec<(u32, u32, u32)>);
    let mut best: Option<Candidate> = None;
    for subset in 1u32..(1u32 << n) {
        let covered = (0..n)
            .filter(|&v| subset & (1 << v) != 0)
            .fold(0u32, |m, v| m | vertex_masks[v]);
        if covered & full != full {
            continue;
        }
        let members: Vec<u32> = (0..n as u32).filter(|v| subset & (1 << v) != 0).collect();
        let Some((weight, tree_edges)) = induced_mst(&members, &edges) else {
            continue; // induced subgraph is disconnected
        };
        let replace = match &best {
            None => true,
            Some((w, verts, _)) => match weight.cmp(w) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => members < *verts,
                std::cmp::Ordering::Greater => false,
            },
        };
        if replace {
            best = Some((weight, members, tree_edges));
        }
    }

    match best {
        None => Ok(None),
        Some((_, members, tree_edges)) => {
            let tree = SteinerTree::assemble(view, members[0], &tree_edges, query, None)?;
            Ok(Some(tree))
        }
    }
}

type MstResult = (Rational, Vec<(u32, u32, u32)>);

/// Kruskal over the edges induced by `members`; `None` if they do not span.
fn induced_mst(members: &[u32], edges: &[(u32, u32, u32)]) -> Option<MstResult> {
    if members.len() == 1 {
        return Some((Rational::zero(), Vec::new()));
    }
    let mut candidates: Vec<(u32, u32, u32)> = edges
        .iter()
        .filter(|(u, v, _)| members.binary_search(u).is_ok() && members.binary_search(v).is_ok())
        .copied()
        .collect();
    // Ascending length = descending count; ties by endpoints for determinism.
    candidates.sort_by(|a, b| (b.2, a.0, a.1).cmp(&(a.2, b.0, b.1)));

    let slot = |v: u32| members.binary_search(&v).expect("member vertex");
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut picked = Vec::with_capacity(members.len() - 1);
    let mut weight = Rational::zero();
    for (u, v, c) in candidates {
        let (ru, rv) = (find(&mut parent, slot(u)), find(&mut parent, slot(v)));
        if ru == rv {
            continue;
        }
        parent[ru] = rv;
        picked.push((u, v, c));
        weight = weight + Rational::reciprocal_of(c as u128);
        if picked.len() == members.len() - 1 {
            return Some((weight, picked));
        }
    }
    None
}

/// A random small instance for cross-checking the tree search: a connected
/// co-usage graph (largest component of a random graph) and a query drawn
/// from tags present on its vertices.
pub struct RandomInstance {
    pub graph: crate::graph::CorrelationGraph,
    pub query: Query,
}

/// Deterministically generates instance `index`: up to `max_vertices`
/// vertices, edge density 0.3..0.8, counts 1..=5, and a query of at most
/// `max_r` keywords that all appear in the retained component.
pub fn random_instance(seed: u64, index: u64, max_vertices: usize, max_r: usize) -> RandomInstance {
    use crate::seeding::{stream_rng, STREAM_VERIFY};
    use rand::Rng;

    let mut rng = stream_rng(seed, STREAM_VERIFY, index);
    let tag_pool: Vec<String> = (0..max_r.max(3) + 2).map(|i| format!("t{i}")).collect();

    // Rejection loop: a draw can end up with no tagged vertex in the
    // retained component; redraw from the same stream until valid.
    loop {
        let n = rng.random_range(3..=max_vertices.max(3));
        let density: f64 = rng.random_range(0.3..0.8);

        let mut api_lines = String::new();
        for v in 0..n {
            let n_tags = rng.random_range(0..=2usize);
            let mut tags: Vec<&str> = Vec::new();
            for _ in 0..n_tags {
                let t = &tag_pool[rng.random_range(0..tag_pool.len())];
                if !tags.contains(&t.as_str()) {
                    tags.push(t);
                }
            }
            let rendered: Vec<String> = tags.iter().map(|t| format!("\"{t}\"")).collect();
            api_lines.push_str(&format!(
                "{{\"api\":\"v{v:02}\",\"tags\":[{}]}}\n",
                rendered.join(",")
            ));
        }

        // One app per co-usage unit so pair counts are exact.
        let mut app_lines = String::new();
        let mut next_app = 0usize;
        let mut any_edge = false;
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random_bool(density) {
                    any_edge = true;
                    let count = rng.random_range(1..=5);
                    for _ in 0..count {
                        app_lines.push_str(&format!(
                            "{{\"app\":\"m{next_app}\",\"apis\":[\"v{u:02}\",\"v{v:02}\"]}}\n"
                        ));
                        next_app += 1;
                    }
                }
            }
        }
        if !any_edge {
            continue;
        }

        let eco = crate::ingest::parse_corpus(
            std::io::Cursor::new(api_lines),
            std::io::Cursor::new(app_lines),
        )
        .expect("generated corpus is well-formed");
        let graph = match crate::graph::CorrelationGraph::build(&eco) {
            Ok(g) => g,
            Err(_) => continue,
        };

        let present: Vec<crate::ids::Keyword> = graph.keywords().cloned().collect();
        if present.is_empty() {
            continue;
        }
        let r = rng.random_range(1..=max_r.min(present.len()));
        let mut picks: Vec<usize> = (0..present.len()).collect();
        for i in 0..r {
            let j = rng.random_range(i..picks.len());
            picks.swap(i, j);
        }
        let keywords: Vec<crate::ids::Keyword> =
            picks[..r].iter().map(|&i| present[i].clone()).collect();
        let query = Query::new(keywords).expect("distinct present keywords");
        return RandomInstance { graph, query };
    }
}

/// Result of a search-vs-oracle cross-check run.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub instances: u32,
    /// Indices where the two solvers disagreed.
    pub mismatched_instances: Vec<u64>,
}

/// Runs `instances` random small instances through both solvers and compares
/// optimal weights exactly.
pub fn verify_against_oracle(instances: u32, seed: u64) -> VerifyOutcome {
    use crate::graph::GraphView;
    use crate::steiner::min_group_steiner_tree;
    use rayon::prelude::*;

    let mismatched_instances: Vec<u64> = (0..instances as u64)
        .into_par_iter()
        .filter(|&i| {
            let inst = random_instance(seed, i, 10, 3);
            let view = GraphView::full(&inst.graph);
            let searched = min_group_steiner_tree(&view, &inst.query);
            let truth = oracle_exact(&view, &inst.query, ORACLE_VERTEX_CAP);
            match (searched, truth) {
                (Ok(Some(a)), Ok(Some(b))) => a.total_length() != b.total_length(),
                (Ok(None), Ok(None)) => false,
                _ => true,
            }
        })
        .collect();
    VerifyOutcome {
        instances,
        mismatched_instances,
    }
}
