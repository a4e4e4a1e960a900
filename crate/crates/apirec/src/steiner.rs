//! Exact minimum group Steiner tree search.
//!
//! The solver is a best-first dynamic program over states `(v, M)`: the
//! lightest known tree rooted at vertex `v` covering the query-keyword
//! subset `M` (a bitmask). Two transitions drive it:
//!
//! * growth — extend a tree across one edge to a new root, same mask;
//! * merge — fuse two trees at the same root with disjoint masks.
//!
//! States come off a min-weight priority queue with lazy deletion, so the
//! first full-mask state dequeued is optimal. Weights are kept exact: every
//! edge length `1/c` becomes the integer `L/c` for `L` the least common
//! multiple of the counts in the searched graph, so priority comparisons are
//! integer comparisons with no floating-point ties.

use std::collections::{BinaryHeap, HashMap, HashSet};

use thiserror::Error;

use crate::graph::{EdgeLength, GraphView};
use crate::ids::{ApiId, Keyword};
use crate::rational::{checked_lcm, Rational};

/// Bitmask width bound for query keywords.
pub const MAX_QUERY_KEYWORDS: usize = 32;

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("query has no keywords")]
    Empty,
    #[error("duplicate query keyword {0}")]
    DuplicateKeyword(Keyword),
    #[error("query has {r} keywords, more than the supported {MAX_QUERY_KEYWORDS}")]
    MaskWidthExceeded { r: usize },
}

/// A set of distinct required keywords. Order fixes bitmask bit positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    keywords: Vec<Keyword>,
}

impl Query {
    pub fn new(keywords: Vec<Keyword>) -> Result<Query, QueryError> {
        if keywords.is_empty() {
            return Err(QueryError::Empty);
        }
        if keywords.len() > MAX_QUERY_KEYWORDS {
            return Err(QueryError::MaskWidthExceeded { r: keywords.len() });
        }
        let mut seen = HashSet::new();
        for kw in &keywords {
            if !seen.insert(kw.clone()) {
                return Err(QueryError::DuplicateKeyword(kw.clone()));
            }
        }
        Ok(Query { keywords })
    }

    pub fn keywords(&self) -> &[Keyword] {
        &self.keywords
    }

    pub fn r(&self) -> usize {
        self.keywords.len()
    }

    pub fn full_mask(&self) -> u32 {
        if self.keywords.len() == MAX_QUERY_KEYWORDS {
            u32::MAX
        } else {
            (1u32 << self.keywords.len()) - 1
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("query keywords missing from the graph: {}", format_keywords(.missing))]
    KeywordUncovered { missing: Vec<Keyword> },
    #[error("edge counts need a common denominator beyond 128-bit range")]
    ScaleOverflow,
    #[error("internal search invariant violated: {0}")]
    Internal(String),
}

fn format_keywords(kws: &[Keyword]) -> String {
    kws.iter()
        .map(|k| k.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// A connected acyclic subgraph covering every query keyword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerTree {
    root: ApiId,
    /// Sorted vertex ids.
    vertices: Vec<ApiId>,
    /// Sorted edges with `a < b`.
    edges: Vec<TreeEdge>,
    total_length: Rational,
    covered: Vec<Keyword>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEdge {
    pub a: ApiId,
    pub b: ApiId,
    pub length: EdgeLength,
}

impl SteinerTree {
    pub fn root(&self) -> &ApiId {
        &self.root
    }

    pub fn vertices(&self) -> &[ApiId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn total_length(&self) -> Rational {
        self.total_length
    }

    /// The query keywords this tree covers, in query order.
    pub fn covered(&self) -> &[Keyword] {
        &self.covered
    }

    pub fn api_set(&self) -> std::collections::BTreeSet<ApiId> {
        self.vertices.iter().cloned().collect()
    }

    /// Assembles and validates a tree from local-index edges over a view.
    ///
    /// Checks tree shape (|E| = |V|-1, acyclic, connected), keyword
    /// coverage, and that edge lengths sum to the claimed weight when one is
    /// supplied.
    pub(crate) fn assemble(
        view: &GraphView<'_>,
        root_local: u32,
        local_edges: &[(u32, u32, u32)],
        query: &Query,
        expected_total: Option<Rational>,
    ) -> Result<SteinerTree, SearchError> {
        let internal = |msg: &str| SearchError::Internal(msg.to_string());

        let mut locals: Vec<u32> = local_edges
            .iter()
            .flat_map(|&(u, v, _)| [u, v])
            .chain([root_local])
            .collect();
        locals.sort_unstable();
        locals.dedup();

        if local_edges.len() + 1 != locals.len() {
            return Err(internal("edge count does not match vertex count"));
        }

        // Union-find over the tree vertices: any failed union is a cycle.
        let slot = |v: u32| locals.binary_search(&v).expect("vertex present");
        let mut parent: Vec<usize> = (0..locals.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut total = Rational::zero();
        let mut seen_edges = HashSet::new();
        for &(u, v, c) in local_edges {
            if u == v {
                return Err(internal("self-loop in tree"));
            }
            if !seen_edges.insert((u.min(v), u.max(v))) {
                return Err(internal("duplicate edge in tree"));
            }
            let (ru, rv) = (find(&mut parent, slot(u)), find(&mut parent, slot(v)));
            if ru == rv {
                return Err(internal("cycle in tree"));
            }
            parent[ru] = rv;
            total = total
                .checked_add(&Rational::reciprocal_of(c as u128))
                .ok_or_else(|| internal("length sum overflow"))?;
        }
        let root_slot = find(&mut parent, slot(root_local));
        for i in 0..locals.len() {
            if find(&mut parent, i) != root_slot {
                return Err(internal("tree is not connected"));
            }
        }

        if let Some(expected) = expected_total {
            if expected != total {
                return Err(internal("edge lengths do not sum to the state weight"));
            }
        }

        for kw in query.keywords() {
            if !locals.iter().any(|&v| view.tags(v).contains(kw)) {
                return Err(internal("tree does not cover the query"));
            }
        }

        let vertices: Vec<ApiId> = locals.iter().map(|&v| view.api(v).clone()).collect();
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let mut edges: Vec<TreeEdge> = local_edges
            .iter()
            .map(|&(u, v, c)| {
                let (a, b) = (view.api(u).clone(), view.api(v).clone());
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                TreeEdge {
                    a,
                    b,
                    length: EdgeLength::from_count(c),
                }
            })
            .collect();
        edges.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));

        Ok(SteinerTree {
            root: view.api(root_local).clone(),
            vertices,
            edges,
            total_length: total,
            covered: query.keywords().to_vec(),
        })
    }
}

/// Compatibility score of a tree: the reciprocal of its total length.
///
/// A single-vertex tree has length zero and maps to `Max`, which ranks above
/// every finite score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Score {
    Finite(Rational),
    Max,
}

impl Score {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Score::Finite(r) => Some(r.to_f64()),
            Score::Max => None,
        }
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Score::Max, Score::Max) => std::cmp::Ordering::Equal,
            (Score::Max, Score::Finite(_)) => std::cmp::Ordering::Greater,
            (Score::Finite(_), Score::Max) => std::cmp::Ordering::Less,
            (Score::Finite(a), Score::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub fn tree_compatibility(tree: &SteinerTree) -> Score {
    match tree.total_length().reciprocal() {
        Some(r) => Score::Finite(r),
        None => Score::Max,
    }
}

/// How a state's tree was formed; enough to rebuild its edge set.
#[derive(Clone, Copy)]
enum Provenance {
    /// Single vertex contributing one keyword; no edges.
    Leaf,
    /// Grown across the edge (from, v) out of state (from, same mask).
    Grown { from: u32 },
    /// Merge of (v, left_mask) and (v, mask ^ left_mask).
    Merged { left_mask: u32 },
}

struct BestEntry {
    weight: u128,
    prov: Provenance,
}

/// Heap key; `Ord` follows field order, so the tie-break on equal weight is
/// fewer covered keywords first, then smaller root, then smaller mask.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct PqKey {
    weight: u128,
    covered: u32,
    root: u32,
    mask: u32,
}

struct Instance {
    /// Per local vertex: (neighbor, scaled length, count).
    adj: Vec<Vec<(u32, u128, u32)>>,
    /// Per local vertex: query keywords it advertises.
    masks: Vec<u32>,
    scale: u128,
    full: u32,
}

impl Instance {
    fn build(view: &GraphView<'_>, query: &Query) -> Result<Instance, SearchError> {
        let n = view.len();
        let mut masks = vec![0u32; n];
        for (bit, kw) in query.keywords().iter().enumerate() {
            for v in 0..n as u32 {
                if view.tags(v).contains(kw) {
                    masks[v as usize] |= 1 << bit;
                }
            }
        }
        let mut missing = Vec::new();
        for (bit, kw) in query.keywords().iter().enumerate() {
            if !masks.iter().any(|m| m & (1 << bit) != 0) {
                missing.push(kw.clone());
            }
        }
        if !missing.is_empty() {
            return Err(SearchError::KeywordUncovered { missing });
        }

        let raw: Vec<Vec<(u32, u32)>> = (0..n as u32).map(|v| view.neighbors(v)).collect();
        let mut scale: u128 = 1;
        for list in &raw {
            for &(_, c) in list {
                scale = checked_lcm(scale, c as u128).ok_or(SearchError::ScaleOverflow)?;
            }
        }
        let adj = raw
            .into_iter()
            .map(|list| {
                list.into_iter()
                    .map(|(u, c)| (u, scale / c as u128, c))
                    .collect()
            })
            .collect();

        Ok(Instance {
            adj,
            masks,
            scale,
            full: query.full_mask(),
        })
    }
}

/// Finds the minimum-total-length group Steiner tree covering the query.
///
/// Returns `Ok(None)` when every keyword is present in the view but no
/// connected tree covers them all (possible on induced subgraphs, which may
/// be disconnected). Keywords absent from the view are an error carrying
/// the missing list.
pub fn min_group_steiner_tree(
    view: &GraphView<'_>,
    query: &Query,
) -> Result<Option<SteinerTree>, SearchError> {
    let inst = Instance::build(view, query)?;
    let n = inst.adj.len();

    let mut best: Vec<HashMap<u32, BestEntry>> = (0..n).map(|_| HashMap::new()).collect();
    let mut settled: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut heap: BinaryHeap<std::cmp::Reverse<PqKey>> = BinaryHeap::new();

    // One zero-weight leaf per (vertex, advertised query keyword). Larger
    // zero-weight masks arise from merging these, so any keyword subset a
    // vertex covers is reachable at weight zero.
    for v in 0..n as u32 {
        let m = inst.masks[v as usize];
        for bit in 0..32 {
            if m & (1 << bit) != 0 {
                relax(
                    &mut best[v as usize],
                    &mut heap,
                    v,
                    1u32 << bit,
                    0,
                    Provenance::Leaf,
                );
            }
        }
    }

    #[cfg(debug_assertions)]
    let mut last_settled_weight = 0u128;

    while let Some(std::cmp::Reverse(key)) = heap.pop() {
        let entry = match best[key.root as usize].get(&key.mask) {
            Some(e) => e,
            None => return Err(SearchError::Internal("queued state has no entry".into())),
        };
        if key.weight > entry.weight {
            continue; // stale
        }
        debug_assert_eq!(key.weight, entry.weight);
        #[cfg(debug_assertions)]
        {
            // Non-stale pops come off in nondecreasing weight order.
            debug_assert!(key.weight >= last_settled_weight);
            last_settled_weight = key.weight;
        }

        if key.mask == inst.full {
            let edges = reconstruct(&inst, &best, key.root, key.mask)?;
            let tree = SteinerTree::assemble(
                view,
                key.root,
                &edges,
                query,
                Some(Rational::new(key.weight, inst.scale)),
            )?;
            return Ok(Some(tree));
        }

        settled[key.root as usize].push(key.mask);

        // Growth: carry this tree across each incident edge.
        for &(u, step, _) in &inst.adj[key.root as usize] {
            let w = key.weight + step;
            relax(
                &mut best[u as usize],
                &mut heap,
                u,
                key.mask,
                w,
                Provenance::Grown { from: key.root },
            );
        }

        // Merge: fuse with every settled tree at this root covering a
        // disjoint keyword set. Settled weights are final, so the recorded
        // provenance stays valid.
        let root = key.root as usize;
        let merge_candidates: Vec<(u32, u128)> = settled[root]
            .iter()
            .filter(|&&other| other & key.mask == 0)
            .map(|&other| (other, best[root][&other].weight))
            .collect();
        for (other, other_weight) in merge_candidates {
            relax(
                &mut best[root],
                &mut heap,
                key.root,
                key.mask | other,
                key.weight + other_weight,
                Provenance::Merged {
                    left_mask: key.mask,
                },
            );
        }
    }

    Ok(None)
}

fn relax(
    best: &mut HashMap<u32, BestEntry>,
    heap: &mut BinaryHeap<std::cmp::Reverse<PqKey>>,
    root: u32,
    mask: u32,
    weight: u128,
    prov: Provenance,
) {
    let improved = match best.get(&mask) {
        Some(e) => weight < e.weight,
        None => true,
    };
    if improved {
        best.insert(mask, BestEntry { weight, prov });
        heap.push(std::cmp::Reverse(PqKey {
            weight,
            covered: mask.count_ones(),
            root,
            mask,
        }));
    }
}

/// Walks provenance links from a full-mask state back to leaves, collecting
/// tree edges. Merged parts cover disjoint keywords and, at the optimum,
/// share no edges; duplicates would mean the weight recurrence double
/// counted, so they are an internal error.
fn reconstruct(
    inst: &Instance,
    best: &[HashMap<u32, BestEntry>],
    root: u32,
    mask: u32,
) -> Result<Vec<(u32, u32, u32)>, SearchError> {
    let mut edges = Vec::new();
    let mut stack = vec![(root, mask)];
    let budget = 8 * (inst.adj.len() + MAX_QUERY_KEYWORDS) + 64;
    let mut visited = 0usize;
    while let Some((v, m)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return Err(SearchError::Internal("provenance cycle".into()));
        }
        let entry = best[v as usize]
            .get(&m)
            .ok_or_else(|| SearchError::Internal("missing provenance state".into()))?;
        match entry.prov {
            Provenance::Leaf => {}
            Provenance::Grown { from } => {
                let count = inst.adj[v as usize]
                    .iter()
                    .find(|&&(u, _, _)| u == from)
                    .map(|&(_, _, c)| c)
                    .ok_or_else(|| SearchError::Internal("grown edge not in graph".into()))?;
                edges.push((from.min(v), from.max(v), count));
                stack.push((from, m));
            }
            Provenance::Merged { left_mask } => {
                stack.push((v, left_mask));
                stack.push((v, m ^ left_mask));
            }
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CorrelationGraph;
    use crate::ingest::parse_corpus;
    use std::io::Cursor;

    fn kw(s: &str) -> Keyword {
        Keyword::new(s).unwrap()
    }

    fn query(kws: &[&str]) -> Query {
        Query::new(kws.iter().map(|s| kw(s)).collect()).unwrap()
    }

    /// Builds a graph with the given tagged vertices and weighted edges by
    /// synthesizing a corpus whose co-usage counts are exactly `count`.
    fn graph_from(vertices: &[(&str, &[&str])], edges: &[(&str, &str, u32)]) -> CorrelationGraph {
        let mut api_lines = String::new();
        for (api, tags) in vertices {
            let tags: Vec<String> = tags.iter().map(|t| format!("\"{t}\"")).collect();
            api_lines.push_str(&format!(
                "{{\"api\":\"{api}\",\"tags\":[{}]}}\n",
                tags.join(",")
            ));
        }
        let mut app_lines = String::new();
        let mut next = 0;
        for (a, b, count) in edges {
            for _ in 0..*count {
                app_lines.push_str(&format!(
                    "{{\"app\":\"m{next}\",\"apis\":[\"{a}\",\"{b}\"]}}\n"
                ));
                next += 1;
            }
        }
        let eco = parse_corpus(Cursor::new(api_lines), Cursor::new(app_lines)).unwrap();
        CorrelationGraph::build(&eco).unwrap()
    }

    #[test]
    fn query_rejects_duplicates_and_width() {
        assert!(matches!(
            Query::new(vec![kw("a"), kw("a")]),
            Err(QueryError::DuplicateKeyword(_))
        ));
        let many: Vec<Keyword> = (0..33).map(|i| kw(&format!("k{i}"))).collect();
        assert!(matches!(
            Query::new(many),
            Err(QueryError::MaskWidthExceeded { r: 33 })
        ));
        assert!(matches!(Query::new(vec![]), Err(QueryError::Empty)));
    }

    #[test]
    fn single_covering_vertex_is_a_zero_length_tree() {
        let g = graph_from(&[("a", &["q1", "q2"]), ("b", &["q3"])], &[("a", "b", 1)]);
        let view = GraphView::full(&g);
        let tree = min_group_steiner_tree(&view, &query(&["q1", "q2"]))
            .unwrap()
            .unwrap();
        assert_eq!(tree.vertices().len(), 1);
        assert_eq!(tree.edges().len(), 0);
        assert!(tree.total_length().is_zero());
        assert_eq!(tree_compatibility(&tree), Score::Max);
    }

    #[test]
    fn picks_the_lighter_of_two_candidate_trees() {
        // Two full-cover trees hang off the shared path x—hub: one through
        // "far" (count 1, length 1) and one through "near" (count 4,
        // length 1/4). The near variant must win.
        let g = graph_from(
            &[
                ("hub", &["q1"]),
                ("x", &["q3"]),
                ("near", &["q7"]),
                ("far", &["q7"]),
            ],
            &[("x", "hub", 2), ("hub", "near", 4), ("hub", "far", 1)],
        );
        let view = GraphView::full(&g);
        let tree = min_group_steiner_tree(&view, &query(&["q1", "q3", "q7"]))
            .unwrap()
            .unwrap();
        let names: Vec<&str> = tree.vertices().iter().map(|a| a.as_str()).collect();
        assert_eq!(names, ["hub", "near", "x"]);
        assert_eq!(tree.total_length(), Rational::new(3, 4));
        assert_eq!(
            tree_compatibility(&tree),
            Score::Finite(Rational::new(4, 3))
        );
    }

    #[test]
    fn overlapping_tag_sets_still_reach_the_optimum() {
        // Only "a" has q1 and only "b" has q3, but both carry q2, so any
        // full cover must combine trees whose masks overlap on q2 somewhere
        // along the way. The per-keyword leaf states make {a, x, b}
        // reachable.
        let g = graph_from(
            &[("a", &["q1", "q2"]), ("x", &[]), ("b", &["q2", "q3"])],
            &[("a", "x", 2), ("x", "b", 2)],
        );
        let view = GraphView::full(&g);
        let tree = min_group_steiner_tree(&view, &query(&["q1", "q2", "q3"]))
            .unwrap()
            .unwrap();
        let names: Vec<&str> = tree.vertices().iter().map(|a| a.as_str()).collect();
        assert_eq!(names, ["a", "b", "x"]);
        assert_eq!(tree.total_length(), Rational::new(1, 1));
    }

    #[test]
    fn grown_leaf_is_a_single_edge_path() {
        let g = graph_from(&[("a", &["q1"]), ("b", &["q2"])], &[("a", "b", 2)]);
        let view = GraphView::full(&g);
        let tree = min_group_steiner_tree(&view, &query(&["q1", "q2"]))
            .unwrap()
            .unwrap();
        assert_eq!(tree.edges().len(), 1);
        assert_eq!(tree.total_length(), Rational::new(1, 2));
    }

    #[test]
    fn missing_keyword_is_reported_with_names() {
        let g = graph_from(&[("a", &["q1"]), ("b", &["q2"])], &[("a", "b", 1)]);
        let view = GraphView::full(&g);
        let err = min_group_steiner_tree(&view, &query(&["q1", "zz"])).unwrap_err();
        match err {
            SearchError::KeywordUncovered { missing } => {
                assert_eq!(missing, vec![kw("zz")]);
            }
            other => panic!("expected KeywordUncovered, got {other:?}"),
        }
    }

    #[test]
    fn linking_nodes_are_interior() {
        // b carries nothing relevant; it may appear only as an interior
        // vertex of the tree.
        let g = graph_from(
            &[("a", &["q1"]), ("b", &[]), ("c", &["q2"])],
            &[("a", "b", 2), ("b", "c", 3)],
        );
        let view = GraphView::full(&g);
        let tree = min_group_steiner_tree(&view, &query(&["q1", "q2"]))
            .unwrap()
            .unwrap();
        assert_eq!(tree.total_length(), Rational::new(5, 6));
        // Leaves are exactly a and c.
        let mut degree: std::collections::HashMap<&str, usize> = Default::default();
        for e in tree.edges() {
            *degree.entry(e.a.as_str()).or_default() += 1;
            *degree.entry(e.b.as_str()).or_default() += 1;
        }
        assert_eq!(degree["a"], 1);
        assert_eq!(degree["c"], 1);
        assert_eq!(degree["b"], 2);
    }

    #[test]
    fn score_ordering_puts_max_first() {
        let a = Score::Finite(Rational::new(4, 1));
        let b = Score::Finite(Rational::new(4, 3));
        assert!(Score::Max > a);
        assert!(a > b);
    }
}
