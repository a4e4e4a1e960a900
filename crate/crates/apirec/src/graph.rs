//! The weighted API correlation graph.
//!
//! Vertices are APIs annotated with functional tags; an edge connects two
//! APIs with the number of apps that integrated both (the compatibility
//! count `c`), and carries length `1/c`. Only the largest connected
//! component of the raw co-usage graph is retained, and a keyword index maps
//! every tag to the vertices advertising it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{ApiId, Keyword};
use crate::ingest::Ecosystem;
use crate::rational::Rational;

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("no app integrates two or more APIs, so the graph has no edges")]
    NoEdges,
    #[error("unsupported graph file version {found} (expected {FORMAT_VERSION})")]
    VersionMismatch { found: u32 },
    #[error("corrupt graph payload: {reason}")]
    CorruptPayload { reason: String },
}

/// Length of an edge with co-usage count `c`: exactly `1/c`.
///
/// Stored as the count itself, so equality and ordering are exact and two
/// lengths compare by comparing counts in reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeLength {
    count: u32,
}

impl EdgeLength {
    pub fn from_count(count: u32) -> EdgeLength {
        assert!(count >= 1, "edge count must be positive");
        EdgeLength { count }
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn as_rational(&self) -> Rational {
        Rational::reciprocal_of(self.count as u128)
    }

    pub fn to_f64(&self) -> f64 {
        1.0 / self.count as f64
    }
}

impl PartialOrd for EdgeLength {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EdgeLength {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // 1/c is decreasing in c.
        other.count.cmp(&self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct VertexData {
    api: ApiId,
    tags: BTreeSet<Keyword>,
}

/// The retained co-usage graph plus its keyword index.
///
/// Immutable after build; reads are safe from any thread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationGraph {
    vertices: Vec<VertexData>,
    /// Per vertex: (neighbor index, co-usage count), neighbors ascending.
    adjacency: Vec<Vec<(u32, u32)>>,
    keyword_index: BTreeMap<Keyword, Vec<u32>>,
}

/// Shape facts recorded while building, for stats output and goldens.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BuildStats {
    pub vertices: usize,
    pub edges: usize,
    /// APIs participating in at least one co-usage pair, before the
    /// largest-component restriction.
    pub edge_bearing_apis: usize,
    /// vertices / edge_bearing_apis
    pub component_coverage: f64,
}

impl CorrelationGraph {
    /// Builds the correlation graph from co-usage records and restricts it
    /// to the largest connected component (ties broken by the component
    /// holding the smallest vertex index).
    pub fn build(eco: &Ecosystem) -> Result<CorrelationGraph, GraphError> {
        Ok(Self::build_with_stats(eco)?.0)
    }

    pub fn build_with_stats(eco: &Ecosystem) -> Result<(CorrelationGraph, BuildStats), GraphError> {
        // Count, per unordered API pair, the number of apps using both.
        // Each app contributes at most one to a pair because its API set is
        // deduplicated.
        let mut pair_counts: BTreeMap<(ApiId, ApiId), u32> = BTreeMap::new();
        for members in eco.apps().values() {
            let members: Vec<&ApiId> = members.iter().collect();
            for i in 0..members.len() {
                for j in (i + 1)..members.len() {
                    let key = (members[i].clone(), members[j].clone());
                    *pair_counts.entry(key).or_insert(0) += 1;
                }
            }
        }
        if pair_counts.is_empty() {
            return Err(GraphError::NoEdges);
        }

        // Provisional indices over edge-bearing APIs, in id order.
        let mut edge_bearing: BTreeSet<&ApiId> = BTreeSet::new();
        for (a, b) in pair_counts.keys() {
            edge_bearing.insert(a);
            edge_bearing.insert(b);
        }
        let provisional: Vec<&ApiId> = edge_bearing.iter().copied().collect();
        let index_of: HashMap<&ApiId, u32> = provisional
            .iter()
            .enumerate()
            .map(|(i, api)| (*api, i as u32))
            .collect();

        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); provisional.len()];
        for (a, b) in pair_counts.keys() {
            let (u, v) = (index_of[a], index_of[b]);
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }

        // Largest connected component; ties go to the component containing
        // the smallest vertex index, which is the first one discovered when
        // scanning from index 0.
        let mut component = vec![u32::MAX; provisional.len()];
        let mut sizes: Vec<usize> = Vec::new();
        for start in 0..provisional.len() {
            if component[start] != u32::MAX {
                continue;
            }
            let label = sizes.len() as u32;
            let mut stack = vec![start];
            component[start] = label;
            let mut size = 0usize;
            while let Some(v) = stack.pop() {
                size += 1;
                for &w in &adj[v] {
                    if component[w as usize] == u32::MAX {
                        component[w as usize] = label;
                        stack.push(w as usize);
                    }
                }
            }
            sizes.push(size);
        }
        let best = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(label, _)| label as u32)
            .expect("at least one component");

        // Re-index the retained vertices, still in id order.
        let retained: Vec<&ApiId> = provisional
            .iter()
            .enumerate()
            .filter(|(i, _)| component[*i] == best)
            .map(|(_, api)| *api)
            .collect();
        let final_index: HashMap<&ApiId, u32> = retained
            .iter()
            .enumerate()
            .map(|(i, api)| (*api, i as u32))
            .collect();

        let vertices: Vec<VertexData> = retained
            .iter()
            .map(|api| VertexData {
                api: (*api).clone(),
                tags: eco
                    .api_tags(api)
                    .expect("edge-bearing API is cataloged")
                    .clone(),
            })
            .collect();

        let mut adjacency: Vec<Vec<(u32, u32)>> = vec![Vec::new(); vertices.len()];
        let mut edges = 0usize;
        for ((a, b), count) in &pair_counts {
            let (Some(&u), Some(&v)) = (final_index.get(a), final_index.get(b)) else {
                continue;
            };
            adjacency[u as usize].push((v, *count));
            adjacency[v as usize].push((u, *count));
            edges += 1;
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let keyword_index = build_keyword_index(&vertices);

        let stats = BuildStats {
            vertices: vertices.len(),
            edges,
            edge_bearing_apis: provisional.len(),
            component_coverage: vertices.len() as f64 / provisional.len() as f64,
        };
        Ok((
            CorrelationGraph {
                vertices,
                adjacency,
                keyword_index,
            },
            stats,
        ))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn api(&self, v: u32) -> &ApiId {
        &self.vertices[v as usize].api
    }

    pub fn tags(&self, v: u32) -> &BTreeSet<Keyword> {
        &self.vertices[v as usize].tags
    }

    pub fn index_of(&self, api: &ApiId) -> Option<u32> {
        self.vertices
            .binary_search_by(|vd| vd.api.cmp(api))
            .ok()
            .map(|i| i as u32)
    }

    /// Neighbors of `v` with edge lengths, ascending by vertex index.
    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = (u32, EdgeLength)> + '_ {
        self.adjacency[v as usize]
            .iter()
            .map(|&(u, c)| (u, EdgeLength::from_count(c)))
    }

    pub(crate) fn neighbor_counts(&self, v: u32) -> &[(u32, u32)] {
        &self.adjacency[v as usize]
    }

    /// Vertices advertising `k`, ascending; empty when the keyword appears
    /// on no retained vertex.
    pub fn keyword_vertices(&self, k: &Keyword) -> &[u32] {
        self.keyword_index
            .get(k)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn has_keyword(&self, k: &Keyword) -> bool {
        self.keyword_index.contains_key(k)
    }

    pub fn keywords(&self) -> impl Iterator<Item = &Keyword> {
        self.keyword_index.keys()
    }

    /// All edges as (u, v, count) with u < v, ascending.
    pub fn edges(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adjacency.iter().enumerate() {
            for &(v, c) in list {
                if (u as u32) < v {
                    out.push((u as u32, v, c));
                }
            }
        }
        out
    }

    /// Versioned, deterministic JSON encoding.
    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            version: FORMAT_VERSION,
            vertices: self
                .vertices
                .iter()
                .map(|vd| VertexDoc {
                    api: vd.api.as_str().to_owned(),
                    tags: vd.tags.iter().map(|k| k.as_str().to_owned()).collect(),
                })
                .collect(),
            edges: self.edges(),
        };
        serde_json::to_string(&doc).expect("graph serialization cannot fail")
    }

    pub fn from_json(data: &str) -> Result<CorrelationGraph, GraphError> {
        let corrupt = |reason: String| GraphError::CorruptPayload { reason };

        // Peek at the version before strict decoding so version skew is
        // reported as such and not as a shape error.
        let probe: VersionProbe = serde_json::from_str(data).map_err(|e| corrupt(e.to_string()))?;
        if probe.version != FORMAT_VERSION {
            return Err(GraphError::VersionMismatch {
                found: probe.version,
            });
        }
        let doc: GraphDoc = serde_json::from_str(data).map_err(|e| corrupt(e.to_string()))?;

        let mut vertices = Vec::with_capacity(doc.vertices.len());
        for v in &doc.vertices {
            let api = ApiId::new(&v.api).map_err(|e| corrupt(e.to_string()))?;
            let mut tags = BTreeSet::new();
            for t in &v.tags {
                tags.insert(Keyword::new(t).map_err(|e| corrupt(e.to_string()))?);
            }
            vertices.push(VertexData { api, tags });
        }
        let n = vertices.len() as u32;
        for w in vertices.windows(2) {
            if w[0].api >= w[1].api {
                return Err(corrupt("vertices not sorted by API id".into()));
            }
        }

        let mut adjacency: Vec<Vec<(u32, u32)>> = vec![Vec::new(); vertices.len()];
        let mut prev: Option<(u32, u32)> = None;
        for &(u, v, c) in &doc.edges {
            if u >= v || v >= n {
                return Err(corrupt(format!("bad edge endpoints ({u},{v})")));
            }
            if c < 1 {
                return Err(corrupt(format!("edge ({u},{v}) has count {c}")));
            }
            if prev.is_some_and(|p| p >= (u, v)) {
                return Err(corrupt("edges not sorted or duplicated".into()));
            }
            prev = Some((u, v));
            adjacency[u as usize].push((v, c));
            adjacency[v as usize].push((u, c));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        // The file claims to be a retained component, so it must be connected
        // with no isolated vertices.
        if vertices.is_empty() {
            return Err(corrupt("graph has no vertices".into()));
        }
        let mut seen = vec![false; vertices.len()];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 0usize;
        while let Some(v) = stack.pop() {
            count += 1;
            for &(u, _) in &adjacency[v as usize] {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    stack.push(u);
                }
            }
        }
        if count != vertices.len() {
            return Err(corrupt("graph is not connected".into()));
        }

        let keyword_index = build_keyword_index(&vertices);
        Ok(CorrelationGraph {
            vertices,
            adjacency,
            keyword_index,
        })
    }
}

/// Read-only view of either the whole graph or an induced subgraph, with
/// dense local vertex indices `0..len`.
#[derive(Clone, Copy)]
pub struct GraphView<'g> {
    parent: &'g CorrelationGraph,
    /// Sorted global vertex ids, or `None` for the full graph.
    members: Option<&'g [u32]>,
}

impl<'g> GraphView<'g> {
    pub fn full(parent: &'g CorrelationGraph) -> GraphView<'g> {
        GraphView {
            parent,
            members: None,
        }
    }

    /// `members` must be sorted, deduplicated, and in range.
    pub(crate) fn restricted(parent: &'g CorrelationGraph, members: &'g [u32]) -> GraphView<'g> {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        GraphView {
            parent,
            members: Some(members),
        }
    }

    pub fn parent(&self) -> &'g CorrelationGraph {
        self.parent
    }

    pub fn len(&self) -> usize {
        match self.members {
            Some(m) => m.len(),
            None => self.parent.vertex_count(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn global(&self, local: u32) -> u32 {
        match self.members {
            Some(m) => m[local as usize],
            None => local,
        }
    }

    pub fn local(&self, global: u32) -> Option<u32> {
        match self.members {
            Some(m) => m.binary_search(&global).ok().map(|i| i as u32),
            None => Some(global),
        }
    }

    pub fn api(&self, local: u32) -> &'g ApiId {
        self.parent.api(self.global(local))
    }

    pub fn tags(&self, local: u32) -> &'g BTreeSet<Keyword> {
        self.parent.tags(self.global(local))
    }

    /// Induced neighbors of a local vertex as (local index, count).
    pub fn neighbors(&self, local: u32) -> Vec<(u32, u32)> {
        self.parent
            .neighbor_counts(self.global(local))
            .iter()
            .filter_map(|&(g, c)| self.local(g).map(|l| (l, c)))
            .collect()
    }

    /// Induced edges as (u, v, count) with u < v in local indices, ascending.
    pub fn edges(&self) -> Vec<(u32, u32, u32)> {
        let mut out = Vec::new();
        for u in 0..self.len() as u32 {
            for (v, c) in self.neighbors(u) {
                if u < v {
                    out.push((u, v, c));
                }
            }
        }
        out
    }

    /// Does any vertex of the view advertise `k`?
    pub fn covers(&self, k: &Keyword) -> bool {
        let globals = self.parent.keyword_vertices(k);
        match self.members {
            None => !globals.is_empty(),
            Some(members) => {
                // Both lists are sorted; march the shorter strategy.
                let mut i = 0;
                let mut j = 0;
                while i < globals.len() && j < members.len() {
                    match globals[i].cmp(&members[j]) {
                        std::cmp::Ordering::Equal => return true,
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                    }
                }
                false
            }
        }
    }
}

fn build_keyword_index(vertices: &[VertexData]) -> BTreeMap<Keyword, Vec<u32>> {
    let mut index: BTreeMap<Keyword, Vec<u32>> = BTreeMap::new();
    for (i, vd) in vertices.iter().enumerate() {
        for kw in &vd.tags {
            index.entry(kw.clone()).or_default().push(i as u32);
        }
    }
    index
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    version: u32,
    vertices: Vec<VertexDoc>,
    edges: Vec<(u32, u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct VertexDoc {
    api: String,
    tags: Vec<String>,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}
