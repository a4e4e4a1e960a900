//! Ranking and diversification of per-subgraph optimal trees.
//!
//! Each sampled subgraph contributes at most one optimal tree; this module
//! turns those candidates into a ranked top-K list whose members are
//! pairwise diverse above a threshold theta.

use std::collections::BTreeSet;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::ids::ApiId;
use crate::rational::Rational;
use crate::steiner::{tree_compatibility, Score, SteinerTree};

/// One candidate recommendation: the API set of a Steiner tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationList {
    apis: BTreeSet<ApiId>,
    total_length: Rational,
    compatibility: Score,
    source_subgraph: usize,
}

impl RecommendationList {
    pub fn from_tree(tree: &SteinerTree, source_subgraph: usize) -> RecommendationList {
        RecommendationList {
            apis: tree.api_set(),
            total_length: tree.total_length(),
            compatibility: tree_compatibility(tree),
            source_subgraph,
        }
    }

    /// Builds a list from raw parts, for scoring recommendations that did
    /// not come from a tree search. `apis` must be nonempty.
    pub fn from_parts(
        apis: BTreeSet<ApiId>,
        total_length: Rational,
        compatibility: Score,
        source_subgraph: usize,
    ) -> RecommendationList {
        assert!(!apis.is_empty(), "recommendation list must be nonempty");
        RecommendationList {
            apis,
            total_length,
            compatibility,
            source_subgraph,
        }
    }

    pub fn apis(&self) -> &BTreeSet<ApiId> {
        &self.apis
    }

    pub fn total_length(&self) -> Rational {
        self.total_length
    }

    pub fn compatibility(&self) -> Score {
        self.compatibility
    }

    pub fn source_subgraph(&self) -> usize {
        self.source_subgraph
    }

    /// Ranking key: lighter trees first (equivalently, descending
    /// compatibility with Max on top), then fewer APIs, then the API id
    /// sequence.
    fn rank_key(&self) -> (Rational, usize, &BTreeSet<ApiId>) {
        (self.total_length, self.apis.len(), &self.apis)
    }
}

/// Pairwise diversity of two API sets: `1 - |A ∩ B| / (|A| + |B|)`.
///
/// Exact rational; 1 for disjoint sets, 1/2 for identical ones.
pub fn diversity(a: &RecommendationList, b: &RecommendationList) -> Rational {
    set_diversity(a.apis(), b.apis())
}

pub fn set_diversity(a: &BTreeSet<ApiId>, b: &BTreeSet<ApiId>) -> Rational {
    debug_assert!(!a.is_empty() && !b.is_empty());
    let common = a.intersection(b).count() as u128;
    let denom = (a.len() + b.len()) as u128;
    // 1 - common/denom
    Rational::new(denom - common, denom)
}

/// Ranked, theta-diversified recommendation lists.
#[derive(Debug, Clone)]
pub struct RankedResult {
    pub lists: Vec<RecommendationList>,
    pub theta: f64,
    pub k: usize,
}

impl RankedResult {
    /// Serializable form following the query result schema.
    pub fn to_report<'a>(&'a self, query: &'a [crate::ids::Keyword]) -> QueryReport<'a> {
        QueryReport {
            result: self,
            query,
        }
    }
}

/// Sorts candidates by rank order, optionally collapsing identical API sets
/// to their lightest representative.
pub fn candidates_by_compatibility(
    trees: &[Option<SteinerTree>],
    dedupe: bool,
) -> Vec<RecommendationList> {
    let mut lists: Vec<RecommendationList> = trees
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            t.as_ref()
                .map(|tree| RecommendationList::from_tree(tree, i))
        })
        .collect();
    lists.sort_by(|a, b| {
        a.rank_key()
            .cmp(&b.rank_key())
            .then(a.source_subgraph.cmp(&b.source_subgraph))
    });
    if dedupe {
        // Sorted order puts the lightest copy of an API set first.
        let mut seen: BTreeSet<Vec<ApiId>> = BTreeSet::new();
        lists.retain(|l| seen.insert(l.apis.iter().cloned().collect()));
    }
    lists
}

/// Greedy theta filter over already-ordered candidates: accept the next one
/// iff its diversity to every accepted list is at least theta. The theta
/// comparison is exact (the f64 is converted to its exact rational value).
pub fn select_diverse(
    candidates: Vec<RecommendationList>,
    k: usize,
    theta: f64,
) -> Vec<RecommendationList> {
    greedy_select(candidates, k, theta_rational(theta))
}

fn greedy_select(
    candidates: Vec<RecommendationList>,
    k: usize,
    theta: Rational,
) -> Vec<RecommendationList> {
    let mut picked: Vec<RecommendationList> = Vec::new();
    for cand in candidates {
        if picked.len() == k {
            break;
        }
        if picked.iter().all(|p| diversity(p, &cand) >= theta) {
            picked.push(cand);
        }
    }
    picked
}

fn theta_rational(theta: f64) -> Rational {
    Rational::from_f64(theta).expect("theta must be a finite value in [0, 1]")
}

/// Ranks candidate trees and greedily selects up to `k` pairwise-diverse
/// lists. Absent trees are dropped, identical API sets are collapsed to the
/// lightest copy, and fewer than `k` results is a valid outcome.
pub fn rank_and_diversify(trees: &[Option<SteinerTree>], k: usize, theta: f64) -> RankedResult {
    assert!(k >= 1, "k must be at least 1");
    assert!((0.0..=1.0).contains(&theta), "theta must be in [0, 1]");
    RankedResult {
        lists: greedy_select(
            candidates_by_compatibility(trees, true),
            k,
            theta_rational(theta),
        ),
        theta,
        k,
    }
}

/// Evaluation-mode selection: same ranking and theta filter, but identical
/// API sets from different subgraphs are kept as distinct candidates, the
/// way repeated sampled compositions occur in the wild.
pub fn rank_and_diversify_keeping_duplicates(
    trees: &[Option<SteinerTree>],
    k: usize,
    theta: f64,
) -> RankedResult {
    assert!(k >= 1, "k must be at least 1");
    assert!((0.0..=1.0).contains(&theta), "theta must be in [0, 1]");
    RankedResult {
        lists: greedy_select(
            candidates_by_compatibility(trees, false),
            k,
            theta_rational(theta),
        ),
        theta,
        k,
    }
}

/// Per-list precision against a ground-truth API set.
pub fn precision(list: &RecommendationList, truth: &BTreeSet<ApiId>) -> Rational {
    let hit = list.apis().intersection(truth).count() as u128;
    Rational::new(hit, list.apis().len() as u128)
}

/// Evaluation-mode ordering: precision against the truth set descending,
/// ties by compatibility descending, then the standard rank key.
pub fn rank_by_accuracy(
    lists: &[RecommendationList],
    truth: &BTreeSet<ApiId>,
) -> Vec<RecommendationList> {
    assert!(!truth.is_empty(), "truth set must be nonempty");
    let mut out = lists.to_vec();
    out.sort_by(|a, b| {
        precision(b, truth)
            .cmp(&precision(a, truth))
            .then_with(|| b.compatibility.cmp(&a.compatibility))
            .then_with(|| a.rank_key().cmp(&b.rank_key()))
            .then_with(|| a.source_subgraph.cmp(&b.source_subgraph))
    });
    out
}

/// Borrowing serializer for the query result JSON:
/// `{"query":[...],"k":K,"theta":T,"lists":[{"apis":[...],
///   "compatibility":float|"max","diversity_to_prev":[...]}]}`.
pub struct QueryReport<'a> {
    result: &'a RankedResult,
    query: &'a [crate::ids::Keyword],
}

impl Serialize for QueryReport<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(4))?;
        let query: Vec<&str> = self.query.iter().map(|k| k.as_str()).collect();
        map.serialize_entry("query", &query)?;
        map.serialize_entry("k", &self.result.k)?;
        map.serialize_entry("theta", &self.result.theta)?;

        #[derive(Serialize)]
        struct ListEntry<'b> {
            apis: Vec<&'b str>,
            compatibility: CompatField,
            diversity_to_prev: Vec<f64>,
        }
        #[derive(Serialize)]
        #[serde(untagged)]
        enum CompatField {
            Finite(f64),
            Max(&'static str),
        }

        let lists: Vec<ListEntry<'_>> = self
            .result
            .lists
            .iter()
            .enumerate()
            .map(|(i, l)| ListEntry {
                apis: l.apis().iter().map(|a| a.as_str()).collect(),
                compatibility: match l.compatibility() {
                    Score::Finite(r) => CompatField::Finite(r.to_f64()),
                    Score::Max => CompatField::Max("max"),
                },
                diversity_to_prev: self.result.lists[..i]
                    .iter()
                    .map(|prev| diversity(prev, l).to_f64())
                    .collect(),
            })
            .collect();
        map.serialize_entry("lists", &lists)?;
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::Keyword;

    fn api_set(names: &[&str]) -> BTreeSet<ApiId> {
        names.iter().map(|n| ApiId::new(n).unwrap()).collect()
    }

    fn list(names: &[&str], length: Rational, source: usize) -> RecommendationList {
        RecommendationList {
            apis: api_set(names),
            total_length: length,
            compatibility: match length.reciprocal() {
                Some(r) => Score::Finite(r),
                None => Score::Max,
            },
            source_subgraph: source,
        }
    }

    #[test]
    fn worked_diversity_value() {
        let a = api_set(&["api1", "api2", "api3"]);
        let b = api_set(&["api1", "api4"]);
        assert_eq!(set_diversity(&a, &b), Rational::new(4, 5));
        assert_eq!(set_diversity(&a, &b).to_f64(), 0.8);
    }

    #[test]
    fn identical_lists_score_half_and_disjoint_score_one() {
        let a = api_set(&["x", "y"]);
        assert_eq!(set_diversity(&a, &a), Rational::new(1, 2));
        let b = api_set(&["z", "w"]);
        assert_eq!(set_diversity(&a, &b), Rational::from_integer(1));
    }

    fn tree_on_two_vertices(a: &str, b: &str, count: u32) -> SteinerTree {
        use crate::graph::CorrelationGraph;
        use crate::ingest::parse_corpus;
        use std::io::Cursor;
        let apis = format!(
            "{{\"api\":\"{a}\",\"tags\":[\"q1\"]}}\n{{\"api\":\"{b}\",\"tags\":[\"q2\"]}}\n"
        );
        let apps: String = (0..count)
            .map(|i| format!("{{\"app\":\"m{i}\",\"apis\":[\"{a}\",\"{b}\"]}}\n"))
            .collect();
        let eco = parse_corpus(Cursor::new(apis), Cursor::new(apps)).unwrap();
        let g = Box::leak(Box::new(CorrelationGraph::build(&eco).unwrap()));
        let q = crate::steiner::Query::new(vec![
            Keyword::new("q1").unwrap(),
            Keyword::new("q2").unwrap(),
        ])
        .unwrap();
        crate::steiner::min_group_steiner_tree(&crate::graph::GraphView::full(g), &q)
            .unwrap()
            .unwrap()
    }

    #[test]
    fn single_tree_yields_single_list() {
        let tree = tree_on_two_vertices("a", "b", 2);
        let result = rank_and_diversify(&[Some(tree)], 10, 0.5);
        assert_eq!(result.lists.len(), 1);
        assert_eq!(
            result.lists[0].compatibility(),
            Score::Finite(Rational::from_integer(2))
        );
    }

    #[test]
    fn identical_api_sets_are_deduped() {
        let t1 = tree_on_two_vertices("a", "b", 2);
        let t2 = tree_on_two_vertices("a", "b", 2);
        let result = rank_and_diversify(&[Some(t1), Some(t2), None], 10, 0.5);
        assert_eq!(result.lists.len(), 1);
        assert_eq!(result.lists[0].source_subgraph(), 0);
    }

    #[test]
    fn eval_mode_keeps_duplicates() {
        let t1 = tree_on_two_vertices("a", "b", 2);
        let t2 = tree_on_two_vertices("a", "b", 2);
        let result = rank_and_diversify_keeping_duplicates(&[Some(t1), Some(t2)], 10, 0.5);
        assert_eq!(result.lists.len(), 2);
    }

    #[test]
    fn greedy_filter_enforces_theta() {
        let lists = vec![
            list(&["a", "b"], Rational::new(1, 4), 0),
            list(&["a", "c"], Rational::new(1, 3), 1),
            list(&["d", "e"], Rational::new(1, 2), 2),
        ];
        // diversity({a,b},{a,c}) = 1 - 1/4 = 0.75
        let cands = lists.clone();
        let picked = greedy_select(cands, 10, Rational::new(4, 5));
        // Second list fails the 0.8 threshold against the first.
        let names: Vec<usize> = picked.iter().map(|l| l.source_subgraph()).collect();
        assert_eq!(names, vec![0, 2]);
    }

    #[test]
    fn theta_zero_is_plain_top_k() {
        let lists: Vec<Option<SteinerTree>> = vec![
            Some(tree_on_two_vertices("a", "b", 4)),
            Some(tree_on_two_vertices("a", "c", 2)),
            Some(tree_on_two_vertices("a", "d", 1)),
        ];
        let all = rank_and_diversify(&lists, 2, 0.0);
        assert_eq!(all.lists.len(), 2);
        // Ordered by descending compatibility.
        assert_eq!(
            all.lists[0].compatibility(),
            Score::Finite(Rational::from_integer(4))
        );
        assert_eq!(
            all.lists[1].compatibility(),
            Score::Finite(Rational::from_integer(2))
        );
    }

    #[test]
    fn theta_one_forces_disjoint_lists() {
        let lists: Vec<Option<SteinerTree>> = vec![
            Some(tree_on_two_vertices("a", "b", 4)),
            Some(tree_on_two_vertices("a", "c", 3)),
            Some(tree_on_two_vertices("d", "e", 2)),
        ];
        let picked = rank_and_diversify(&lists, 10, 1.0);
        assert_eq!(picked.lists.len(), 2);
        for i in 0..picked.lists.len() {
            for j in (i + 1)..picked.lists.len() {
                assert_eq!(
                    diversity(&picked.lists[i], &picked.lists[j]),
                    Rational::from_integer(1)
                );
            }
        }
    }

    #[test]
    fn empty_input_is_a_valid_empty_result() {
        let result = rank_and_diversify(&[None, None], 5, 0.5);
        assert!(result.lists.is_empty());
    }

    #[test]
    fn selection_is_a_subsequence_of_the_ranked_candidates() {
        let lists: Vec<Option<SteinerTree>> = vec![
            Some(tree_on_two_vertices("a", "b", 4)),
            Some(tree_on_two_vertices("c", "d", 3)),
            Some(tree_on_two_vertices("a", "e", 2)),
            Some(tree_on_two_vertices("f", "g", 1)),
        ];
        let ranked = candidates_by_compatibility(&lists, true);
        let picked = rank_and_diversify(&lists, 10, 0.6);
        let mut cursor = 0;
        for sel in &picked.lists {
            let pos = ranked[cursor..]
                .iter()
                .position(|c| c == sel)
                .expect("selected list must appear after the previous one");
            cursor += pos + 1;
        }
    }

    #[test]
    fn accuracy_ranking_puts_exact_match_first() {
        let truth = api_set(&["a", "b"]);
        let lists = vec![
            list(&["a", "x"], Rational::new(1, 4), 0),
            list(&["a", "b"], Rational::new(1, 2), 1),
        ];
        let ranked = rank_by_accuracy(&lists, &truth);
        assert_eq!(ranked[0].source_subgraph(), 1);
        assert_eq!(precision(&ranked[0], &truth), Rational::from_integer(1));
    }

    #[test]
    fn accuracy_ties_break_by_compatibility() {
        let truth = api_set(&["a"]);
        let lists = vec![
            list(&["a", "x"], Rational::new(1, 2), 0),
            list(&["a", "y"], Rational::new(1, 4), 1),
        ];
        let ranked = rank_by_accuracy(&lists, &truth);
        // Equal precision 1/2; the length-1/4 list has compatibility 4 > 2.
        assert_eq!(ranked[0].source_subgraph(), 1);
    }

    #[test]
    fn report_schema_shape() {
        let tree = tree_on_two_vertices("a", "b", 2);
        let result = rank_and_diversify(&[Some(tree)], 10, 0.5);
        let query = vec![Keyword::new("q1").unwrap(), Keyword::new("q2").unwrap()];
        let json = serde_json::to_string(&result.to_report(&query)).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["k"], 10);
        assert_eq!(value["theta"], 0.5);
        assert_eq!(value["query"][0], "q1");
        assert_eq!(value["lists"][0]["apis"][0], "a");
        assert_eq!(value["lists"][0]["compatibility"], 2.0);
        assert!(value["lists"][0]["diversity_to_prev"]
            .as_array()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn max_compatibility_serializes_as_string() {
        let l = list(&["solo"], Rational::zero(), 0);
        let result = RankedResult {
            lists: vec![l],
            theta: 0.5,
            k: 10,
        };
        let query = vec![Keyword::new("q1").unwrap()];
        let json = serde_json::to_string(&result.to_report(&query)).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["lists"][0]["compatibility"], "max");
    }
}
