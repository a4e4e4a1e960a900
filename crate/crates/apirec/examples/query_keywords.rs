//! End-to-end keyword query: corpus -> graph -> sampled Steiner searches ->
//! ranked, diversity-filtered API sets.
//!
//! Run: `cargo run --example query_keywords`

use apirec::eval::{generate_corpus, SyntheticSpec};
use apirec::graph::CorrelationGraph;
use apirec::ids::Keyword;
use apirec::pipeline::{recommend, RecommendOptions};
use apirec::steiner::{Query, Score};

fn main() {
    let eco = generate_corpus(&SyntheticSpec::default()).expect("synthetic corpus");
    let graph = CorrelationGraph::build(&eco).expect("graph builds");
    println!(
        "catalog: {} APIs, {} apps -> graph with {} vertices / {} edges\n",
        eco.api_count(),
        eco.app_count(),
        graph.vertex_count(),
        graph.edge_count()
    );

    let query = Query::new(
        ["kw000", "kw003", "kw007"]
            .iter()
            .map(|s| Keyword::new(s).unwrap())
            .collect(),
    )
    .unwrap();

    // z subgraph samples, each capped at p vertices; top k lists that are
    // pairwise theta-diverse.
    let opts = RecommendOptions {
        z: 100,
        p: 100,
        k: 5,
        theta: 0.5,
        ..RecommendOptions::default()
    };
    let result = recommend(&graph, &query, &opts).expect("query succeeds");

    println!(
        "top {} API sets for {:?} (theta = {}):",
        result.lists.len(),
        query.keywords(),
        result.theta
    );
    for (rank, list) in result.lists.iter().enumerate() {
        let apis: Vec<&str> = list.apis().iter().map(|a| a.as_str()).collect();
        let compat = match list.compatibility() {
            Score::Finite(r) => format!("{:.3}", r.to_f64()),
            Score::Max => "max".to_string(),
        };
        println!(
            "  #{} compat={compat:>6} from sample {:>3}: {apis:?}",
            rank + 1,
            list.source_subgraph()
        );
    }

    // Every returned pair clears the diversity threshold.
    let theta = apirec::Rational::from_f64(result.theta).unwrap();
    for i in 0..result.lists.len() {
        for j in (i + 1)..result.lists.len() {
            assert!(apirec::diversity(&result.lists[i], &result.lists[j]) >= theta);
        }
    }
    println!("\nall pairwise diversities >= {}", result.theta);
}
