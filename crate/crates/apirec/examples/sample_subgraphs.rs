//! Random-walk subgraph sampling and keyword coverage.
//!
//! Draws z subgraphs of a synthetic correlation graph for one query and
//! reports how many cover every query keyword. Diversity of the final
//! recommendations comes from this sampling variety.
//!
//! Run: `cargo run --example sample_subgraphs`

use apirec::eval::{generate_corpus, SyntheticSpec};
use apirec::graph::CorrelationGraph;
use apirec::ingest::derive_query_sets;
use apirec::sampler::{coverage_report, sample_subgraphs, SampleConfig};
use apirec::steiner::Query;

fn main() {
    let eco = generate_corpus(&SyntheticSpec {
        n_apis: 200,
        n_apps: 800,
        n_keywords: 40,
        community_count: 5,
        ..SyntheticSpec::default()
    })
    .expect("synthetic corpus");
    let graph = CorrelationGraph::build(&eco).expect("graph builds");
    println!(
        "graph: {} vertices, {} edges",
        graph.vertex_count(),
        graph.edge_count()
    );

    // Use a real app's derived keyword set as the query.
    let query_set = derive_query_sets(&eco)
        .into_iter()
        .find(|qs| (3..=5).contains(&qs.keywords.len()))
        .expect("an app with a mid-sized keyword union");
    let query = Query::new(query_set.keywords.into_iter().collect()).unwrap();
    println!("query from {}: {:?}", query_set.app, query.keywords());

    for p in [10, 25, 50] {
        let cfg = SampleConfig {
            z: 50,
            p,
            ..SampleConfig::default()
        };
        let samples = sample_subgraphs(&graph, &query, &cfg).expect("keywords covered");
        let coverage = coverage_report(&samples, &query);
        let full = coverage.iter().filter(|c| c.len() == query.r()).count();
        let mean_covered: f64 =
            coverage.iter().map(|c| c.len()).sum::<usize>() as f64 / coverage.len() as f64;
        println!(
            "p={p:>3}: {}/{} samples cover all {} keywords (mean covered {:.2})",
            full,
            samples.len(),
            query.r(),
            mean_covered
        );
    }

    // Identical settings reproduce identical samples.
    let cfg = SampleConfig {
        z: 5,
        p: 20,
        ..SampleConfig::default()
    };
    let a = sample_subgraphs(&graph, &query, &cfg).unwrap();
    let b = sample_subgraphs(&graph, &query, &cfg).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| x.vertices() == y.vertices()));
    println!("resampling with the same seed reproduces the same subgraphs");
}
