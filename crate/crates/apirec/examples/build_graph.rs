//! Build a correlation graph from co-usage records.
//!
//! Parses a small inline corpus, builds the graph, and prints its vertices,
//! edges, and keyword index.
//!
//! Run: `cargo run --example build_graph`

use std::io::Cursor;

use apirec::graph::CorrelationGraph;
use apirec::ingest::parse_corpus;

fn main() {
    // One JSON record per line: APIs with functional tags, then the apps
    // that integrate them. The pair (maps, traffic) is co-used by three
    // apps, so its edge carries count 3 and length 1/3.
    let api_records = concat!(
        "{\"api\":\"maps\",\"tags\":[\"mapping\"]}\n",
        "{\"api\":\"traffic\",\"tags\":[\"mapping\",\"realtime\"]}\n",
        "{\"api\":\"sms\",\"tags\":[\"messaging\"]}\n",
        "{\"api\":\"checkout\",\"tags\":[\"payments\"]}\n",
        "{\"api\":\"fax\",\"tags\":[\"legacy\"]}\n",
    );
    let app_records = concat!(
        "{\"app\":\"ride-hail\",\"apis\":[\"maps\",\"traffic\",\"checkout\"]}\n",
        "{\"app\":\"courier\",\"apis\":[\"maps\",\"traffic\",\"sms\"]}\n",
        "{\"app\":\"road-report\",\"apis\":[\"maps\",\"traffic\"]}\n",
        "{\"app\":\"paper-age\",\"apis\":[\"fax\"]}\n",
    );

    let eco =
        parse_corpus(Cursor::new(api_records), Cursor::new(app_records)).expect("corpus parses");
    println!("corpus: {} APIs, {} apps", eco.api_count(), eco.app_count());

    let (graph, stats) = CorrelationGraph::build_with_stats(&eco).expect("graph builds");
    println!(
        "graph: {} vertices, {} edges ({}% of edge-bearing APIs retained)",
        stats.vertices,
        stats.edges,
        (stats.component_coverage * 100.0).round()
    );
    // fax never co-occurs with anything, so it carries no edge and is not a
    // vertex at all.

    println!("\nedges (count, length):");
    for (u, v, c) in graph.edges() {
        println!(
            "  {} -- {}  c={}  length=1/{}",
            graph.api(u),
            graph.api(v),
            c,
            c
        );
    }

    println!("\nkeyword index:");
    for kw in graph.keywords() {
        let apis: Vec<&str> = graph
            .keyword_vertices(kw)
            .iter()
            .map(|&v| graph.api(v).as_str())
            .collect();
        println!("  {kw}: {apis:?}");
    }

    // Graphs serialize to a versioned JSON document and round-trip exactly.
    let encoded = graph.to_json();
    let decoded = CorrelationGraph::from_json(&encoded).expect("round trip");
    assert_eq!(graph, decoded);
    println!("\nserialized {} bytes, round-trips exactly", encoded.len());
}
