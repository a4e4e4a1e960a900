//! Minimum group Steiner tree search on a hand-built graph.
//!
//! Two candidate trees can satisfy the same query; the search returns the
//! one with the smaller total length (better compatibility), and the
//! brute-force solver agrees.
//!
//! Run: `cargo run --example steiner_search`

use std::io::Cursor;

use apirec::graph::{CorrelationGraph, GraphView};
use apirec::ids::Keyword;
use apirec::oracle::oracle_exact;
use apirec::steiner::{min_group_steiner_tree, tree_compatibility, Query, Score};

fn main() {
    // geo --(c=2)-- hub, and two ways to add a payments vertex:
    //   hub --(c=4)-- pay_a   length 1/4
    //   hub --(c=1)-- pay_b   length 1
    let api_records = concat!(
        "{\"api\":\"geo\",\"tags\":[\"mapping\"]}\n",
        "{\"api\":\"hub\",\"tags\":[\"messaging\"]}\n",
        "{\"api\":\"pay_a\",\"tags\":[\"payments\"]}\n",
        "{\"api\":\"pay_b\",\"tags\":[\"payments\"]}\n",
    );
    let mut app_records = String::new();
    let mut n = 0;
    let mut co_use = |a: &str, b: &str, times: usize| {
        for _ in 0..times {
            app_records.push_str(&format!(
                "{{\"app\":\"m{n}\",\"apis\":[\"{a}\",\"{b}\"]}}\n"
            ));
            n += 1;
        }
    };
    co_use("geo", "hub", 2);
    co_use("hub", "pay_a", 4);
    co_use("hub", "pay_b", 1);

    let eco = apirec::parse_corpus(Cursor::new(api_records), Cursor::new(app_records)).unwrap();
    let graph = CorrelationGraph::build(&eco).unwrap();

    let query = Query::new(
        ["mapping", "messaging", "payments"]
            .iter()
            .map(|s| Keyword::new(s).unwrap())
            .collect(),
    )
    .unwrap();

    let view = GraphView::full(&graph);
    let tree = min_group_steiner_tree(&view, &query)
        .expect("search runs")
        .expect("query is coverable");

    println!("query: {:?}", query.keywords());
    println!("tree rooted at {}:", tree.root());
    for edge in tree.edges() {
        println!(
            "  {} -- {}  length 1/{}",
            edge.a,
            edge.b,
            edge.length.count()
        );
    }
    println!("total length: {}", tree.total_length());
    match tree_compatibility(&tree) {
        Score::Finite(score) => println!("compatibility: {score}"),
        Score::Max => println!("compatibility: max (single vertex)"),
    }
    // The cheap payments edge wins: geo--hub--pay_a, length 1/2 + 1/4 = 3/4.
    assert_eq!(tree.total_length(), apirec::Rational::new(3, 4));

    let oracle_tree = oracle_exact(&view, &query, 14)
        .expect("oracle runs")
        .expect("oracle finds a tree");
    assert_eq!(oracle_tree.total_length(), tree.total_length());
    println!("brute-force solver agrees: {}", oracle_tree.total_length());
}
