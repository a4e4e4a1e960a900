//! Leave-one-app-out evaluation on a synthetic corpus.
//!
//! Holds one app out, removes its co-usage contribution from the graph,
//! queries with the keyword union of its APIs, and scores the recommended
//! sets against the APIs the app actually used.
//!
//! Run: `cargo run --example synthetic_eval`

use apirec::eval::{generate_corpus, leave_one_out_eval, EvalOptions, SyntheticSpec};
use apirec::ingest::derive_query_sets;

fn main() {
    let eco = generate_corpus(&SyntheticSpec::default()).expect("synthetic corpus");
    println!("corpus: {} APIs, {} apps", eco.api_count(), eco.app_count());

    // Apps whose derived keyword union has fewer than 3 keywords are
    // excluded from evaluation.
    let evaluable: Vec<_> = derive_query_sets(&eco)
        .into_iter()
        .filter(|qs| (3..=6).contains(&qs.keywords.len()))
        .take(5)
        .collect();

    let opts = EvalOptions {
        z: 50,
        p: 100,
        ..EvalOptions::default()
    };
    println!(
        "evaluating {} apps at z={} p={} k={} theta={}\n",
        evaluable.len(),
        opts.z,
        opts.p,
        opts.k,
        opts.theta
    );

    for qs in &evaluable {
        match leave_one_out_eval(&eco, &qs.app, &opts) {
            Ok(report) => println!(
                "{}: r={} mp={:.3} mr={:.3} mild={:.3} milc={:.3} lists={} ({:.3}s)",
                qs.app,
                qs.keywords.len(),
                report.mp,
                report.mr,
                report.mild.unwrap_or(f64::NAN),
                report.milc.unwrap_or(f64::NAN),
                report.k_effective,
                report.wall_time_seconds,
            ),
            Err(err) => println!("{}: skipped ({err})", qs.app),
        }
    }
}
