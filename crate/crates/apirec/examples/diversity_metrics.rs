//! The evaluation metrics, on worked values.
//!
//! Run: `cargo run --example diversity_metrics`

use std::collections::BTreeSet;

use apirec::ids::ApiId;
use apirec::metrics::{
    hamming_diversity, harmonic, mean_inner_list_compatibility, mean_inter_list_diversity,
    mean_precision, mean_recall,
};
use apirec::ranker::RecommendationList;
use apirec::rational::Rational;
use apirec::steiner::Score;

fn api_set(names: &[&str]) -> BTreeSet<ApiId> {
    names.iter().map(|n| ApiId::new(n).unwrap()).collect()
}

fn list(names: &[&str], length: Rational) -> RecommendationList {
    let compatibility = match length.reciprocal() {
        Some(r) => Score::Finite(r),
        None => Score::Max,
    };
    RecommendationList::from_parts(api_set(names), length, compatibility, 0)
}

fn main() {
    // Pairwise diversity: 1 - |A ∩ B| / (|A| + |B|).
    let a = api_set(&["api1", "api2", "api3"]);
    let b = api_set(&["api1", "api4"]);
    println!(
        "diversity({{api1,api2,api3}}, {{api1,api4}}) = {}",
        hamming_diversity(&a, &b)
    );
    println!(
        "diversity(identical)                       = {}",
        hamming_diversity(&a, &a)
    );
    println!(
        "diversity(disjoint)                        = {}",
        hamming_diversity(&a, &api_set(&["api8", "api9"]))
    );

    // A small batch of recommendation lists.
    let lists = vec![
        list(&["api1", "api2", "api3"], Rational::new(1, 2)), // compat 2
        list(&["api1", "api4"], Rational::new(1, 4)),         // compat 4
        list(&["api5", "api6"], Rational::new(1, 3)),         // compat 3
        list(&["api7"], Rational::zero()),                    // single API: max
    ];

    let mild = mean_inter_list_diversity(&lists).unwrap();
    println!(
        "\nmean inter-list diversity = {} ({:.4})",
        mild,
        mild.to_f64()
    );

    let milc = mean_inner_list_compatibility(&lists);
    println!(
        "mean inner-list compatibility = {} over finite lists ({} max-scored excluded)",
        milc.mean_finite.unwrap(),
        milc.max_scored
    );

    // Precision/recall against the APIs one held-out app actually used.
    let truth = api_set(&["api1", "api3", "api5"]);
    let mp = mean_precision(&lists, &truth);
    let mr = mean_recall(&lists, &truth);
    println!("\ntruth = {{api1, api3, api5}}");
    println!("mean precision = {} ({:.4})", mp, mp.to_f64());
    println!("mean recall    = {} ({:.4})", mr, mr.to_f64());

    // The diversity-weighted harmonic mean used to compare settings.
    println!(
        "\nharmonic(mp = 0.3, mild = 0.9) = {:.10}",
        harmonic(0.3, 0.9)
    );
}
