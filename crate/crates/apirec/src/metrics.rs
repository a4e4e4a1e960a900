//! Evaluation metrics: inter-list diversity, inner-list compatibility,
//! precision/recall against a held-out app, and the diversity–accuracy
//! harmonic mean.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ids::ApiId;
use crate::ranker::{set_diversity, RecommendationList};
use crate::rational::Rational;
use crate::steiner::Score;

/// Hamming-style diversity of two recommendation lists:
/// `1 - |A ∩ B| / (|A| + |B|)`. Symmetric; 1 when the lists share nothing,
/// 1/2 when they are identical.
pub fn hamming_diversity(a: &BTreeSet<ApiId>, b: &BTreeSet<ApiId>) -> Rational {
    set_diversity(a, b)
}

/// Mean inter-list diversity over all ordered pairs i != j, which equals the
/// mean over unordered pairs. `None` for fewer than two lists, where the
/// average is undefined.
pub fn mean_inter_list_diversity(lists: &[RecommendationList]) -> Option<Rational> {
    let k = lists.len();
    if k < 2 {
        return None;
    }
    let mut sum = Rational::zero();
    for i in 0..k {
        for j in (i + 1)..k {
            sum = sum + set_diversity(lists[i].apis(), lists[j].apis());
        }
    }
    // Unordered-pair mean == ordered-pair sum / (k(k-1)).
    Some(sum * Rational::new(2, (k * (k - 1)) as u128))
}

/// Mean inner-list compatibility over lists with a finite score.
///
/// Single-API lists have length zero and an unbounded score; they are
/// excluded from the mean and surfaced through `max_scored`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilitySummary {
    pub mean_finite: Option<Rational>,
    pub max_scored: usize,
}

pub fn mean_inner_list_compatibility(lists: &[RecommendationList]) -> CompatibilitySummary {
    let mut sum = Rational::zero();
    let mut finite = 0usize;
    let mut max_scored = 0usize;
    for list in lists {
        match list.compatibility() {
            Score::Finite(r) => {
                sum = sum + r;
                finite += 1;
            }
            Score::Max => max_scored += 1,
        }
    }
    CompatibilitySummary {
        mean_finite: (finite > 0).then(|| sum * Rational::new(1, finite as u128)),
        max_scored,
    }
}

/// Mean precision: average over lists of `|RL_i ∩ truth| / |RL_i|`.
pub fn mean_precision(lists: &[RecommendationList], truth: &BTreeSet<ApiId>) -> Rational {
    assert!(!truth.is_empty(), "truth set must be nonempty");
    assert!(!lists.is_empty(), "need at least one list");
    let mut sum = Rational::zero();
    for list in lists {
        let hit = list.apis().intersection(truth).count() as u128;
        sum = sum + Rational::new(hit, list.apis().len() as u128);
    }
    sum * Rational::new(1, lists.len() as u128)
}

/// Mean recall: average over lists of `|RL_i ∩ truth| / |truth|`.
pub fn mean_recall(lists: &[RecommendationList], truth: &BTreeSet<ApiId>) -> Rational {
    assert!(!truth.is_empty(), "truth set must be nonempty");
    assert!(!lists.is_empty(), "need at least one list");
    let mut sum = Rational::zero();
    for list in lists {
        let hit = list.apis().intersection(truth).count() as u128;
        sum = sum + Rational::new(hit, truth.len() as u128);
    }
    sum * Rational::new(1, lists.len() as u128)
}

/// Diversity-weighted harmonic mean of precision and inter-list diversity,
/// an F2-style combination: `5·mp·mild / (4·mp + mild)`. Defined as 0 when
/// both inputs are 0.
pub fn harmonic(mp: f64, mild: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&mp) && (0.0..=1.0).contains(&mild));
    if mp == 0.0 && mild == 0.0 {
        return 0.0;
    }
    5.0 * mp * mild / (4.0 * mp + mild)
}

/// One evaluation instance's metric values.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MetricsReport {
    /// Mean inter-list diversity; absent with fewer than two lists.
    pub mild: Option<f64>,
    /// Mean inner-list compatibility over finite-score lists; absent when
    /// every list was single-API.
    pub milc: Option<f64>,
    /// Number of single-API (unbounded-score) lists excluded from `milc`.
    pub milc_max_scored: usize,
    pub mp: f64,
    pub mr: f64,
    /// Harmonic mean of `mp` and `mild`; absent when `mild` is.
    pub harmonic: Option<f64>,
    /// Number of lists the metrics were computed over.
    pub k_effective: usize,
    pub wall_time_seconds: f64,
}

impl MetricsReport {
    /// Computes every metric for one set of returned lists against a truth
    /// set. Panics if `lists` is empty (an instance with no recommendations
    /// is skipped upstream, not scored).
    pub fn compute(
        lists: &[RecommendationList],
        truth: &BTreeSet<ApiId>,
        wall_time_seconds: f64,
    ) -> MetricsReport {
        let mild = mean_inter_list_diversity(lists).map(|r| r.to_f64());
        let compat = mean_inner_list_compatibility(lists);
        let mp = mean_precision(lists, truth).to_f64();
        let mr = mean_recall(lists, truth).to_f64();
        MetricsReport {
            mild,
            milc: compat.mean_finite.map(|r| r.to_f64()),
            milc_max_scored: compat.max_scored,
            mp,
            mr,
            harmonic: mild.map(|d| harmonic(mp, d)),
            k_effective: lists.len(),
            wall_time_seconds,
        }
    }
}
