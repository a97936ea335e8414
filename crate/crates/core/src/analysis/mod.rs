//! Distribution sequences over string length, model comparison, order
//! preservation and frequency-based complexity estimates.

mod compare;
mod convergence;
mod naturalness;
mod sequence;

pub use compare::{
    aligned_pairs, compare_models, correlate, plot_csv, shared_support, AlignedPair,
    CompareOptions, CorrelationReport, CorrelationRow,
};
pub use convergence::{
    convergence_check, convergence_profile, profile_csv, project_shorter, step_distance,
    ConvergenceMode, ConvergenceStep, ProfilePoint,
};
pub use naturalness::{
    concordant_fraction, min_attainable_p, naturalness_test, order_preserving, MonotonyVerdict,
    Naturalness, NaturalnessReport, NaturalnessRow, OrderOptions, RowStatus, DEFAULT_C,
    QUASI_TOLERANCE,
};
pub use sequence::{
    build_entry, build_sequence, raw_file_name, reduced_file_name, save_sequence, BuiltSequence,
    DistributionSequence, SequenceConfig, SequenceEntry,
};

use std::cmp::Ordering;

use crate::bits::BitString;
use crate::sampling::{tie_runs, Distribution};
use crate::scalar::Scalar;

/// `−log₂ Pr(s)` in bits, relative to an unknown additive constant.
/// `None` when `s` (or its class) was not observed.
pub fn estimate_k<T: Scalar>(d: &Distribution<T>, s: &BitString) -> Option<T> {
    d.estimate_k(s)
}

/// Support of `d` by ascending complexity estimate. Estimates whose
/// probabilities are tied are listed in arithmetical order.
pub fn by_estimated_complexity<T: Scalar>(d: &Distribution<T>) -> Vec<(BitString, T)> {
    let mut rows: Vec<(BitString, T)> = d
        .support()
        .filter_map(|s| d.estimate_k(&s).map(|k| (s, k)))
        .collect();
    rows.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap_or(Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    let probabilities: Vec<T> = rows.iter().filter_map(|r| d.get(&r.0)).collect();
    for run in tie_runs(&probabilities) {
        rows[run].sort_by_key(|r| r.0);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimates_in_bits() {
        let d = Distribution::<f64>::from_probabilities(
            2,
            [("00", 0.25), ("01", 0.25), ("10", 0.5)].map(|(s, p)| (s.parse().unwrap(), p)),
        )
        .unwrap();
        assert_eq!(estimate_k(&d, &"00".parse().unwrap()), Some(2.0));
        assert_eq!(estimate_k(&d, &"10".parse().unwrap()), Some(1.0));
        assert_eq!(estimate_k(&d, &"11".parse().unwrap()), None);
        let one =
            Distribution::<f64>::from_probabilities(1, [("0".parse().unwrap(), 1.0)]).unwrap();
        assert_eq!(estimate_k(&one, &"0".parse().unwrap()), Some(0.0));
    }

    #[test]
    fn complexity_order_matches_ranking() {
        let d = Distribution::<f64>::from_probabilities(
            2,
            [("00", 0.1), ("01", 0.6), ("10", 0.3)].map(|(s, p)| (s.parse().unwrap(), p)),
        )
        .unwrap();
        let by_k: Vec<BitString> = by_estimated_complexity(&d)
            .into_iter()
            .map(|r| r.0)
            .collect();
        let ranked: Vec<BitString> = d.ranked().into_iter().map(|r| r.string).collect();
        assert_eq!(by_k, ranked);
    }
}
