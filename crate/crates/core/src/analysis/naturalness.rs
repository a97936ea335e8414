//! Order-preservation between distributions and the naturalness verdict built on it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::compare::{shared_support, CompareOptions};
use crate::analysis::sequence::DistributionSequence;
use crate::error::{Error, Result};
use crate::rankstats::{
    significance, spearman, Method, Mode, RankVector, SignificanceOptions, AUTO_EXACT_BELOW,
    SIGNIFICANT,
};
use crate::sampling::{tied, Distribution};
use crate::scalar::Scalar;

/// The naturalness threshold.
pub const DEFAULT_C: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderOptions {
    /// Significance threshold.
    pub c: f64,
    /// Only classes whose weight exceeds this in both distributions are compared.
    pub frequency_floor: f64,
    pub compare: CompareOptions,
}

impl Default for OrderOptions {
    fn default() -> Self {
        Self {
            c: DEFAULT_C,
            frequency_floor: 0.0,
            compare: CompareOptions::default(),
        }
    }
}

/// Outcome of the order-preservation test on one pair of distributions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonyVerdict<T = f64> {
    pub c: f64,
    pub elements: usize,
    pub spearman: T,
    pub p_value: T,
    pub method: Method,
    /// Fraction of class pairs ordered the same way in both distributions.
    pub preserved_fraction: T,
    /// Whether `elements` is large enough for any p-value to reach `c`.
    pub powered: bool,
    /// `p_value <= c`.
    pub verdict: bool,
}

/// Smallest p-value the test can produce with `m` elements.
pub fn min_attainable_p(m: usize, options: &SignificanceOptions) -> f64 {
    let exact = match options.mode {
        Mode::Exact => true,
        Mode::MonteCarlo => false,
        Mode::Auto => m < AUTO_EXACT_BELOW,
    };
    if exact {
        1.0 / (1..=m as u64).map(|k| k as f64).product::<f64>()
    } else {
        1.0 / (options.samples as f64 + 1.0)
    }
}

/// Fraction of pairs `(i, j)` whose order (including ties) agrees between `x` and `y`.
pub fn concordant_fraction<T: Scalar>(x: &[T], y: &[T]) -> T {
    let m = x.len();
    if m < 2 {
        return T::one();
    }
    let sign = |a: T, b: T| -> i8 {
        if tied(a, b) {
            0
        } else if a > b {
            1
        } else {
            -1
        }
    };
    let mut agree = 0u64;
    let mut total = 0u64;
    for i in 0..m {
        for j in i + 1..m {
            total += 1;
            if sign(x[i], x[j]) == sign(y[i], y[j]) {
                agree += 1;
            }
        }
    }
    T::of_count(agree) / T::of_count(total)
}

/// Tests whether `d2` orders the shared classes like `d1` at significance `c`.
pub fn order_preserving<T: Scalar>(
    d1: &Distribution<T>,
    d2: &Distribution<T>,
    options: &OrderOptions,
) -> Result<MonotonyVerdict<T>> {
    let floor = T::of(options.frequency_floor);
    let shared: Vec<_> = shared_support(d1, d2)
        .into_iter()
        .filter(|r| r.1 > floor && r.2 > floor)
        .collect();
    if shared.len() < 2 {
        return Err(Error::Incomparable(format!(
            "{} shared classes above the frequency floor",
            shared.len()
        )));
    }
    let w1: Vec<T> = shared.iter().map(|r| r.1).collect();
    let w2: Vec<T> = shared.iter().map(|r| r.2).collect();
    let rho = spearman(&RankVector::from_values(&w1), &RankVector::from_values(&w2))?;
    let sig_options = options.compare.significance_for(d1.n());
    let sig = significance(rho, shared.len(), &sig_options)?;
    Ok(MonotonyVerdict {
        c: options.c,
        elements: shared.len(),
        spearman: rho,
        p_value: sig.p_value,
        method: sig.method,
        preserved_fraction: concordant_fraction(&w1, &w2),
        powered: min_attainable_p(shared.len(), &sig_options) <= options.c,
        verdict: sig.p_value.as_f64() <= options.c,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Pass,
    Fail,
    /// Too few shared classes for the test to reach `c`.
    Underpowered,
    Incomparable,
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowStatus::Pass => "pass",
            RowStatus::Fail => "fail",
            RowStatus::Underpowered => "underpowered",
            RowStatus::Incomparable => "incomparable",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Naturalness {
    /// Every powered length passes at `c`.
    Natural,
    /// All but a tolerated few pass; those few are still positively and significantly correlated.
    Quasi,
    NotNatural,
    /// No length had enough shared classes to decide.
    Inconclusive,
}

impl fmt::Display for Naturalness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Naturalness::Natural => "natural",
            Naturalness::Quasi => "quasi",
            Naturalness::NotNatural => "not-natural",
            Naturalness::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NaturalnessRow<T = f64> {
    pub n: usize,
    pub status: RowStatus,
    pub outcome: Option<MonotonyVerdict<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NaturalnessReport<T = f64> {
    pub c: f64,
    pub rows: Vec<NaturalnessRow<T>>,
    pub verdict: Naturalness,
}

/// How many failing lengths still allow a [`Naturalness::Quasi`] verdict.
pub const QUASI_TOLERANCE: usize = 1;

/// Order-preservation test of `candidate` against `reference` at every common length.
pub fn naturalness_test<T: Scalar>(
    candidate: &DistributionSequence<T>,
    reference: &DistributionSequence<T>,
    options: &OrderOptions,
) -> NaturalnessReport<T> {
    let mut rows = Vec::new();
    for (n, reference_n) in &reference.per_n {
        let Some(candidate_n) = candidate.get(*n) else {
            continue;
        };
        let outcome = order_preserving(reference_n, candidate_n, options).ok();
        let status = match &outcome {
            None => RowStatus::Incomparable,
            Some(v) if !v.powered => RowStatus::Underpowered,
            Some(v) if v.verdict => RowStatus::Pass,
            Some(_) => RowStatus::Fail,
        };
        rows.push(NaturalnessRow {
            n: *n,
            status,
            outcome,
        });
    }
    let powered: Vec<&NaturalnessRow<T>> = rows
        .iter()
        .filter(|r| matches!(r.status, RowStatus::Pass | RowStatus::Fail))
        .collect();
    let failures: Vec<&&NaturalnessRow<T>> = powered
        .iter()
        .filter(|r| r.status == RowStatus::Fail)
        .collect();
    let verdict = if powered.is_empty() {
        Naturalness::Inconclusive
    } else if failures.is_empty() {
        Naturalness::Natural
    } else if failures.len() <= QUASI_TOLERANCE
        && failures.len() < powered.len()
        && failures.iter().all(|r| {
            r.outcome
                .is_some_and(|o| o.spearman > T::zero() && o.p_value.as_f64() <= SIGNIFICANT)
        })
    {
        Naturalness::Quasi
    } else {
        Naturalness::NotNatural
    };
    NaturalnessReport {
        c: options.c,
        rows,
        verdict,
    }
}

impl<T: Scalar> NaturalnessReport<T> {
    /// Columns `n,status,elements,spearman,p_value,method,preserved_fraction`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("n,status,elements,spearman,p_value,method,preserved_fraction\n");
        for r in &self.rows {
            match &r.outcome {
                Some(o) => out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.n,
                    r.status,
                    o.elements,
                    o.spearman.as_f64(),
                    o.p_value.as_f64(),
                    o.method,
                    o.preserved_fraction.as_f64()
                )),
                None => out.push_str(&format!("{},{},,,,,\n", r.n, r.status)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::symmetry::{canonical, class_count};

    /// A reduced distribution over all classes of length n with strictly decreasing weights.
    fn graded(n: usize, reverse: bool) -> Distribution {
        let mut classes: Vec<BitString> =
            BitString::all(n).filter(|s| canonical(*s) == *s).collect();
        assert_eq!(classes.len() as u128, class_count(n as u32).unwrap());
        if reverse {
            classes.reverse();
        }
        let m = classes.len();
        let total = (m * (m + 1) / 2) as f64;
        let d = Distribution::from_probabilities(
            n,
            classes
                .iter()
                .enumerate()
                .map(|(i, s)| (*s, (m - i) as f64 / total)),
        )
        .unwrap();
        let mut meta = d.meta().clone();
        meta.reduced = true;
        d.with_meta(meta)
    }

    fn seq(reverse: bool, ns: std::ops::RangeInclusive<usize>) -> DistributionSequence {
        DistributionSequence::from_distributions(None, ns.map(|n| graded(n, reverse))).unwrap()
    }

    #[test]
    fn identical_distributions_preserve_order() {
        let d = graded(5, false);
        let v = order_preserving(&d, &d, &OrderOptions::default()).unwrap();
        assert!(v.verdict);
        assert!(v.powered);
        assert_eq!(v.preserved_fraction, 1.0);
        assert_eq!(v.spearman, 1.0);
    }

    #[test]
    fn reversed_distribution_breaks_order() {
        let v = order_preserving(
            &graded(5, false),
            &graded(5, true),
            &OrderOptions::default(),
        )
        .unwrap();
        assert!(!v.verdict);
        assert_eq!(v.preserved_fraction, 0.0);
        assert_eq!(v.spearman, -1.0);
    }

    #[test]
    fn incomparable_when_support_too_small() {
        let a = graded(2, false);
        let options = OrderOptions {
            frequency_floor: 0.5,
            ..Default::default()
        };
        assert!(order_preserving(&a, &a, &options).is_err());
    }

    #[test]
    fn reference_against_itself_is_natural() {
        let r = seq(false, 2..=6);
        let report = naturalness_test(&r, &r, &OrderOptions::default());
        assert_eq!(report.verdict, Naturalness::Natural);
        // 2, 3 and 6 classes at n = 2, 3, 4; the first two cannot reach 0.01
        assert_eq!(report.rows[0].status, RowStatus::Underpowered);
        assert_eq!(report.rows[1].status, RowStatus::Underpowered);
        assert_eq!(report.rows[2].status, RowStatus::Pass);
    }

    #[test]
    fn reversed_candidate_is_not_natural() {
        let report = naturalness_test(
            &seq(true, 2..=6),
            &seq(false, 2..=6),
            &OrderOptions::default(),
        );
        assert_eq!(report.verdict, Naturalness::NotNatural);
        assert!(report.to_csv().contains(",fail,"));
    }

    #[test]
    fn one_weak_row_is_quasi() {
        // n = 4 has 6 classes; two disjoint adjacent swaps give S = 4 and p = 12/720
        let swapped = graded(4, false);
        let mut weights: Vec<(BitString, f64)> = swapped
            .ranked()
            .iter()
            .map(|r| (r.string, r.probability))
            .collect();
        let (w0, w2) = (weights[0].1, weights[2].1);
        weights[0].1 = weights[1].1;
        weights[1].1 = w0;
        weights[2].1 = weights[3].1;
        weights[3].1 = w2;
        let swapped = Distribution::from_probabilities(4, weights)
            .unwrap()
            .with_meta(swapped.meta().clone());
        let candidate = DistributionSequence::from_distributions(
            None,
            [swapped, graded(5, false), graded(6, false)],
        )
        .unwrap();
        let report = naturalness_test(&candidate, &seq(false, 4..=6), &OrderOptions::default());
        let weak = report.rows[0].outcome.unwrap();
        assert_eq!(report.rows[0].status, RowStatus::Fail);
        assert!((weak.p_value - 12.0 / 720.0).abs() < 1e-12);
        assert_eq!(report.verdict, Naturalness::Quasi);
    }

    #[test]
    fn no_powered_rows_is_inconclusive() {
        let r = seq(false, 2..=3);
        assert_eq!(
            naturalness_test(&r, &r, &OrderOptions::default()).verdict,
            Naturalness::Inconclusive
        );
    }

    #[test]
    fn concordance_counts_ties_as_agreement() {
        assert_eq!(concordant_fraction(&[3.0, 2.0, 1.0], &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(concordant_fraction(&[1.0, 1.0], &[5.0, 5.0]), 1.0);
        assert_eq!(
            concordant_fraction(&[3.0, 2.0, 1.0], &[3.0, 1.0, 2.0]),
            2.0 / 3.0
        );
    }
}
