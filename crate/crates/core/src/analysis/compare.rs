use crate::analysis::sequence::DistributionSequence;
use crate::bits::BitString;
use crate::rankstats::{
    pearson, significance, spearman, Mode, RankVector, SignificanceOptions, SignificanceResult,
    Tail,
};
use crate::sampling::{Distribution, ExperimentSpec};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompareOptions {
    pub tail: Tail,
    pub mode: Mode,
    pub seed: u64,
    pub samples: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        let s = SignificanceOptions::default();
        Self {
            tail: s.tail,
            mode: s.mode,
            seed: s.seed,
            samples: s.samples,
        }
    }
}

impl CompareOptions {
    /// Per-length options; the seed is offset by `n` so rows draw independent streams.
    pub(crate) fn significance_for(&self, n: usize) -> SignificanceOptions {
        SignificanceOptions {
            mode: self.mode,
            tail: self.tail,
            seed: self.seed.wrapping_add(n as u64),
            samples: self.samples,
        }
    }
}

/// Classes present in both distributions with their two probabilities, in arithmetical order.
pub fn shared_support<T: Scalar>(
    a: &Distribution<T>,
    b: &Distribution<T>,
) -> Vec<(BitString, T, T)> {
    a.iter()
        .filter_map(|(s, pa)| b.get(&s).map(|pb| (s, pa, pb)))
        .collect()
}

/// One aligned pair for plotting: the class, its two weights and its ranks within the shared support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlignedPair<T = f64> {
    pub string: BitString,
    pub weight_a: T,
    pub weight_b: T,
    pub rank_a: T,
    pub rank_b: T,
}

pub fn aligned_pairs<T: Scalar>(a: &Distribution<T>, b: &Distribution<T>) -> Vec<AlignedPair<T>> {
    let shared = shared_support(a, b);
    let wa: Vec<T> = shared.iter().map(|r| r.1).collect();
    let wb: Vec<T> = shared.iter().map(|r| r.2).collect();
    let ra = RankVector::from_values(&wa);
    let rb = RankVector::from_values(&wb);
    shared
        .iter()
        .enumerate()
        .map(|(i, &(string, weight_a, weight_b))| AlignedPair {
            string,
            weight_a,
            weight_b,
            rank_a: ra.ranks()[i],
            rank_b: rb.ranks()[i],
        })
        .collect()
}

/// Correlation of two distributions of the same length.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationRow<T = f64> {
    pub n: usize,
    /// Size of the shared support the row was computed on.
    pub elements: usize,
    pub spearman: Option<T>,
    pub significance: Option<SignificanceResult<T>>,
    pub pearson: Option<T>,
    /// Why a statistic is missing.
    pub note: Option<String>,
}

impl<T: Scalar> CorrelationRow<T> {
    pub fn is_comparable(&self) -> bool {
        self.spearman.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport<T = f64> {
    pub rows: Vec<CorrelationRow<T>>,
    pub experiment_a: Option<ExperimentSpec>,
    pub experiment_b: Option<ExperimentSpec>,
}

/// Spearman, its significance and Pearson over the shared support of `a` and `b`.
pub fn correlate<T: Scalar>(
    a: &Distribution<T>,
    b: &Distribution<T>,
    options: &SignificanceOptions,
) -> CorrelationRow<T> {
    let shared = shared_support(a, b);
    let mut row = CorrelationRow {
        n: a.n(),
        elements: shared.len(),
        spearman: None,
        significance: None,
        pearson: None,
        note: None,
    };
    if shared.len() < 2 {
        row.note = Some(format!("incomparable: {} shared classes", shared.len()));
        return row;
    }
    let wa: Vec<T> = shared.iter().map(|r| r.1).collect();
    let wb: Vec<T> = shared.iter().map(|r| r.2).collect();
    row.pearson = pearson(&wa, &wb).ok();
    match spearman(&RankVector::from_values(&wa), &RankVector::from_values(&wb)) {
        Ok(rho) => {
            row.spearman = Some(rho);
            match significance(rho, shared.len(), options) {
                Ok(sig) => row.significance = Some(sig),
                Err(e) => row.note = Some(format!("no significance: {e}")),
            }
        }
        Err(e) => row.note = Some(format!("incomparable: {e}")),
    }
    row
}

/// Row per common length, in ascending `n`.
pub fn compare_models<T: Scalar>(
    a: &DistributionSequence<T>,
    b: &DistributionSequence<T>,
    options: &CompareOptions,
) -> CorrelationReport<T> {
    let rows = a
        .per_n
        .iter()
        .filter_map(|(n, da)| {
            b.get(*n)
                .map(|db| correlate(da, db, &options.significance_for(*n)))
        })
        .collect();
    let spec_of = |s: &DistributionSequence<T>| s.per_n.values().find_map(|d| d.meta().experiment);
    CorrelationReport {
        rows,
        experiment_a: spec_of(a),
        experiment_b: spec_of(b),
    }
}

fn opt<T: Scalar>(v: Option<T>) -> String {
    v.map(|x| x.as_f64().to_string()).unwrap_or_default()
}

impl<T: Scalar> CorrelationReport<T> {
    /// Columns `n,elements,spearman,p_value,tail,method,verdict,pearson`; missing values are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,elements,spearman,p_value,tail,method,verdict,pearson\n");
        for r in &self.rows {
            let sig = r.significance.as_ref();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n,
                r.elements,
                opt(r.spearman),
                opt(sig.map(|s| s.p_value)),
                sig.map(|s| s.tail.to_string()).unwrap_or_default(),
                sig.map(|s| s.method.to_string()).unwrap_or_default(),
                sig.map(|s| s.verdict.to_string()).unwrap_or_default(),
                opt(r.pearson),
            ));
        }
        out
    }
}

/// Columns `string,weight_a,weight_b,rank_a,rank_b`.
pub fn plot_csv<T: Scalar>(pairs: &[AlignedPair<T>]) -> String {
    let mut out = String::from("string,weight_a,weight_b,rank_a,rank_b\n");
    for p in pairs {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.string,
            p.weight_a.as_f64(),
            p.weight_b.as_f64(),
            p.rank_a.as_f64(),
            p.rank_b.as_f64()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rankstats::Method;

    fn dist(n: usize, pairs: &[(&str, f64)]) -> Distribution {
        Distribution::from_probabilities(n, pairs.iter().map(|(s, p)| (s.parse().unwrap(), *p)))
            .unwrap()
    }

    fn seq(ds: Vec<Distribution>) -> DistributionSequence {
        DistributionSequence::from_distributions(None, ds).unwrap()
    }

    #[test]
    fn shared_support_is_intersection() {
        let a = dist(3, &[("000", 0.5), ("001", 0.3), ("010", 0.2)]);
        let b = dist(3, &[("000", 0.6), ("010", 0.4)]);
        let shared: Vec<String> = shared_support(&a, &b)
            .iter()
            .map(|r| r.0.to_string())
            .collect();
        assert_eq!(shared, ["000", "010"]);
    }

    #[test]
    fn self_comparison_is_perfect() {
        let d = dist(3, &[("000", 0.5), ("001", 0.3), ("010", 0.2)]);
        let d4 = dist(
            4,
            &[("0000", 0.4), ("0001", 0.3), ("0010", 0.2), ("0011", 0.1)],
        );
        let s = seq(vec![d, d4]);
        let report = compare_models(&s, &s, &CompareOptions::default());
        assert_eq!(report.rows.len(), 2);
        for r in &report.rows {
            assert_eq!(r.spearman, Some(1.0));
            assert!((r.pearson.unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(r.significance.unwrap().method, Method::ExactPermutation);
        }
        assert_eq!(report.rows[1].significance.unwrap().p_value, 1.0 / 24.0);
    }

    #[test]
    fn single_shared_class_flagged() {
        let a = dist(2, &[("00", 0.7), ("01", 0.3)]);
        let b = dist(2, &[("00", 1.0)]);
        let row = correlate(&a, &b, &SignificanceOptions::default());
        assert_eq!(row.elements, 1);
        assert!(!row.is_comparable());
        assert!(row.note.unwrap().contains("incomparable"));
    }

    #[test]
    fn csv_layout() {
        let d = dist(2, &[("00", 0.7), ("01", 0.3)]);
        let s = seq(vec![d]);
        let csv = compare_models(&s, &s, &CompareOptions::default()).to_csv();
        assert_eq!(
            csv,
            "n,elements,spearman,p_value,tail,method,verdict,pearson\n\
             2,2,1,0.5,one-sided,exact-permutation,not-significant,1\n"
        );
    }

    #[test]
    fn plot_rows_carry_ranks() {
        let a = dist(2, &[("00", 0.7), ("01", 0.3)]);
        let b = dist(2, &[("00", 0.2), ("01", 0.8)]);
        let pairs = aligned_pairs(&a, &b);
        assert_eq!((pairs[0].rank_a, pairs[0].rank_b), (1.0, 2.0));
        assert!(plot_csv(&pairs).contains("00,0.7,0.2,1,2\n"));
    }
}
