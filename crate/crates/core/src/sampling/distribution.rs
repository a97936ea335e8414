use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::sampling::counts::StringCounts;
use crate::sampling::spec::ExperimentSpec;
use crate::scalar::Scalar;

/// Provenance carried alongside a distribution and written to its file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistributionMeta {
    /// The experiment that produced the counts, if any.
    pub experiment: Option<ExperimentSpec>,
    /// Rules actually run.
    pub rules_sampled: Option<u64>,
    /// Raw number of extracted strings behind the probabilities.
    pub total: Option<u64>,
    /// Keys are canonical class representatives.
    pub reduced: bool,
    /// Sum of orbit-averaged class weights before renormalization (reduced only).
    pub weight_total: Option<f64>,
    pub tool_version: String,
}

impl DistributionMeta {
    pub fn new() -> Self {
        Self {
            tool_version: crate::TOOL_VERSION.to_owned(),
            ..Self::default()
        }
    }
}

/// Normalized frequencies of length-`n` strings. Zero-probability strings are absent.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<T = f64> {
    n: usize,
    entries: BTreeMap<BitString, T>,
    meta: DistributionMeta,
}

/// One row of a ranking.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankedString<T> {
    pub string: BitString,
    pub probability: T,
    /// 1-based; tied probabilities share the average of their positions.
    pub rank: T,
}

impl<T: Scalar> Distribution<T> {
    /// Normalizes a multiset: `Pr(s) = count(s) / total`.
    pub fn from_counts(counts: &StringCounts, n: usize) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyCounts);
        }
        if let Some(found) = counts.n().filter(|&m| m != n) {
            return Err(Error::MixedLengths { expected: n, found });
        }
        let total = T::of_count(counts.total());
        let entries = counts
            .iter()
            .map(|(s, c)| (s, T::of_count(c) / total))
            .collect();
        let mut meta = DistributionMeta::new();
        meta.total = Some(counts.total());
        Ok(Self { n, entries, meta })
    }

    /// Builds from explicit probabilities, which must be positive and sum to one.
    pub fn from_probabilities(
        n: usize,
        probabilities: impl IntoIterator<Item = (BitString, T)>,
    ) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (s, p) in probabilities {
            if s.len() != n {
                return Err(Error::MixedLengths {
                    expected: n,
                    found: s.len(),
                });
            }
            if p <= T::zero() || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "probability of {s} must be positive and finite, got {p}"
                )));
            }
            if entries.insert(s, p).is_some() {
                return Err(Error::InvalidDistribution(format!("duplicate key {s}")));
            }
        }
        if entries.is_empty() {
            return Err(Error::EmptyCounts);
        }
        let sum: T = entries.values().copied().sum();
        let tol = T::normalization_tolerance(entries.len());
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self {
            n,
            entries,
            meta: DistributionMeta::new(),
        })
    }

    pub fn with_meta(mut self, meta: DistributionMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn meta(&self) -> &DistributionMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut DistributionMeta {
        &mut self.meta
    }

    pub fn is_reduced(&self) -> bool {
        self.meta.reduced
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, s: &BitString) -> Option<T> {
        self.entries.get(s).copied()
    }

    pub fn contains(&self, s: &BitString) -> bool {
        self.entries.contains_key(s)
    }

    /// Entries in arithmetical order of their keys.
    pub fn iter(&self) -> impl Iterator<Item = (BitString, T)> + '_ {
        self.entries.iter().map(|(s, p)| (*s, *p))
    }

    pub fn support(&self) -> impl Iterator<Item = BitString> + '_ {
        self.entries.keys().copied()
    }

    pub fn total_probability(&self) -> T {
        self.entries.values().copied().sum()
    }

    /// Descending probability, ties broken by arithmetical order of the strings.
    pub fn ranked(&self) -> Vec<RankedString<T>> {
        let mut rows: Vec<(BitString, T)> = self.iter().collect();
        rows.sort_by(|a, b| descending(a.1, b.1).then(a.0.cmp(&b.0)));
        let probabilities: Vec<T> = rows.iter().map(|r| r.1).collect();
        for run in tie_runs(&probabilities) {
            rows[run].sort_by_key(|r| r.0);
        }
        let ranks = average_ranks_sorted(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
        rows.into_iter()
            .zip(ranks)
            .map(|((string, probability), rank)| RankedString {
                string,
                probability,
                rank,
            })
            .collect()
    }

    /// Frequency-based complexity estimate `−log₂ Pr(s)`, meaningful up to an
    /// additive constant. Reduced distributions look `s` up by its class.
    /// `None` when `s` was never observed.
    pub fn estimate_k(&self, s: &BitString) -> Option<T> {
        let key = if self.meta.reduced {
            crate::symmetry::canonical(*s)
        } else {
            *s
        };
        self.get(&key).map(|p| -p.log2())
    }
}

/// Free-function form of [`Distribution::from_counts`].
pub fn build_distribution<T: Scalar>(counts: &StringCounts, n: usize) -> Result<Distribution<T>> {
    Distribution::from_counts(counts, n)
}

/// Free-function form of [`Distribution::ranked`].
pub fn rank_strings<T: Scalar>(d: &Distribution<T>) -> Vec<RankedString<T>> {
    d.ranked()
}

fn descending<T: Scalar>(a: T, b: T) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

/// Relative tolerance under which two probabilities count as tied. Absorbs
/// the last-bit differences left by summing the same mass in different orders.
pub fn tie_tolerance<T: Scalar>() -> T {
    T::epsilon() * T::of(64.0)
}

pub(crate) fn tied<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= tie_tolerance::<T>() * a.abs().max(b.abs())
}

/// Runs of tied values in a sorted slice; each run is tied to its first element.
pub(crate) fn tie_runs<T: Scalar>(sorted: &[T]) -> Vec<Range<usize>> {
    let mut runs = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && tied(sorted[start], sorted[end]) {
            end += 1;
        }
        runs.push(start..end);
        start = end;
    }
    runs
}

/// Average ranks for values already sorted in descending order.
pub(crate) fn average_ranks_sorted<T: Scalar>(sorted_desc: &[T]) -> Vec<T> {
    let mut ranks = vec![T::zero(); sorted_desc.len()];
    for run in tie_runs(sorted_desc) {
        // positions start+1 ..= end share their mean
        let rank = T::of_count((run.start + 1 + run.end) as u64) / T::of(2.0);
        ranks[run].fill(rank);
    }
    ranks
}

// --- file format ------------------------------------------------------------

/// Identifier stored in every distribution file.
pub const FORMAT_NAME: &str = "algoprob-distribution";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct FileEntry {
    string: BitString,
    probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct FileBody {
    format: String,
    version: u32,
    n: usize,
    meta: DistributionMeta,
    entries: Vec<FileEntry>,
}

impl<T: Scalar> Distribution<T> {
    /// Pretty-printed JSON with entries in ranking order.
    pub fn to_json(&self) -> String {
        let weight_total = self.meta.weight_total;
        let entries = self
            .ranked()
            .into_iter()
            .map(|r| FileEntry {
                string: r.string,
                probability: r.probability.as_f64(),
                weight: weight_total.map(|w| r.probability.as_f64() * w),
            })
            .collect();
        let body = FileBody {
            format: FORMAT_NAME.to_owned(),
            version: FORMAT_VERSION,
            n: self.n,
            meta: self.meta.clone(),
            entries,
        };
        let mut json = serde_json::to_string_pretty(&body).expect("distribution serializes");
        json.push('\n');
        json
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let body: FileBody = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if body.format != FORMAT_NAME {
            return Err(format!("unexpected format {:?}", body.format));
        }
        if body.version != FORMAT_VERSION {
            return Err(format!("unsupported version {}", body.version));
        }
        let d = Self::from_probabilities(
            body.n,
            body.entries
                .into_iter()
                .map(|e| (e.string, T::of(e.probability))),
        )
        .map_err(|e| e.to_string())?;
        Ok(d.with_meta(body.meta))
    }

    /// Atomically writes [`Self::to_json`] to `path`.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        crate::io::write_atomic(path, self.to_json().as_bytes())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|message| Error::Format {
            path: path.to_owned(),
            message,
        })
    }
}
