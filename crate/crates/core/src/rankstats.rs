//! Rank correlation and permutation significance tests.
//!
//! The null distribution of Spearman's ρ for `m` tie-free ranks depends only
//! on `S = Σ dᵢ²`, since `ρ = 1 − 6S / (m(m² − 1))`. The exact test
//! enumerates every permutation and tallies `S`; the Monte-Carlo test draws
//! uniformly random permutations in fixed-size batches, each batch with its
//! own seeded stream, so the estimate does not depend on the thread count.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::sampling::{average_ranks_sorted, substream};
use crate::scalar::Scalar;

/// Largest `m` for which exact enumeration is allowed (`12! ≈ 4.8·10⁸`).
pub const EXACT_MAX_M: usize = 12;
/// Auto mode switches to Monte-Carlo at this many elements.
pub const AUTO_EXACT_BELOW: usize = 9;
pub const DEFAULT_MONTE_CARLO_SAMPLES: u64 = 10_000;
const MONTE_CARLO_BATCH: u64 = 1_000;

pub const SIGNIFICANT: f64 = 0.05;
pub const HIGHLY_SIGNIFICANT: f64 = 0.01;

/// Ranks (1 = largest value) with the labels they belong to.
#[derive(Clone, Debug, PartialEq)]
pub struct RankVector<T = f64> {
    ranks: Vec<T>,
    labels: Option<Vec<BitString>>,
}

impl<T: Scalar> RankVector<T> {
    pub fn new(ranks: Vec<T>) -> Self {
        Self {
            ranks,
            labels: None,
        }
    }

    pub fn labeled(labels: Vec<BitString>, ranks: Vec<T>) -> Result<Self> {
        if labels.len() != ranks.len() {
            return Err(Error::LengthMismatch(labels.len(), ranks.len()));
        }
        Ok(Self {
            ranks,
            labels: Some(labels),
        })
    }

    /// Average ranks of `values` in descending order; ties share their mean position.
    pub fn from_values(values: &[T]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| {
            values[b]
                .partial_cmp(&values[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let sorted: Vec<T> = order.iter().map(|&i| values[i]).collect();
        let mut ranks = vec![T::zero(); values.len()];
        for (pos, rank) in order.into_iter().zip(average_ranks_sorted(&sorted)) {
            ranks[pos] = rank;
        }
        Self::new(ranks)
    }

    pub fn from_labeled_values(labels: Vec<BitString>, values: &[T]) -> Result<Self> {
        let ranks = Self::from_values(values).ranks;
        Self::labeled(labels, ranks)
    }

    pub fn ranks(&self) -> &[T] {
        &self.ranks
    }

    pub fn labels(&self) -> Option<&[BitString]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// The ranking read backwards: rank `r` becomes `m + 1 − r`.
    pub fn reversed(&self) -> Self {
        let top = T::of_count(self.len() as u64 + 1);
        Self {
            ranks: self.ranks.iter().map(|&r| top - r).collect(),
            labels: self.labels.clone(),
        }
    }

    /// True when the ranks are exactly a permutation of `1..=m`.
    fn is_tie_free(&self) -> bool {
        let m = self.len();
        let mut seen = vec![false; m];
        self.ranks.iter().all(|&r| {
            let k = r.to_usize().unwrap_or(0);
            let ok = (1..=m).contains(&k) && T::of_count(k as u64) == r && !seen[k - 1];
            if ok {
                seen[k - 1] = true;
            }
            ok
        })
    }
}

/// Spearman's ρ between two rankings of the same items.
///
/// Labeled vectors are aligned by label. Tie-free inputs use the `Σd²`
/// formula; otherwise ρ is the Pearson correlation of the rank values.
pub fn spearman<T: Scalar>(x: &RankVector<T>, y: &RankVector<T>) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let aligned;
    let y_ranks: &[T] = match (x.labels(), y.labels()) {
        (Some(lx), Some(ly)) if lx != ly => {
            let position: HashMap<BitString, usize> =
                ly.iter().enumerate().map(|(i, l)| (*l, i)).collect();
            aligned = lx
                .iter()
                .map(|l| {
                    position.get(l).map(|&i| y.ranks[i]).ok_or_else(|| {
                        Error::InvalidDistribution(format!("label {l} missing from second ranking"))
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            &aligned
        }
        _ => &y.ranks,
    };
    let m = x.len();
    if m < 2 {
        return Err(Error::TooFewElements(m));
    }
    let y_vec = RankVector::new(y_ranks.to_vec());
    if x.is_tie_free() && y_vec.is_tie_free() {
        Ok(spearman_d2(&x.ranks, y_ranks))
    } else {
        pearson(&x.ranks, y_ranks)
    }
}

/// `1 − 6Σd² / (m(m² − 1))`.
pub fn spearman_d2<T: Scalar>(x: &[T], y: &[T]) -> T {
    let m = T::of_count(x.len() as u64);
    let d2: T = x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum();
    T::one() - T::of(6.0) * d2 / (m * (m * m - T::one()))
}

/// Pearson product-moment correlation.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let m = x.len();
    if m < 2 {
        return Err(Error::TooFewElements(m));
    }
    let count = T::of_count(m as u64);
    let mean_x = x.iter().copied().sum::<T>() / count;
    let mean_y = y.iter().copied().sum::<T>() / count;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    /// Fraction of permutations with ρ at least the observed value.
    OneSided,
    /// Fraction with |ρ| at least the observed |ρ|.
    TwoSided,
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tail::OneSided => "one-sided",
            Tail::TwoSided => "two-sided",
        })
    }
}

impl FromStr for Tail {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-sided" => Ok(Tail::OneSided),
            "two-sided" => Ok(Tail::TwoSided),
            other => Err(Error::Config(format!("unknown tail {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactPermutation,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ExactPermutation => "exact-permutation",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Exact below [`AUTO_EXACT_BELOW`] elements, Monte-Carlo otherwise.
    #[default]
    Auto,
    Exact,
    MonteCarlo,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Auto => "auto",
            Mode::Exact => "exact",
            Mode::MonteCarlo => "monte-carlo",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Mode::Auto),
            "exact" => Ok(Mode::Exact),
            "monte-carlo" => Ok(Mode::MonteCarlo),
            other => Err(Error::Config(format!(
                "unknown significance mode {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NotSignificant,
    Significant,
    HighlySignificant,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NotSignificant => "not-significant",
            Verdict::Significant => "significant",
            Verdict::HighlySignificant => "highly-significant",
        })
    }
}

/// `p ≤ 0.01` is highly significant, `p ≤ 0.05` significant.
pub fn classify(p: f64) -> Verdict {
    if p <= HIGHLY_SIGNIFICANT {
        Verdict::HighlySignificant
    } else if p <= SIGNIFICANT {
        Verdict::Significant
    } else {
        Verdict::NotSignificant
    }
}

/// Exact tally behind a permutation p-value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactCount {
    /// Permutations at least as extreme as the observation.
    pub extreme: u64,
    pub permutations: u64,
}

impl ExactCount {
    pub fn ratio(self) -> Ratio<u64> {
        Ratio::new(self.extreme, self.permutations)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignificanceResult<T = f64> {
    pub p_value: T,
    pub method: Method,
    pub tail: Tail,
    /// Exact tallies, for the exact method.
    pub exact: Option<ExactCount>,
    /// Number of random permutations, for Monte-Carlo.
    pub samples: Option<u64>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignificanceOptions {
    pub mode: Mode,
    pub tail: Tail,
    pub seed: u64,
    pub samples: u64,
}

impl Default for SignificanceOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Auto,
            tail: Tail::OneSided,
            seed: 0,
            samples: DEFAULT_MONTE_CARLO_SAMPLES,
        }
    }
}

/// `m(m² − 1)`, the denominator scale of ρ.
fn scale(m: usize) -> u64 {
    let m = m as u64;
    m * (m * m - 1)
}

/// Decides whether a permutation with squared-difference sum `s` is at least
/// as extreme as `rho`, with a small absolute slack for rounding in `rho`.
#[derive(Clone, Copy)]
struct Extremeness {
    low: f64,
    high: Option<f64>,
}

impl Extremeness {
    fn new(rho: f64, m: usize, tail: Tail) -> Self {
        let scale = scale(m) as f64;
        let slack = 1e-9 * scale.max(1.0);
        match tail {
            // ρ_perm ≥ ρ  ⇔  S ≤ (1 − ρ)·scale/6
            Tail::OneSided => Self {
                low: (1.0 - rho) * scale / 6.0 + slack,
                high: None,
            },
            // |ρ_perm| ≥ |ρ|  ⇔  S ≤ (1 − |ρ|)·scale/6  or  S ≥ (1 + |ρ|)·scale/6
            Tail::TwoSided => Self {
                low: (1.0 - rho.abs()) * scale / 6.0 + slack,
                high: Some((1.0 + rho.abs()) * scale / 6.0 - slack),
            },
        }
    }

    #[inline]
    fn is_extreme(self, s: u64) -> bool {
        let s = s as f64;
        s <= self.low || self.high.is_some_and(|h| s >= h)
    }
}

/// Histogram of `S = Σ (i − π(i))²` over all `m!` permutations, indexed by `S`.
pub fn null_histogram(m: usize) -> Result<Vec<u64>> {
    if m < 2 {
        return Err(Error::TooFewElements(m));
    }
    if m > EXACT_MAX_M {
        return Err(Error::Capacity(format!(
            "exact permutation test limited to m <= {EXACT_MAX_M}, got {m}"
        )));
    }
    let max_s = (scale(m) / 3) as usize;
    let mut hist = vec![0u64; max_s + 1];
    // Heap's algorithm, updating S incrementally on each swap
    let mut perm: Vec<i64> = (0..m as i64).collect();
    let sq = |pos: usize, value: i64| -> i64 { (pos as i64 - value).pow(2) };
    let mut s: i64 = 0;
    hist[0] += 1;
    let mut c = vec![0usize; m];
    let mut i = 1;
    while i < m {
        if c[i] < i {
            let j = if i % 2 == 0 { 0 } else { c[i] };
            s -= sq(i, perm[i]) + sq(j, perm[j]);
            perm.swap(i, j);
            s += sq(i, perm[i]) + sq(j, perm[j]);
            hist[s as usize] += 1;
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(hist)
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// Exact permutation p-value for an observed ρ over `m` elements.
pub fn exact_count(rho: f64, m: usize, tail: Tail) -> Result<ExactCount> {
    let hist = null_histogram(m)?;
    let rule = Extremeness::new(rho, m, tail);
    let extreme = hist
        .iter()
        .enumerate()
        .filter(|(s, _)| rule.is_extreme(*s as u64))
        .map(|(_, c)| *c)
        .sum();
    Ok(ExactCount {
        extreme,
        permutations: factorial(m),
    })
}

/// Monte-Carlo count of random permutations at least as extreme as `rho`.
pub fn monte_carlo_count(rho: f64, m: usize, tail: Tail, samples: u64, seed: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::TooFewElements(m));
    }
    let rule = Extremeness::new(rho, m, tail);
    let batches = samples.div_ceil(MONTE_CARLO_BATCH);
    let count = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = substream(seed, batch);
            let size = MONTE_CARLO_BATCH.min(samples - batch * MONTE_CARLO_BATCH);
            let mut perm: Vec<i64> = (0..m as i64).collect();
            let mut hits = 0u64;
            for _ in 0..size {
                perm.shuffle(&mut rng);
                let s: i64 = perm
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (i as i64 - v).pow(2))
                    .sum();
                if rule.is_extreme(s as u64) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(count)
}

/// Permutation-test significance of an observed Spearman ρ over `m` elements.
///
/// Monte-Carlo p-values count the observed arrangement: `(c + 1) / (N + 1)`.
pub fn significance<T: Scalar>(
    observed_rho: T,
    m: usize,
    options: &SignificanceOptions,
) -> Result<SignificanceResult<T>> {
    if m < 2 {
        return Err(Error::TooFewElements(m));
    }
    let rho = observed_rho.as_f64();
    let exact = match options.mode {
        Mode::Exact => true,
        Mode::MonteCarlo => false,
        Mode::Auto => m < AUTO_EXACT_BELOW,
    };
    if exact {
        let count = exact_count(rho, m, options.tail)?;
        let p = count.extreme as f64 / count.permutations as f64;
        Ok(SignificanceResult {
            p_value: T::of(p),
            method: Method::ExactPermutation,
            tail: options.tail,
            exact: Some(count),
            samples: None,
            verdict: classify(p),
        })
    } else {
        if options.samples == 0 {
            return Err(Error::Config(
                "Monte-Carlo needs at least one sample".into(),
            ));
        }
        let hits = monte_carlo_count(rho, m, options.tail, options.samples, options.seed)?;
        let p = (hits + 1) as f64 / (options.samples + 1) as f64;
        Ok(SignificanceResult {
            p_value: T::of(p),
            method: Method::MonteCarlo,
            tail: options.tail,
            exact: None,
            samples: Some(options.samples),
            verdict: classify(p),
        })
    }
}

/// One row of a significance lookup table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub m: usize,
    pub rho: f64,
    pub tail: Tail,
    pub p_value: f64,
    pub extreme: u64,
    pub permutations: u64,
}

/// Exact p-values for every attainable ρ, for each `m` in `2..=max_m` and both tails.
/// Rows are ordered by `m`, tail, then descending ρ.
pub fn significance_table(max_m: usize) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for m in 2..=max_m {
        let hist = null_histogram(m)?;
        let permutations = factorial(m);
        let scale = scale(m) as f64;
        let attainable: Vec<usize> = (0..hist.len()).filter(|&s| hist[s] > 0).collect();
        for tail in [Tail::OneSided, Tail::TwoSided] {
            for &s in &attainable {
                let rho = 1.0 - 6.0 * s as f64 / scale;
                let rule = Extremeness::new(rho, m, tail);
                let extreme: u64 = attainable
                    .iter()
                    .filter(|&&t| rule.is_extreme(t as u64))
                    .map(|&t| hist[t])
                    .sum();
                rows.push(TableRow {
                    m,
                    rho,
                    tail,
                    p_value: extreme as f64 / permutations as f64,
                    extreme,
                    permutations,
                });
            }
        }
    }
    Ok(rows)
}

/// CSV with header `m,rho,tail,p_value,extreme,permutations`.
pub fn significance_table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("m,rho,tail,p_value,extreme,permutations\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.m, r.rho, r.tail, r.p_value, r.extreme, r.permutations
        ));
    }
    out
}
