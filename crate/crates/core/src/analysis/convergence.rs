//! Step-to-step distance profiles along a distribution sequence.
//!
//! Distributions of different lengths are compared after projecting the
//! longer one down: each length-`(n+1)` string splits its mass evenly between
//! its length-`n` prefix and suffix. On reduced distributions the mass of a
//! class is its weight times the orbit size, and the projected mass is divided
//! by the target orbit size again, so projection commutes with reduction.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::compare::shared_support;
use crate::analysis::sequence::DistributionSequence;
use crate::error::{Error, Result};
use crate::rankstats::{spearman, RankVector};
use crate::sampling::Distribution;
use crate::scalar::Scalar;
use crate::symmetry::{canonical, orbit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceMode {
    /// `1 − ρ` between the two rankings.
    Order,
    /// Total-variation distance on the renormalized shared support.
    Values,
}

impl fmt::Display for ConvergenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvergenceMode::Order => "order",
            ConvergenceMode::Values => "values",
        })
    }
}

/// Distances between one element of a sequence and the next.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceStep<T = f64> {
    pub n_from: usize,
    pub n_to: usize,
    pub elements: usize,
    /// `None` marks a gap: the two supports were not comparable.
    pub order_distance: Option<T>,
    pub value_distance: Option<T>,
}

impl<T: Scalar> ConvergenceStep<T> {
    pub fn distance(&self, mode: ConvergenceMode) -> Option<T> {
        match mode {
            ConvergenceMode::Order => self.order_distance,
            ConvergenceMode::Values => self.value_distance,
        }
    }
}

/// Projects `d` onto strings one symbol shorter via its prefixes and suffixes.
pub fn project_shorter<T: Scalar>(d: &Distribution<T>) -> Result<Distribution<T>> {
    let n = d.n();
    if n < 2 {
        return Err(Error::Config("cannot project length-1 strings".into()));
    }
    let reduced = d.is_reduced();
    let half = T::of(0.5);
    let mut mass: BTreeMap<_, T> = BTreeMap::new();
    for (s, p) in d.iter() {
        let class_mass = if reduced {
            p * T::of_count(orbit(s).len() as u64)
        } else {
            p
        };
        for part in [s.slice(0, n - 1), s.slice(1, n - 1)] {
            let key = if reduced { canonical(part) } else { part };
            let slot = mass.entry(key).or_insert_with(T::zero);
            *slot = *slot + class_mass * half;
        }
    }
    if reduced {
        for (s, m) in mass.iter_mut() {
            *m = *m / T::of_count(orbit(*s).len() as u64);
        }
    }
    let total: T = mass.values().copied().sum();
    let projected =
        Distribution::from_probabilities(n - 1, mass.into_iter().map(|(s, m)| (s, m / total)))?;
    let mut meta = d.meta().clone();
    if let Some(w) = meta.weight_total.as_mut() {
        *w = total.as_f64();
    }
    Ok(projected.with_meta(meta))
}

/// Order and value distance between two distributions, projecting the longer one first.
pub fn step_distance<T: Scalar>(
    a: &Distribution<T>,
    b: &Distribution<T>,
) -> Result<ConvergenceStep<T>> {
    let (short, long) = if a.n() <= b.n() { (a, b) } else { (b, a) };
    let mut projected = long.clone();
    while projected.n() > short.n() {
        projected = project_shorter(&projected)?;
    }
    let shared = shared_support(short, &projected);
    let mut step = ConvergenceStep {
        n_from: a.n(),
        n_to: b.n(),
        elements: shared.len(),
        order_distance: None,
        value_distance: None,
    };
    if shared.len() < 2 {
        return Ok(step);
    }
    let x: Vec<T> = shared.iter().map(|r| r.1).collect();
    let y: Vec<T> = shared.iter().map(|r| r.2).collect();
    step.order_distance = spearman(&RankVector::from_values(&x), &RankVector::from_values(&y))
        .ok()
        .map(|rho| T::one() - rho);
    let (sx, sy): (T, T) = (x.iter().copied().sum(), y.iter().copied().sum());
    let tv: T = x
        .iter()
        .zip(&y)
        .map(|(&p, &q)| (p / sx - q / sy).abs())
        .sum::<T>()
        * T::of(0.5);
    step.value_distance = Some(tv);
    Ok(step)
}

/// Distances between consecutive distributions in the given order.
pub fn convergence_profile<T: Scalar>(
    distributions: &[Distribution<T>],
) -> Result<Vec<ConvergenceStep<T>>> {
    if distributions.len() < 2 {
        return Err(Error::Config(
            "a convergence profile needs at least two distributions".into(),
        ));
    }
    distributions
        .windows(2)
        .map(|w| step_distance(&w[0], &w[1]))
        .collect()
}

/// One point of a single-mode profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint<T = f64> {
    pub n_from: usize,
    pub n_to: usize,
    pub elements: usize,
    pub distance: Option<T>,
}

/// Distance profile over consecutive lengths of a sequence in one mode.
pub fn convergence_check<T: Scalar>(
    sequence: &DistributionSequence<T>,
    mode: ConvergenceMode,
) -> Result<Vec<ProfilePoint<T>>> {
    let ds: Vec<Distribution<T>> = sequence.per_n.values().cloned().collect();
    Ok(convergence_profile(&ds)?
        .into_iter()
        .map(|s| ProfilePoint {
            n_from: s.n_from,
            n_to: s.n_to,
            elements: s.elements,
            distance: s.distance(mode),
        })
        .collect())
}

/// Columns `n,order_distance,value_distance`, keyed by the longer length of each step.
pub fn profile_csv<T: Scalar>(steps: &[ConvergenceStep<T>]) -> String {
    let mut out = String::from("n,order_distance,value_distance\n");
    let f = |v: Option<T>| v.map(|x| x.as_f64().to_string()).unwrap_or_default();
    for s in steps {
        out.push_str(&format!(
            "{},{},{}\n",
            s.n_from.max(s.n_to),
            f(s.order_distance),
            f(s.value_distance)
        ));
    }
    out
}
