//! Complexity-preserving symmetries of binary strings.
//!
//! Reversal and complementation generate a Klein four-group acting on
//! `{0,1}^n`. Its orbits are the complexity classes; each class is named by
//! its arithmetically smallest member.

use std::collections::{BTreeMap, BTreeSet};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::sampling::{Distribution, DistributionMeta};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transformation {
    Identity,
    Reversal,
    Complement,
    ReversalComplement,
}

impl Transformation {
    pub const ALL: [Transformation; 4] = [
        Transformation::Identity,
        Transformation::Reversal,
        Transformation::Complement,
        Transformation::ReversalComplement,
    ];

    pub fn apply(self, s: BitString) -> BitString {
        match self {
            Transformation::Identity => s,
            Transformation::Reversal => s.reverse(),
            Transformation::Complement => s.complement(),
            Transformation::ReversalComplement => s.reverse().complement(),
        }
    }

    /// Group product: `self ∘ other`.
    pub fn compose(self, other: Transformation) -> Transformation {
        let bits = |t: Transformation| match t {
            Transformation::Identity => (false, false),
            Transformation::Reversal => (true, false),
            Transformation::Complement => (false, true),
            Transformation::ReversalComplement => (true, true),
        };
        let (r1, c1) = bits(self);
        let (r2, c2) = bits(other);
        match (r1 ^ r2, c1 ^ c2) {
            (false, false) => Transformation::Identity,
            (true, false) => Transformation::Reversal,
            (false, true) => Transformation::Complement,
            (true, true) => Transformation::ReversalComplement,
        }
    }

    /// Number of length-`n` strings left unchanged.
    pub fn fixed_points(self, n: u32) -> u128 {
        let half = |e: u32| 1u128 << e;
        match self {
            Transformation::Identity => half(n),
            // palindromes: the first ⌈n/2⌉ symbols are free
            Transformation::Reversal => half(n.div_ceil(2)),
            Transformation::Complement => 0,
            // anti-palindromes exist only for even n; the middle symbol of odd n cannot equal its complement
            Transformation::ReversalComplement => {
                if n & 1 == 0 {
                    half(n / 2)
                } else {
                    0
                }
            }
        }
    }
}

/// The set `{id(s), sy(s), co(s), syco(s)}`.
pub fn orbit(s: BitString) -> BTreeSet<BitString> {
    Transformation::ALL.iter().map(|t| t.apply(s)).collect()
}

/// Arithmetically smallest member of the orbit of `s`.
pub fn canonical(s: BitString) -> BitString {
    Transformation::ALL
        .iter()
        .map(|t| t.apply(s))
        .min()
        .expect("orbit is nonempty")
}

/// Number of complexity classes of length-`n` strings, by Burnside's lemma:
/// the mean number of fixed points over the four transformations.
pub fn class_count(n: u32) -> Result<u128> {
    if n == 0 || n > 126 {
        return Err(Error::Config(format!(
            "class_count needs 1 <= n <= 126, got {n}"
        )));
    }
    let fixed: u128 = Transformation::ALL.iter().map(|t| t.fixed_points(n)).sum();
    debug_assert_eq!(fixed % 4, 0);
    Ok(fixed / 4)
}

/// One orbit together with its reduced frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityClass<T = f64> {
    pub canonical: BitString,
    /// Orbit members in arithmetical order.
    pub members: Vec<BitString>,
    /// Summed member frequency divided by the orbit size.
    pub weight: T,
    /// `weight` rescaled so that all classes sum to one.
    pub probability: T,
}

/// A distribution collapsed onto complexity classes.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDistribution<T = f64> {
    n: usize,
    classes: Vec<ComplexityClass<T>>,
    weight_total: T,
    source_meta: DistributionMeta,
}

impl<T: Scalar> ReducedDistribution<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Classes in arithmetical order of their canonical strings.
    pub fn classes(&self) -> &[ComplexityClass<T>] {
        &self.classes
    }

    pub fn class_of(&self, s: BitString) -> Option<&ComplexityClass<T>> {
        let key = canonical(s);
        self.classes
            .binary_search_by(|c| c.canonical.cmp(&key))
            .ok()
            .map(|i| &self.classes[i])
    }

    /// Sum of the raw orbit-averaged weights.
    pub fn weight_total(&self) -> T {
        self.weight_total
    }

    /// The renormalized view, keyed by canonical strings and flagged as reduced.
    pub fn to_distribution(&self) -> Distribution<T> {
        let mut meta = self.source_meta.clone();
        meta.reduced = true;
        meta.weight_total = Some(self.weight_total.as_f64());
        Distribution::from_probabilities(
            self.n,
            self.classes.iter().map(|c| (c.canonical, c.probability)),
        )
        .expect("renormalized class weights form a distribution")
        .with_meta(meta)
    }
}

/// Groups frequencies by orbit: each observed class gets
/// `(Σ member frequencies) / |orbit|`. Frequencies need not be normalized.
pub fn reduce_frequencies<T: Scalar>(
    n: usize,
    frequencies: impl IntoIterator<Item = (BitString, T)>,
) -> Result<ReducedDistribution<T>> {
    let mut mass: BTreeMap<BitString, T> = BTreeMap::new();
    for (s, f) in frequencies {
        if s.len() != n {
            return Err(Error::MixedLengths {
                expected: n,
                found: s.len(),
            });
        }
        if f > T::zero() {
            let slot = mass.entry(canonical(s)).or_insert_with(T::zero);
            *slot = *slot + f;
        }
    }
    if mass.is_empty() {
        return Err(Error::EmptyCounts);
    }
    let mut classes: Vec<ComplexityClass<T>> = mass
        .into_iter()
        .map(|(canonical, total)| {
            let members: Vec<BitString> = orbit(canonical).into_iter().collect();
            let weight = total / T::of_count(members.len() as u64);
            ComplexityClass {
                canonical,
                members,
                weight,
                probability: T::zero(),
            }
        })
        .collect();
    let weight_total: T = classes.iter().map(|c| c.weight).sum();
    for c in &mut classes {
        c.probability = c.weight / weight_total;
    }
    Ok(ReducedDistribution {
        n,
        classes,
        weight_total,
        source_meta: DistributionMeta::new(),
    })
}

/// Reduces a string distribution to complexity classes, keeping its provenance.
pub fn reduce_distribution<T: Scalar>(d: &Distribution<T>) -> ReducedDistribution<T> {
    let reduced = if d.is_reduced() {
        // keys are already classes; undo the orbit division so reducing is idempotent
        reduce_frequencies(
            d.n(),
            d.iter()
                .map(|(s, p)| (s, p * T::of_count(orbit(s).len() as u64))),
        )
    } else {
        reduce_frequencies(d.n(), d.iter())
    };
    let mut reduced = reduced.expect("valid distribution is nonempty");
    reduced.source_meta = d.meta().clone();
    reduced
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s(text: &str) -> BitString {
        text.parse().unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<BitString> {
        items.iter().map(|t| s(t)).collect()
    }

    #[test]
    fn orbits() {
        assert_eq!(orbit(s("0000")), set(&["0000", "1111"]));
        assert_eq!(orbit(s("0001")), set(&["0001", "0111", "1000", "1110"]));
        assert_eq!(orbit(s("0110")), set(&["0110", "1001"]));
        assert_eq!(orbit(s("0010")), set(&["0100", "0010", "1101", "1011"]));
    }

    #[test]
    fn canonical_representatives() {
        assert_eq!(canonical(s("1111")), s("0000"));
        assert_eq!(canonical(s("1101")), s("0010"));
        assert_eq!(canonical(s("0")), s("0"));
        assert_eq!(canonical(s("1")), s("0"));
    }

    #[test]
    fn klein_group_structure() {
        for a in Transformation::ALL {
            assert_eq!(a.compose(a), Transformation::Identity);
            for b in Transformation::ALL {
                assert_eq!(a.compose(b), b.compose(a));
                for x in BitString::all(5) {
                    assert_eq!(a.compose(b).apply(x), a.apply(b.apply(x)));
                }
            }
        }
    }

    #[test]
    fn small_class_counts() {
        assert_eq!(class_count(1).unwrap(), 1);
        assert_eq!(class_count(2).unwrap(), 2);
        assert_eq!(class_count(3).unwrap(), 3);
        assert_eq!(class_count(4).unwrap(), 6);
        assert!(class_count(0).is_err());
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_frequencies(4, [(s("0000"), 0.1), (s("1111"), 0.3)]).unwrap();
        assert_eq!(r.classes().len(), 1);
        assert_relative_eq!(r.classes()[0].weight, 0.2, epsilon = 1e-15);
        assert_eq!(r.classes()[0].probability, 1.0);

        let uniform = BitString::all(4).map(|x| (x, 1.0 / 16.0));
        let r = reduce_frequencies(4, uniform).unwrap();
        assert_eq!(r.classes().len(), 6);
        for c in r.classes() {
            assert_relative_eq!(c.weight, 0.0625, epsilon = 1e-15);
        }

        let r = reduce_frequencies(4, [(s("0001"), 1.0)]).unwrap();
        assert_eq!(r.classes()[0].canonical, s("0001"));
        assert_eq!(r.classes()[0].weight, 0.25);
        assert_eq!(r.to_distribution().get(&s("0001")), Some(1.0));
    }

    #[test]
    fn reduced_file_carries_flag_and_weight() {
        let d =
            Distribution::from_probabilities(2, [(s("00"), 0.5), (s("11"), 0.25), (s("01"), 0.25)])
                .unwrap();
        let reduced = reduce_distribution(&d).to_distribution();
        assert!(reduced.is_reduced());
        let json = reduced.to_json();
        assert!(json.contains("\"reduced\": true"));
        assert!(json.contains("\"weight\""));
        let back = Distribution::<f64>::from_json(&json).unwrap();
        assert_eq!(back, reduced);
        // looked up through the class
        assert_eq!(reduced.estimate_k(&s("10")), reduced.estimate_k(&s("01")));
    }
}
