use std::collections::BTreeMap;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Multiset of equal-length binary strings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StringCounts {
    n: Option<usize>,
    counts: BTreeMap<BitString, u64>,
}

impl StringCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Common string length, `None` while empty.
    pub fn n(&self) -> Option<usize> {
        self.n
    }

    pub fn add(&mut self, s: BitString, count: u64) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        match self.n {
            Some(n) if n != s.len() => {
                return Err(Error::MixedLengths {
                    expected: n,
                    found: s.len(),
                })
            }
            _ => self.n = Some(s.len()),
        }
        *self.counts.entry(s).or_insert(0) += count;
        Ok(())
    }

    pub fn insert(&mut self, s: BitString) -> Result<()> {
        self.add(s, 1)
    }

    pub fn get(&self, s: &BitString) -> u64 {
        self.counts.get(s).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of distinct strings.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Entries in arithmetical order.
    pub fn iter(&self) -> impl Iterator<Item = (BitString, u64)> + '_ {
        self.counts.iter().map(|(s, c)| (*s, *c))
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (BitString, u64)>) -> Result<Self> {
        let mut counts = StringCounts::new();
        for (s, c) in pairs {
            counts.add(s, c)?;
        }
        Ok(counts)
    }

    /// Pointwise sum into `self`.
    pub fn merge(&mut self, other: &StringCounts) -> Result<()> {
        for (s, c) in other.iter() {
            self.add(s, c)?;
        }
        Ok(())
    }

    /// Multiset with every string complemented.
    pub fn complemented(&self) -> StringCounts {
        StringCounts {
            n: self.n,
            counts: self
                .counts
                .iter()
                .map(|(s, c)| (s.complement(), *c))
                .collect(),
        }
    }
}

/// Pointwise sum of several multisets; order-independent.
pub fn merge_counts<'a>(parts: impl IntoIterator<Item = &'a StringCounts>) -> Result<StringCounts> {
    let mut merged = StringCounts::new();
    for part in parts {
        merged.merge(part)?;
    }
    Ok(merged)
}
