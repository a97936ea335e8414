//! Fixed-length binary strings packed into a machine word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Longest string a [`BitString`] can hold.
pub const MAX_LEN: usize = 64;

/// A binary string of length `1..=64`.
///
/// The first character is the most significant bit, so the derived ordering
/// (length first, then numeric value) is arithmetical order among strings of
/// equal length.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: u8,
    bits: u64,
}

impl BitString {
    pub fn new(bits: u64, len: usize) -> Result<Self, Error> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::InvalidString(format!(
                "length {len} outside 1..={MAX_LEN}"
            )));
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::InvalidString(format!(
                "value {bits} does not fit in {len} bits"
            )));
        }
        Ok(Self {
            len: len as u8,
            bits,
        })
    }

    /// Packs a slice of 0/1 symbols; `None` if empty, too long, or not binary.
    pub fn from_symbols(symbols: &[u8]) -> Option<Self> {
        if symbols.is_empty() || symbols.len() > MAX_LEN {
            return None;
        }
        let mut bits = 0u64;
        for &s in symbols {
            if s > 1 {
                return None;
            }
            bits = (bits << 1) | u64::from(s);
        }
        Some(Self {
            len: symbols.len() as u8,
            bits,
        })
    }

    #[inline]
    pub fn len(self) -> usize {
        usize::from(self.len)
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Numeric value with the first character as the most significant bit.
    #[inline]
    pub fn value(self) -> u64 {
        self.bits
    }

    #[inline]
    fn mask(self) -> u64 {
        if self.len == 64 {
            u64::MAX
        } else {
            (1u64 << self.len) - 1
        }
    }

    /// Symbol at position `i`, counting from the left.
    pub fn get(self, i: usize) -> u8 {
        assert!(
            i < self.len(),
            "index {i} out of range for length {}",
            self.len
        );
        ((self.bits >> (self.len() - 1 - i)) & 1) as u8
    }

    pub fn symbols(self) -> impl Iterator<Item = u8> {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn complement(self) -> Self {
        Self {
            len: self.len,
            bits: !self.bits & self.mask(),
        }
    }

    pub fn reverse(self) -> Self {
        Self {
            len: self.len,
            bits: self.bits.reverse_bits() >> (64 - self.len()),
        }
    }

    /// All `n`-length windows, left to right.
    pub fn windows(self, n: usize) -> impl Iterator<Item = BitString> {
        let count = if n == 0 || n > self.len() {
            0
        } else {
            self.len() - n + 1
        };
        (0..count).map(move |start| self.slice(start, n))
    }

    /// Substring of length `n` beginning at `start`.
    pub fn slice(self, start: usize, n: usize) -> Self {
        assert!(n >= 1 && start + n <= self.len(), "slice out of range");
        let shift = self.len() - start - n;
        let bits = (self.bits >> shift) & if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Self { len: n as u8, bits }
    }

    pub fn uniform(symbol: u8, len: usize) -> Self {
        let zero = Self::new(0, len).expect("valid length");
        if symbol == 0 {
            zero
        } else {
            zero.complement()
        }
    }

    /// Every string of length `n` in arithmetical order.
    pub fn all(n: usize) -> impl Iterator<Item = BitString> {
        assert!(
            (1..MAX_LEN).contains(&n),
            "enumeration length must be below 64"
        );
        (0..1u64 << n).map(move |bits| Self { len: n as u8, bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.symbols() {
            f.write_str(if s == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let symbols: Option<Vec<u8>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(0),
                '1' => Some(1),
                _ => None,
            })
            .collect();
        symbols
            .as_deref()
            .and_then(Self::from_symbols)
            .ok_or_else(|| {
                Error::InvalidString(format!("{s:?} is not a binary string of length 1..=64"))
            })
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
