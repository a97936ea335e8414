use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rulespace::{tm_space_size, ECA_SPACE_SIZE};

/// A rule space to sample from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Tm { symbols: u8, states: u8 },
    Eca,
}

impl Model {
    pub const TM22: Model = Model::Tm {
        symbols: 2,
        states: 2,
    };

    pub fn space_size(self) -> Result<u64> {
        match self {
            Model::Tm { symbols, states } => tm_space_size(symbols, states),
            Model::Eca => Ok(ECA_SPACE_SIZE),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Tm { symbols, states } => write!(f, "TM({states},{symbols})"),
            Model::Eca => f.write_str("CA(1)"),
        }
    }
}

/// How fixed-length strings are cut from a raw output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractionPolicy {
    /// The output itself, when it has exactly the target length.
    ExactLength,
    /// Every contiguous window of the target length.
    AllSubstrings,
    /// The window centered in the output (left-biased when the slack is odd).
    CenterWindow,
    Prefix,
}

impl ExtractionPolicy {
    /// Calls `sink` for each extracted string. `output` must be binary.
    pub fn extract(self, output: &[u8], n: usize, mut sink: impl FnMut(crate::BitString)) {
        let len = output.len();
        if n == 0 || len < n {
            return;
        }
        let pack = |s: &[u8]| crate::BitString::from_symbols(s).expect("binary output window");
        match self {
            ExtractionPolicy::ExactLength => {
                if len == n {
                    sink(pack(output));
                }
            }
            ExtractionPolicy::Prefix => sink(pack(&output[..n])),
            ExtractionPolicy::CenterWindow => {
                let start = (len - n) / 2;
                sink(pack(&output[start..start + n]));
            }
            ExtractionPolicy::AllSubstrings => {
                let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
                let mut window = 0u64;
                for (i, &s) in output.iter().enumerate() {
                    window = ((window << 1) | u64::from(s)) & mask;
                    if i + 1 >= n {
                        sink(crate::BitString::new(window, n).expect("masked window fits"));
                    }
                }
            }
        }
    }
}

impl FromStr for ExtractionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-length" => Ok(Self::ExactLength),
            "all-substrings" => Ok(Self::AllSubstrings),
            "center-window" => Ok(Self::CenterWindow),
            "prefix" => Ok(Self::Prefix),
            other => Err(Error::Config(format!(
                "unknown extraction policy {other:?}"
            ))),
        }
    }
}

/// When each run stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// Run exactly `steps` steps.
    FixedSteps,
    /// Stop at a step drawn uniformly from `[n, steps]`, per rule and initial condition.
    UniformRandomStop,
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-steps" => Ok(Self::FixedSteps),
            "uniform-random-stop" => Ok(Self::UniformRandomStop),
            other => Err(Error::Config(format!("unknown stop rule {other:?}"))),
        }
    }
}

/// How many rules to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSize {
    All,
    Count(u64),
    /// `n · ⌊|space| / 12⌋` rules, capped at the space size: 341·n for
    /// TM(2,2) and 21·n for the elementary automata.
    Schedule,
}

impl SampleSize {
    pub fn resolve(self, space: u64, n: usize) -> Result<u64> {
        match self {
            SampleSize::All => Ok(space),
            SampleSize::Count(c) if c > space => Err(Error::Config(format!(
                "sample size {c} exceeds the rule space of {space}"
            ))),
            SampleSize::Count(c) => Ok(c),
            SampleSize::Schedule => Ok((space / 12).saturating_mul(n as u64).min(space)),
        }
    }
}

impl FromStr for SampleSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self::All),
            "schedule" => Ok(Self::Schedule),
            other => other.parse().map(Self::Count).map_err(|_| {
                Error::Config(format!(
                    "sample size must be all, schedule or a count, got {other:?}"
                ))
            }),
        }
    }
}

/// Everything that determines a sampled distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub model: Model,
    /// Target string length.
    pub n: usize,
    pub steps: u64,
    pub sample_size: SampleSize,
    pub extraction: ExtractionPolicy,
    pub stop_rule: StopRule,
    pub seed: u64,
}

impl ExperimentSpec {
    /// Default protocol: `10·n` steps, all rules, all substrings; automata
    /// stop at a random step, Turing machines run the full budget.
    pub fn new(model: Model, n: usize) -> Self {
        Self {
            model,
            n,
            steps: 10 * n as u64,
            sample_size: SampleSize::All,
            extraction: ExtractionPolicy::AllSubstrings,
            stop_rule: match model {
                Model::Tm { .. } => StopRule::FixedSteps,
                Model::Eca => StopRule::UniformRandomStop,
            },
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > crate::bits::MAX_LEN {
            return Err(Error::Config(format!(
                "string length n must be in 1..={}, got {}",
                crate::bits::MAX_LEN,
                self.n
            )));
        }
        if self.steps < self.n as u64 {
            return Err(Error::Config(format!(
                "steps ({}) must be at least the string length n ({})",
                self.steps, self.n
            )));
        }
        if let Model::Tm { symbols, .. } = self.model {
            if symbols != 2 {
                return Err(Error::Config(format!(
                    "binary output distributions need 2-symbol machines, got {symbols} symbols"
                )));
            }
        }
        let space = self.model.space_size()?;
        self.sample_size.resolve(space, self.n)?;
        Ok(())
    }
}
