//! Run configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use algoprob::rankstats::{Mode, Tail, DEFAULT_MONTE_CARLO_SAMPLES};
use algoprob::sampling::{ExperimentSpec, ExtractionPolicy, Model, SampleSize, StopRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Tm,
    Eca,
}

/// Every setting of a run. Unset fields fall through to the next layer.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<ModelKind>,
    pub symbols: Option<u8>,
    pub states: Option<u8>,
    /// Single length; overrides `n_min`/`n_max`.
    pub n: Option<usize>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    /// Absolute step budget for every length; overrides `steps_per_symbol`.
    pub steps: Option<u64>,
    pub steps_per_symbol: Option<u64>,
    pub policy: Option<ExtractionPolicy>,
    pub stop_rule: Option<StopRule>,
    /// `"all"`, `"schedule"` or a rule count.
    pub sample_size: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub tail: Option<Tail>,
    pub mode: Option<Mode>,
    pub samples: Option<u64>,
}

macro_rules! layer {
    ($top:expr, $bottom:expr, $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($bottom.$field),)* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| algoprob::Error::Io {
            path: path.to_owned(),
            source: e,
        })?;
        toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    /// Fields set in `self` win over those in `below`. A length range set
    /// here hides a single `n` below, and `steps_per_symbol` hides `steps`.
    pub fn over(self, mut below: RunConfig) -> RunConfig {
        if self.n_min.is_some() || self.n_max.is_some() {
            below.n = None;
        }
        if self.steps_per_symbol.is_some() {
            below.steps = None;
        }
        layer!(
            self,
            below,
            model,
            symbols,
            states,
            n,
            n_min,
            n_max,
            steps,
            steps_per_symbol,
            policy,
            stop_rule,
            sample_size,
            seed,
            workers,
            out,
            tail,
            mode,
            samples
        )
    }

    /// Fills every remaining field with its default.
    pub fn resolved(self) -> anyhow::Result<RunConfig> {
        let model = self.model.unwrap_or(ModelKind::Tm);
        let (n_min, n_max) = match (self.n, self.n_min, self.n_max) {
            (Some(n), _, _) => (n, n),
            (None, lo, hi) => (lo.unwrap_or(2), hi.unwrap_or(12)),
        };
        if n_min > n_max {
            bail!("n_min ({n_min}) is above n_max ({n_max})");
        }
        let sample_size = self.sample_size.unwrap_or_else(|| "all".into());
        sample_size.parse::<SampleSize>()?;
        let (symbols, states) = match model {
            ModelKind::Tm => (
                Some(self.symbols.unwrap_or(2)),
                Some(self.states.unwrap_or(2)),
            ),
            ModelKind::Eca => (None, None),
        };
        Ok(RunConfig {
            model: Some(model),
            symbols,
            states,
            n: None,
            n_min: Some(n_min),
            n_max: Some(n_max),
            steps: self.steps,
            steps_per_symbol: Some(self.steps_per_symbol.unwrap_or(10)),
            policy: Some(self.policy.unwrap_or(ExtractionPolicy::AllSubstrings)),
            stop_rule: Some(self.stop_rule.unwrap_or(match model {
                ModelKind::Tm => StopRule::FixedSteps,
                ModelKind::Eca => StopRule::UniformRandomStop,
            })),
            sample_size: Some(sample_size),
            seed: Some(self.seed.unwrap_or(0)),
            workers: Some(self.workers.unwrap_or(0)),
            out: self.out,
            tail: Some(self.tail.unwrap_or(Tail::OneSided)),
            mode: Some(self.mode.unwrap_or_default()),
            samples: Some(self.samples.unwrap_or(DEFAULT_MONTE_CARLO_SAMPLES)),
        })
    }

    /// Experiment for each length of a resolved config.
    pub fn experiments(&self) -> anyhow::Result<Vec<ExperimentSpec>> {
        let model = match self.model {
            Some(ModelKind::Eca) => Model::Eca,
            _ => Model::Tm {
                symbols: self.symbols.unwrap_or(2),
                states: self.states.unwrap_or(2),
            },
        };
        let sample_size: SampleSize = self.sample_size.as_deref().unwrap_or("all").parse()?;
        let (lo, hi) = (self.n_min.unwrap_or(2), self.n_max.unwrap_or(12));
        let mut specs = Vec::new();
        for n in lo..=hi {
            let mut spec = ExperimentSpec::new(model, n);
            spec.steps = self
                .steps
                .unwrap_or_else(|| self.steps_per_symbol.unwrap_or(10).saturating_mul(n as u64));
            spec.sample_size = sample_size;
            spec.seed = self.seed.unwrap_or(0);
            if let Some(p) = self.policy {
                spec.extraction = p;
            }
            if let Some(s) = self.stop_rule {
                spec.stop_rule = s;
            }
            spec.validate()?;
            specs.push(spec);
        }
        Ok(specs)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }
}
