use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{
    experiment_meta, sample_outputs, Distribution, ExperimentSpec, ExtractionPolicy, Model,
    SampleSize, StopRule,
};
use crate::scalar::Scalar;
use crate::symmetry::reduce_distribution;

/// Parameters shared by every length in a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceConfig {
    pub model: Model,
    pub n_min: usize,
    pub n_max: usize,
    /// Steps per unit of string length (`steps = steps_per_symbol · n`).
    pub steps_per_symbol: u64,
    pub sample_size: SampleSize,
    /// `None` uses the model's default.
    pub extraction: Option<ExtractionPolicy>,
    pub stop_rule: Option<StopRule>,
    pub seed: u64,
}

impl SequenceConfig {
    pub fn new(model: Model, n_min: usize, n_max: usize) -> Self {
        Self {
            model,
            n_min,
            n_max,
            steps_per_symbol: 10,
            sample_size: SampleSize::All,
            extraction: None,
            stop_rule: None,
            seed: 0,
        }
    }

    pub fn spec_for(&self, n: usize) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(self.model, n);
        spec.steps = self.steps_per_symbol * n as u64;
        spec.sample_size = self.sample_size;
        spec.seed = self.seed;
        if let Some(e) = self.extraction {
            spec.extraction = e;
        }
        if let Some(s) = self.stop_rule {
            spec.stop_rule = s;
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_min < 2 {
            return Err(Error::Config(format!(
                "sequences start at n >= 2, got n_min = {}",
                self.n_min
            )));
        }
        if self.n_max < self.n_min {
            return Err(Error::Config(format!(
                "n_max ({}) is below n_min ({})",
                self.n_max, self.n_min
            )));
        }
        for n in self.n_min..=self.n_max {
            self.spec_for(n).validate()?;
        }
        Ok(())
    }
}

/// Raw and reduced distributions for one string length.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceEntry<T = f64> {
    pub raw: Distribution<T>,
    pub reduced: Distribution<T>,
}

/// Reduced distributions indexed by string length.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionSequence<T = f64> {
    pub model: Option<Model>,
    pub per_n: BTreeMap<usize, Distribution<T>>,
}

impl<T: Scalar> DistributionSequence<T> {
    /// Reduces any raw inputs; keeps reduced ones as they are.
    pub fn from_distributions(
        model: Option<Model>,
        distributions: impl IntoIterator<Item = Distribution<T>>,
    ) -> Result<Self> {
        let mut per_n = BTreeMap::new();
        for d in distributions {
            let d = if d.is_reduced() {
                d
            } else {
                reduce_distribution(&d).to_distribution()
            };
            if per_n.insert(d.n(), d).is_some() {
                return Err(Error::Config("two distributions share the same n".into()));
            }
        }
        Ok(Self { model, per_n })
    }

    pub fn len(&self) -> usize {
        self.per_n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_n.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&Distribution<T>> {
        self.per_n.get(&n)
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.per_n.keys().copied()
    }

    /// Loads every `reduced_n*.json` file in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths: Vec<PathBuf> = Vec::new();
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if name.starts_with("reduced_n") && name.ends_with(".json") {
                paths.push(path);
            }
        }
        if paths.is_empty() {
            return Err(Error::Format {
                path: dir.to_owned(),
                message: "no reduced_n*.json distribution files found".into(),
            });
        }
        paths.sort();
        let distributions = paths
            .iter()
            .map(|p| Distribution::load(p))
            .collect::<Result<Vec<_>>>()?;
        let model = distributions
            .iter()
            .find_map(|d| d.meta().experiment.map(|e| e.model));
        Self::from_distributions(model, distributions)
    }
}

/// File name used for the raw distribution of length `n`.
pub fn raw_file_name(n: usize) -> String {
    format!("raw_n{n:02}.json")
}

/// File name used for the reduced distribution of length `n`.
pub fn reduced_file_name(n: usize) -> String {
    format!("reduced_n{n:02}.json")
}

/// Reduced sequence together with the raw distribution of each length.
pub type BuiltSequence<T> = (DistributionSequence<T>, BTreeMap<usize, Distribution<T>>);

/// Samples, normalizes and reduces one length.
pub fn build_entry<T: Scalar>(spec: &ExperimentSpec, workers: usize) -> Result<SequenceEntry<T>> {
    let outcome = sample_outputs(spec, workers)?;
    let raw = Distribution::from_counts(&outcome.combined(), spec.n)?
        .with_meta(experiment_meta(spec, &outcome));
    let reduced = reduce_distribution(&raw).to_distribution();
    Ok(SequenceEntry { raw, reduced })
}

/// Runs every length in `n_min..=n_max` with `steps = 10·n` (by default) and
/// reduces each distribution by symmetry.
pub fn build_sequence<T: Scalar>(
    config: &SequenceConfig,
    workers: usize,
) -> Result<BuiltSequence<T>> {
    config.validate()?;
    let mut reduced = BTreeMap::new();
    let mut raw = BTreeMap::new();
    for n in config.n_min..=config.n_max {
        let entry = build_entry(&config.spec_for(n), workers)?;
        raw.insert(n, entry.raw);
        reduced.insert(n, entry.reduced);
    }
    Ok((
        DistributionSequence {
            model: Some(config.model),
            per_n: reduced,
        },
        raw,
    ))
}

/// Writes raw and reduced files for each length into `dir`.
pub fn save_sequence<T: Scalar>(
    dir: &Path,
    sequence: &DistributionSequence<T>,
    raw: &BTreeMap<usize, Distribution<T>>,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (n, d) in raw {
        d.save(&dir.join(raw_file_name(*n)))?;
    }
    for (n, d) in &sequence.per_n {
        d.save(&dir.join(reduced_file_name(*n)))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::class_count;

    #[test]
    fn config_validation() {
        assert!(SequenceConfig::new(Model::TM22, 1, 3).validate().is_err());
        assert!(SequenceConfig::new(Model::TM22, 4, 3).validate().is_err());
        assert!(SequenceConfig::new(Model::TM22, 2, 3).validate().is_ok());
        let mut c = SequenceConfig::new(Model::Eca, 2, 3);
        c.steps_per_symbol = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn eca_length_two_bounded_by_class_count() {
        let (seq, raw) = build_sequence::<f64>(&SequenceConfig::new(Model::Eca, 2, 2), 0).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(raw.len(), 1);
        let d = seq.get(2).unwrap();
        assert!(d.is_reduced());
        assert!(d.len() as u128 <= class_count(2).unwrap());
    }

    #[test]
    fn save_and_load_dir() {
        let dir = tempfile::tempdir().unwrap();
        let (seq, raw) = build_sequence::<f64>(&SequenceConfig::new(Model::Eca, 2, 3), 1).unwrap();
        save_sequence(dir.path(), &seq, &raw).unwrap();
        assert!(dir.path().join("raw_n02.json").exists());
        let back = DistributionSequence::<f64>::load_dir(dir.path()).unwrap();
        assert_eq!(back, seq);
        assert_eq!(back.model, Some(Model::Eca));
    }
}
