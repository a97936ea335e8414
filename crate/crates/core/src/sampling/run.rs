use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rulespace::{eca_row_at, EcaRule, TmProgram};
use crate::sampling::counts::{merge_counts, StringCounts};
use crate::sampling::distribution::{Distribution, DistributionMeta};
use crate::sampling::spec::{ExperimentSpec, Model, StopRule};
use crate::scalar::Scalar;

/// Rules per parallel work item.
const CHUNK: usize = 32;

/// Stream 0 selects rules; stream `1 + 2·index + background` drives one run.
pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Counts gathered from one experiment, split by initial condition.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleOutcome {
    /// Index 0: background 0 (TM blank tape of 0s, CA seed 1 on 0s); index 1: the complement.
    pub by_background: [StringCounts; 2],
    pub rules_sampled: u64,
}

impl SampleOutcome {
    pub fn combined(&self) -> StringCounts {
        merge_counts(&self.by_background).expect("both halves share the target length")
    }

    pub fn total(&self) -> u64 {
        self.by_background.iter().map(StringCounts::total).sum()
    }
}

/// Rule indices to run, ascending. All rules when the sample covers the space;
/// otherwise a seeded uniform draw without replacement.
pub fn select_rules(spec: &ExperimentSpec) -> Result<Vec<u64>> {
    let space = spec.model.space_size()?;
    let amount = spec.sample_size.resolve(space, spec.n)?;
    if amount == space {
        return Ok((0..space).collect());
    }
    let space_usize = usize::try_from(space)
        .map_err(|_| Error::Capacity(format!("rule space of {space} exceeds the address space")))?;
    let mut rng = substream(spec.seed, 0);
    let mut picked: Vec<u64> = rand::seq::index::sample(&mut rng, space_usize, amount as usize)
        .into_iter()
        .map(|i| i as u64)
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Number of steps a single run lasts.
pub fn run_length(spec: &ExperimentSpec, index: u64, background: u8) -> u64 {
    match spec.stop_rule {
        StopRule::FixedSteps => spec.steps,
        StopRule::UniformRandomStop => {
            let mut rng = substream(spec.seed, 1 + 2 * index + u64::from(background));
            rng.gen_range(spec.n as u64..=spec.steps)
        }
    }
}

/// Raw output of rule `index` from the given initial condition.
pub fn raw_output(spec: &ExperimentSpec, index: u64, background: u8) -> Result<Vec<u8>> {
    let steps = run_length(spec, index, background);
    Ok(match spec.model {
        Model::Tm { symbols, states } => {
            TmProgram::decode(index, symbols, states)?
                .run(background, steps)
                .output
        }
        Model::Eca => {
            let number = u8::try_from(index).map_err(|_| Error::OutOfRange { index, size: 256 })?;
            eca_row_at(EcaRule::new(number), background, steps).cells
        }
    })
}

fn sample_chunk(spec: &ExperimentSpec, indices: &[u64]) -> Result<[StringCounts; 2]> {
    let mut local: [HashMap<BitString, u64>; 2] = Default::default();
    for &index in indices {
        for background in 0..2u8 {
            let output = raw_output(spec, index, background)?;
            let tally = &mut local[usize::from(background)];
            spec.extraction
                .extract(&output, spec.n, |s| *tally.entry(s).or_insert(0) += 1);
        }
    }
    let [a, b] = local;
    Ok([StringCounts::from_pairs(a)?, StringCounts::from_pairs(b)?])
}

/// Runs every selected rule on both initial conditions and tallies the extracted strings.
///
/// `workers == 0` uses the global thread pool. The result does not depend on
/// the worker count.
pub fn sample_outputs(spec: &ExperimentSpec, workers: usize) -> Result<SampleOutcome> {
    spec.validate()?;
    let indices = select_rules(spec)?;
    let work = || -> Result<Vec<[StringCounts; 2]>> {
        indices
            .par_chunks(CHUNK)
            .map(|chunk| sample_chunk(spec, chunk))
            .collect()
    };
    let parts = if workers == 1 {
        indices
            .chunks(CHUNK)
            .map(|chunk| sample_chunk(spec, chunk))
            .collect::<Result<Vec<_>>>()?
    } else if workers == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?
            .install(work)?
    };
    let mut by_background: [StringCounts; 2] = Default::default();
    for part in &parts {
        for (acc, half) in by_background.iter_mut().zip(part) {
            acc.merge(half)?;
        }
    }
    let outcome = SampleOutcome {
        by_background,
        rules_sampled: indices.len() as u64,
    };
    if outcome.total() == 0 {
        return Err(Error::EmptySample { n: spec.n });
    }
    Ok(outcome)
}

/// Samples and normalizes in one call, attaching provenance.
pub fn run_experiment<T: Scalar>(spec: &ExperimentSpec, workers: usize) -> Result<Distribution<T>> {
    let outcome = sample_outputs(spec, workers)?;
    let combined = outcome.combined();
    let d = Distribution::from_counts(&combined, spec.n)?;
    Ok(d.with_meta(experiment_meta(spec, &outcome)))
}

pub fn experiment_meta(spec: &ExperimentSpec, outcome: &SampleOutcome) -> DistributionMeta {
    DistributionMeta {
        experiment: Some(*spec),
        rules_sampled: Some(outcome.rules_sampled),
        total: Some(outcome.total()),
        ..DistributionMeta::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::spec::{ExtractionPolicy, SampleSize};

    fn s(text: &str) -> BitString {
        text.parse().unwrap()
    }

    #[test]
    fn single_machine_write_right() {
        // (2,1) machine 15: write 1, move right, stay in state 1, on both symbols
        let spec = ExperimentSpec {
            model: Model::Tm {
                symbols: 2,
                states: 1,
            },
            n: 2,
            steps: 20,
            sample_size: SampleSize::All,
            extraction: ExtractionPolicy::AllSubstrings,
            stop_rule: StopRule::FixedSteps,
            seed: 0,
        };
        let mut tally: [HashMap<BitString, u64>; 2] = Default::default();
        for bg in 0..2u8 {
            let out = raw_output(&spec, 15, bg).unwrap();
            spec.extraction.extract(&out, 2, |x| {
                *tally[usize::from(bg)].entry(x).or_insert(0) += 1
            });
        }
        assert_eq!(tally[0], HashMap::from([(s("11"), 19), (s("10"), 1)]));
        assert_eq!(tally[1], HashMap::from([(s("11"), 20)]));
        let [a, b] = sample_chunk(&spec, &[15]).unwrap();
        let both = merge_counts([&a, &b]).unwrap();
        assert_eq!(both.get(&s("11")), 39);
        assert_eq!(both.get(&s("10")), 1);
    }

    #[test]
    fn schedule_selection_sizes() {
        let mut spec = ExperimentSpec::new(Model::TM22, 12);
        spec.sample_size = SampleSize::Schedule;
        let picked = select_rules(&spec).unwrap();
        assert_eq!(picked.len(), 4092);
        assert!(picked.windows(2).all(|w| w[0] < w[1]));

        let mut spec = ExperimentSpec::new(Model::Eca, 12);
        spec.sample_size = SampleSize::Schedule;
        assert_eq!(select_rules(&spec).unwrap().len(), 252);
        spec.n = 3;
        let a = select_rules(&spec).unwrap();
        assert_eq!(a.len(), 63);
        assert_eq!(a, select_rules(&spec).unwrap());
        spec.seed = 1;
        assert_ne!(a, select_rules(&spec).unwrap());
    }

    #[test]
    fn random_stop_within_bounds_and_seeded() {
        let spec = ExperimentSpec::new(Model::Eca, 5);
        for index in 0..256 {
            for bg in 0..2 {
                let t = run_length(&spec, index, bg);
                assert!((5..=50).contains(&t));
                assert_eq!(t, run_length(&spec, index, bg));
            }
        }
    }

    #[test]
    fn no_loss_in_totals() {
        let spec = ExperimentSpec::new(Model::TM22, 3);
        let outcome = sample_outputs(&spec, 1).unwrap();
        let mut expected = 0u64;
        for index in 0..4096 {
            for bg in 0..2 {
                let len = raw_output(&spec, index, bg).unwrap().len() as u64;
                expected += (len + 1).saturating_sub(3);
            }
        }
        assert_eq!(outcome.total(), expected);
        assert_eq!(outcome.rules_sampled, 4096);
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let spec = ExperimentSpec::new(Model::Eca, 4);
        let one = sample_outputs(&spec, 1).unwrap();
        assert_eq!(one, sample_outputs(&spec, 3).unwrap());
        assert_eq!(one, sample_outputs(&spec, 0).unwrap());
    }

    #[test]
    fn empty_sample_signalled() {
        let spec = ExperimentSpec {
            model: Model::Eca,
            n: 3,
            steps: 3,
            sample_size: SampleSize::Count(5),
            extraction: ExtractionPolicy::ExactLength,
            stop_rule: StopRule::FixedSteps,
            seed: 9,
        };
        // rows after 3 steps have 7 cells, never exactly 3
        assert!(matches!(
            sample_outputs(&spec, 1),
            Err(Error::EmptySample { n: 3 })
        ));
    }

    #[test]
    fn steps_below_n_rejected() {
        let mut spec = ExperimentSpec::new(Model::TM22, 6);
        spec.steps = 5;
        assert!(matches!(sample_outputs(&spec, 1), Err(Error::Config(_))));
    }
}
