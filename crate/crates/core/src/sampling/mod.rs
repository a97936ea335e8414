//! Running rule spaces and turning their outputs into frequency distributions.

mod counts;
mod distribution;
mod run;
mod spec;

pub use counts::{merge_counts, StringCounts};
pub(crate) use distribution::{average_ranks_sorted, tie_runs, tied};
pub use distribution::{
    build_distribution, rank_strings, tie_tolerance, Distribution, DistributionMeta, RankedString,
    FORMAT_NAME, FORMAT_VERSION,
};
pub(crate) use run::substream;
pub use run::{
    experiment_meta, raw_output, run_experiment, run_length, sample_outputs, select_rules,
    SampleOutcome,
};
pub use spec::{ExperimentSpec, ExtractionPolicy, Model, SampleSize, StopRule};
