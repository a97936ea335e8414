//! Frequency-based estimates of algorithmic probability from exhaustively
//! enumerated small Turing machines and elementary cellular automata, with
//! rank statistics for comparing the resulting string distributions.

pub mod analysis;
pub mod bits;
pub mod error;
pub mod io;
pub mod rankstats;
pub mod rulespace;
pub mod sampling;
pub mod scalar;
pub mod symmetry;

pub use bits::BitString;
pub use error::{Error, Result};
pub use scalar::Scalar;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Distribution64 = sampling::Distribution<f64>;
pub type Distribution32 = sampling::Distribution<f32>;
pub type ReducedDistribution64 = symmetry::ReducedDistribution<f64>;
pub type ReducedDistribution32 = symmetry::ReducedDistribution<f32>;
pub type DistributionSequence64 = analysis::DistributionSequence<f64>;
pub type DistributionSequence32 = analysis::DistributionSequence<f32>;
pub type CorrelationReport64 = analysis::CorrelationReport<f64>;
pub type CorrelationReport32 = analysis::CorrelationReport<f32>;
pub type RankVector64 = rankstats::RankVector<f64>;
pub type RankVector32 = rankstats::RankVector<f32>;
