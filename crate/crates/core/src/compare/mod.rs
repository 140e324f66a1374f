//! Theory-versus-experiment comparison: datasets, difference series,
//! binned confidence bands, exclusion verdicts and synthetic data.

mod dataset;
mod stats;
mod synth;
mod theory;

pub use dataset::{load_dataset, nm, write_dataset, Dataset, DatasetKind, Record, MIN_STATISTICS_RECORDS};
pub use stats::{
    apply_separation_shift, confidence_band, exclusion_verdict, propagate_separation_error, theory_minus_experiment,
    BandBin, ConfidenceBand, DiffRecord, DiffSeries, ExclusionVerdict, DEFAULT_BIN_WIDTH, MIN_BIN_POINTS,
};
pub use synth::{synthesize_dataset, NoiseProfile, DEVIATION_LADDER_MPA, LADDER_NOISE_SCALE};
pub use theory::{CachedTheory, LifshitzTheory, Theory};
