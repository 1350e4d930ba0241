//! Forward Monte Carlo sampling, summary statistics and an exact enumeration
//! oracle.

mod exact;
mod export;
pub mod rng;
mod sample;
mod summary;
mod world;

pub use exact::{enumerate_exact, ExactDistribution, ExactError, MAX_JOINT_STATES};
pub use export::{
    parse_samples_csv, samples_csv, samples_json, summaries, summary_json, summary_table, TargetSummary, CSV_HEADER,
};
pub use rng::{RngState, Xoshiro256StarStar};
pub use sample::{sample_distribution, SampleError, MAX_TRUNCATION_REJECTS};
pub use summary::{bucket, bucket_share, summarize, EmptySamples, Summary};
pub use world::{
    instantiate_world, run_monte_carlo, CompiledNetwork, Forecast, ForecastResult, SimulationError, WorldSample,
};

/// Default sample count for a run.
pub const DEFAULT_SAMPLES: usize = 10_000;
