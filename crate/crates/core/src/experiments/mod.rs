//! Dataset ingestion, synthetic data, statistics, timing and the study
//! runners behind the command-line tool.

pub mod bayes;
pub mod io;
pub mod records;
pub mod stats;
pub mod studies;
pub mod synth;
pub mod timing;

pub use bayes::{bayes_sign_test, BayesResult};
pub use io::{discover_datasets, load_ucr, segment, DatasetFiles};
pub use records::{write_csv, write_json, ExperimentRecord};
pub use stats::{correlations, reducibility_stats, Correlations, ReducibilityStats};
pub use studies::{run_cv_study, run_split_study};
pub use synth::{generate_synthetic, run_synth_study, summarize_synth, SynthConfig, SynthSummary, Table5Row};
pub use timing::{timing_bench, TimedMethod, TimingConfig};

/// Child seed for the task identified by `path` under `master`.
///
/// Mixes with the SplitMix64 finalizer, so nearby paths give unrelated
/// seeds and results never depend on scheduling order.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = master;
    for &p in path {
        h = splitmix(h ^ splitmix(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    splitmix(h)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
