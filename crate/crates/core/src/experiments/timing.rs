//! Wall-clock comparison of distance computations on random pairs.

use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::records::ExperimentRecord;
use crate::distances::{dtw_distance, euclidean, space_saving_ratio, speedup_factors, twi};
use crate::error::{Error, Result};
use crate::series::{condense_values, Equality, LabeledDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimedMethod {
    Euclidean,
    Dtw,
    /// twi including condensing both series.
    Twi,
    /// dtw between series stored in condensed form.
    TwiCondensed,
}

impl TimedMethod {
    pub const ALL: [TimedMethod; 4] = [
        TimedMethod::Euclidean,
        TimedMethod::Dtw,
        TimedMethod::Twi,
        TimedMethod::TwiCondensed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TimedMethod::Euclidean => "euc",
            TimedMethod::Dtw => "dtw",
            TimedMethod::Twi => "twi",
            TimedMethod::TwiCondensed => "twi-stored",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingConfig {
    pub pairs: usize,
    pub reps: usize,
    pub seed: u64,
}

impl Default for TimingConfig {
    fn default() -> Self {
        TimingConfig {
            pairs: 100,
            reps: 100,
            seed: 0,
        }
    }
}

/// Random pairs `(i, j)` with `i != j`, fixed by the seed.
pub fn sample_pairs(n: usize, pairs: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return Err(Error::invalid("timing needs at least two series"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..pairs)
        .map(|_| {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            (i, j)
        })
        .collect())
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Times every method `reps` times on `pairs` random pairs and reports the
/// mean time per call (`time_ms`), the speed-up over dtw, and the pair's
/// space-saving ratio. Euclidean is timed only on equal-length pairs.
/// Per-method `median_time_ms` and `mean_time_ms` rows close the output.
pub fn timing_bench(data: &LabeledDataset, methods: &[TimedMethod], cfg: &TimingConfig) -> Result<Vec<ExperimentRecord>> {
    if cfg.reps == 0 || cfg.pairs == 0 {
        return Err(Error::invalid("pairs and reps must be >= 1"));
    }
    let pairs = sample_pairs(data.len(), cfg.pairs, cfg.seed)?;
    let condensed: Vec<Vec<f64>> = data.iter().map(|(s, _)| condense_values(s, Equality::Exact)).collect();
    let mut records = Vec::new();
    let mut per_method: Vec<Vec<f64>> = vec![Vec::new(); methods.len()];
    let name = data.name.as_str();

    for (p, &(i, j)) in pairs.iter().enumerate() {
        let (x, y) = (data.series(i).values(), data.series(j).values());
        let (cx, cy) = (&condensed[i], &condensed[j]);
        let mut dtw_ms = None;
        let mut timed = Vec::new();
        for (k, &m) in methods.iter().enumerate() {
            if m == TimedMethod::Euclidean && x.len() != y.len() {
                continue;
            }
            let started = Instant::now();
            for _ in 0..cfg.reps {
                let d = match m {
                    TimedMethod::Euclidean => euclidean(black_box(x), black_box(y)),
                    TimedMethod::Dtw => dtw_distance(black_box(x), black_box(y)),
                    TimedMethod::Twi => twi(black_box(x), black_box(y)),
                    TimedMethod::TwiCondensed => dtw_distance(black_box(cx), black_box(cy)),
                }?;
                black_box(d);
            }
            let ms = started.elapsed().as_secs_f64() * 1e3 / cfg.reps as f64;
            if m == TimedMethod::Dtw {
                dtw_ms = Some(ms);
            }
            per_method[k].push(ms);
            timed.push((m, ms));
            records.push(ExperimentRecord::new(name, m.name(), "time_ms", ms, Some(p), cfg.seed, ms)?);
        }
        if let Some(base) = dtw_ms {
            for (m, ms) in timed {
                if m != TimedMethod::Dtw && ms > 0.0 {
                    records.push(ExperimentRecord::new(name, m.name(), "speedup", base / ms, Some(p), cfg.seed, ms)?);
                }
            }
        }
        let f = speedup_factors(x.len(), y.len(), cx.len(), cy.len());
        let rho = space_saving_ratio(x.len(), y.len(), cx.len(), cy.len());
        records.push(ExperimentRecord::new(name, "twi", "rho_ss", rho, Some(p), cfg.seed, 0.0)?);
        records.push(ExperimentRecord::new(name, "twi", "phi1", f.phi1, Some(p), cfg.seed, 0.0)?);
        records.push(ExperimentRecord::new(name, "twi", "phi2", f.phi2, Some(p), cfg.seed, 0.0)?);
    }
    for (k, m) in methods.iter().enumerate() {
        let times = &mut per_method[k];
        if times.is_empty() {
            continue;
        }
        let mean = times.iter().sum::<f64>() / times.len() as f64;
        let med = median(times);
        records.push(ExperimentRecord::new(name, m.name(), "mean_time_ms", mean, None, cfg.seed, mean)?);
        records.push(ExperimentRecord::new(name, m.name(), "median_time_ms", med, None, cfg.seed, med)?);
    }
    Ok(records)
}
