//! Two-class cylinder data: a constant base level with a short noisy
//! plateau at a random position, and the nearest-neighbor study on it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::derive_seed;
use super::records::ExperimentRecord;
use crate::error::{Error, Result};
use crate::nn::{DistanceKind, NnClassifier, NnConfig};
use crate::series::{z_normalize, LabeledDataset, TimeSeries};

pub const LABEL_PLUS: &str = "+1";
pub const LABEL_MINUS: &str = "-1";

/// Parameters of the generator. Element `i` of a series of class `y` is
/// `b_y + e_b` outside the plateau and `c_y + e_c` on it, with `e_b` and
/// `e_c` drawn per element from `U[0, theta_b]` and `U[0, theta_c]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthConfig {
    pub n_series: usize,
    pub series_len: usize,
    pub cylinder_len: usize,
    pub b_plus: f64,
    pub b_minus: f64,
    pub theta_b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub theta_c: f64,
    pub z_transform: bool,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_series: 200,
            series_len: 100,
            cylinder_len: 10,
            b_plus: 0.0,
            b_minus: 0.0,
            theta_b: 0.0,
            c_plus: 1.0,
            c_minus: 1.0,
            theta_c: 0.0,
            z_transform: false,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_series < 2 || !self.n_series.is_multiple_of(2) {
            return Err(Error::invalid("n_series must be even and >= 2"));
        }
        if self.cylinder_len == 0 || self.cylinder_len > self.series_len {
            return Err(Error::invalid("cylinder_len must be in 1..=series_len"));
        }
        let params = [self.b_plus, self.b_minus, self.c_plus, self.c_minus, self.theta_b, self.theta_c];
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("generator parameters must be finite"));
        }
        if self.theta_b < 0.0 || self.theta_c < 0.0 {
            return Err(Error::invalid("noise bounds must be >= 0"));
        }
        Ok(())
    }
}

fn noise(rng: &mut ChaCha8Rng, theta: f64) -> f64 {
    if theta == 0.0 {
        0.0
    } else {
        rng.random_range(0.0..=theta)
    }
}

/// `n_series / 2` series of class `+1` followed by as many of class `-1`.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<LabeledDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let half = cfg.n_series / 2;
    let mut items = Vec::with_capacity(cfg.n_series);
    for (label, b, c) in [
        (LABEL_PLUS, cfg.b_plus, cfg.c_plus),
        (LABEL_MINUS, cfg.b_minus, cfg.c_minus),
    ] {
        for _ in 0..half {
            let start = rng.random_range(0..=cfg.series_len - cfg.cylinder_len);
            let plateau = start..start + cfg.cylinder_len;
            let values: Vec<f64> = (0..cfg.series_len)
                .map(|i| {
                    if plateau.contains(&i) {
                        c + noise(&mut rng, cfg.theta_c)
                    } else {
                        b + noise(&mut rng, cfg.theta_b)
                    }
                })
                .collect();
            let mut series = TimeSeries::new(values)?;
            if cfg.z_transform {
                series = z_normalize(&series);
            }
            items.push((series, label.to_string()));
        }
    }
    LabeledDataset::new("synthetic", items)
}

/// The five generator settings of the synthetic study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Table5Row {
    E1,
    E2,
    E3,
    E4,
    E5,
}

impl Table5Row {
    pub const ALL: [Table5Row; 5] = [Table5Row::E1, Table5Row::E2, Table5Row::E3, Table5Row::E4, Table5Row::E5];

    pub fn name(&self) -> &'static str {
        match self {
            Table5Row::E1 => "E1",
            Table5Row::E2 => "E2",
            Table5Row::E3 => "E3",
            Table5Row::E4 => "E4",
            Table5Row::E5 => "E5",
        }
    }

    /// Generator settings with the given seed.
    pub fn config(&self, seed: u64) -> SynthConfig {
        // (b_plus, b_minus, theta_b, c_plus, c_minus, theta_c, z)
        let (b_plus, b_minus, theta_b, c_plus, c_minus, theta_c, z_transform) = match self {
            Table5Row::E1 => (0.0, -0.05, 0.0, 1.0, 1.0, 1.0, false),
            Table5Row::E2 => (0.0, -0.05, 0.0, 1.0, 1.0, 0.1, false),
            Table5Row::E3 => (0.0, 0.0, 1.0, 1.0, 1.05, 1.0, false),
            Table5Row::E4 => (0.0, 0.0, 0.1, 1.0, 1.05, 1.0, false),
            Table5Row::E5 => (0.0, -0.05, 0.0, 1.0, 1.0, 1.0, true),
        };
        SynthConfig {
            b_plus,
            b_minus,
            theta_b,
            c_plus,
            c_minus,
            theta_c,
            z_transform,
            seed,
            ..SynthConfig::default()
        }
    }

    /// Published error rates (euc, dtw, twi) as fractions.
    pub fn reference_error_rates(&self) -> (f64, f64, f64) {
        match self {
            Table5Row::E1 => (0.50, 0.0, 0.37),
            Table5Row::E2 => (0.35, 0.0, 0.0),
            Table5Row::E3 => (0.50, 0.31, 0.0),
            Table5Row::E4 => (0.49, 0.0, 0.0),
            Table5Row::E5 => (0.51, 0.45, 0.45),
        }
    }
}

impl fmt::Display for Table5Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Table5Row {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Table5Row::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown row {s:?}, expected E1..E5")))
    }
}

/// Train and test halves with equal class counts in each.
pub fn balanced_split(data: &LabeledDataset, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for label in [LABEL_PLUS, LABEL_MINUS] {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data.label(i) == label).collect();
        idx.shuffle(&mut rng);
        let half = idx.len() / 2;
        train.extend_from_slice(&idx[..half]);
        test.extend_from_slice(&idx[half..]);
    }
    Ok((data.subset(&train)?, data.subset(&test)?))
}

pub const SYNTH_METHODS: [DistanceKind; 3] = [DistanceKind::Euclidean, DistanceKind::Dtw, DistanceKind::Twi];

fn one_repeat(row: Table5Row, rep: usize, seed: u64) -> Result<Vec<ExperimentRecord>> {
    let data_seed = derive_seed(seed, &[row as u64, rep as u64, 0]);
    let split_seed = derive_seed(seed, &[row as u64, rep as u64, 1]);
    let data = generate_synthetic(&row.config(data_seed))?;
    let (train, test) = balanced_split(&data, split_seed)?;
    let queries: Vec<&[f64]> = test.iter().map(|(s, _)| s.values()).collect();
    SYNTH_METHODS
        .iter()
        .map(|&kind| {
            let started = Instant::now();
            let clf = NnClassifier::new(&train, NnConfig::new(kind))?;
            let preds = clf.classify_all(&queries)?;
            let wrong = preds
                .iter()
                .zip(test.iter())
                .filter(|(p, (_, l))| p.label != *l)
                .count();
            ExperimentRecord::new(
                row.name(),
                kind.name(),
                "error_rate",
                wrong as f64 / test.len() as f64,
                Some(rep),
                data_seed,
                started.elapsed().as_secs_f64() * 1e3,
            )
        })
        .collect()
}

/// Error rates of euc, dtw and twi 1-NN for every row and repeat.
///
/// Repeat `k` of a row draws its data from `derive_seed(seed, [row, k, 0])`
/// and its split from `derive_seed(seed, [row, k, 1])`; repeats run in
/// parallel and the output is ordered by row, repeat and method.
pub fn run_synth_study(rows: &[Table5Row], repeats: usize, seed: u64) -> Result<Vec<ExperimentRecord>> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be >= 1"));
    }
    let tasks: Vec<(Table5Row, usize)> = rows
        .iter()
        .flat_map(|&r| (0..repeats).map(move |k| (r, k)))
        .collect();
    let chunks = tasks
        .par_iter()
        .map(|&(row, rep)| one_repeat(row, rep, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Mean error rates of one row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSummary {
    pub row: Table5Row,
    pub repeats: usize,
    pub euc: f64,
    pub dtw: f64,
    pub twi: f64,
}

/// Averages the per-repeat error rates of `run_synth_study` by row.
pub fn summarize_synth(records: &[ExperimentRecord]) -> Vec<SynthSummary> {
    let mut out = Vec::new();
    for row in Table5Row::ALL {
        let mean = |method: &str| {
            let v: Vec<f64> = records
                .iter()
                .filter(|r| r.dataset == row.name() && r.method == method && r.metric == "error_rate")
                .map(|r| r.value)
                .collect();
            (v.len(), v.iter().sum::<f64>() / v.len().max(1) as f64)
        };
        let (n, euc) = mean("euc");
        if n == 0 {
            continue;
        }
        out.push(SynthSummary {
            row,
            repeats: n,
            euc,
            dtw: mean("dtw").1,
            twi: mean("twi").1,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::condensed_len;
    use crate::series::Equality;

    #[test]
    fn shape_and_determinism() {
        let cfg = Table5Row::E1.config(5);
        let a = generate_synthetic(&cfg).unwrap();
        assert_eq!(a, generate_synthetic(&cfg).unwrap());
        assert_eq!(a.len(), 200);
        assert_eq!(a.iter().filter(|(_, l)| *l == LABEL_PLUS).count(), 100);
        for (s, l) in a.iter() {
            assert_eq!(s.len(), 100);
            let base = if l == LABEL_PLUS { 0.0 } else { -0.05 };
            assert_eq!(s.iter().filter(|&&v| v == base).count(), 90);
            assert!(condensed_len(s, Equality::Exact) <= 12);
        }
        assert_ne!(a, generate_synthetic(&Table5Row::E1.config(6)).unwrap());
    }

    #[test]
    fn plateau_is_contiguous() {
        let mut cfg = Table5Row::E2.config(1);
        cfg.b_minus = 0.0;
        let d = generate_synthetic(&cfg).unwrap();
        for (s, _) in d.iter() {
            let on: Vec<usize> = (0..s.len()).filter(|&i| s[i] >= 1.0).collect();
            assert_eq!(on.len(), 10);
            assert_eq!(on[9] - on[0], 9);
        }
    }

    #[test]
    fn z_transform_applies() {
        let d = generate_synthetic(&Table5Row::E5.config(2)).unwrap();
        for (s, _) in d.iter() {
            let mean = s.iter().sum::<f64>() / s.len() as f64;
            assert!(mean.abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let cfg = SynthConfig { cylinder_len: 101, ..SynthConfig::default() };
        assert!(generate_synthetic(&cfg).is_err());
        let cfg = SynthConfig { theta_c: -1.0, ..SynthConfig::default() };
        assert!(generate_synthetic(&cfg).is_err());
        let cfg = SynthConfig { n_series: 3, ..SynthConfig::default() };
        assert!(generate_synthetic(&cfg).is_err());
    }

    #[test]
    fn split_is_balanced() {
        let d = generate_synthetic(&Table5Row::E1.config(3)).unwrap();
        let (train, test) = balanced_split(&d, 4).unwrap();
        assert_eq!(train.len(), 100);
        assert_eq!(test.len(), 100);
        assert_eq!(train.iter().filter(|(_, l)| *l == LABEL_PLUS).count(), 50);
    }

    #[test]
    fn row_names_parse() {
        for r in Table5Row::ALL {
            assert_eq!(r.name().parse::<Table5Row>().unwrap(), r);
        }
        assert!("E6".parse::<Table5Row>().is_err());
    }

    #[test]
    fn small_study_is_deterministic() {
        let a = run_synth_study(&[Table5Row::E2], 2, 11).unwrap();
        let b = run_synth_study(&[Table5Row::E2], 2, 11).unwrap();
        assert_eq!(a.len(), 6);
        let strip = |r: &[ExperimentRecord]| r.iter().map(|x| (x.method.clone(), x.value, x.fold)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        let s = summarize_synth(&a);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].repeats, 2);
    }
}
