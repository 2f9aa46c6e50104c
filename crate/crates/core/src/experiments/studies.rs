//! Cross-validated and fixed-split nearest-neighbor studies over a
//! directory of datasets.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::io::discover_datasets;
use super::records::ExperimentRecord;
use crate::distances::BandConfig;
use crate::error::{Error, Result};
use crate::nn::{fold_assignment, NnClassifier, NnConfig};
use crate::series::LabeledDataset;

fn accuracy(train: &LabeledDataset, test: &LabeledDataset, cfg: &NnConfig) -> Result<f64> {
    let clf = NnClassifier::new(train, cfg.clone())?;
    let mut correct = 0;
    for (s, label) in test.iter() {
        if clf.classify(s)?.label == label {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

/// k-fold accuracies of every method on one dataset, one record per
/// method and fold. All methods see the same folds, drawn from `seed`.
pub fn cv_records(data: &LabeledDataset, methods: &[NnConfig], folds: usize, seed: u64) -> Result<Vec<ExperimentRecord>> {
    if methods.is_empty() {
        return Err(Error::invalid("no methods given"));
    }
    for m in methods {
        m.validate()?;
    }
    let (fold_of, _) = fold_assignment(data, folds, seed)?;
    let splits = (0..folds)
        .map(|f| {
            let train: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] != f).collect();
            let test: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] == f).collect();
            Ok((data.subset(&train)?, data.subset(&test)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, usize)> = (0..methods.len())
        .flat_map(|m| (0..folds).map(move |f| (m, f)))
        .collect();
    tasks
        .par_iter()
        .map(|&(m, f)| {
            let started = Instant::now();
            let (train, test) = &splits[f];
            let acc = accuracy(train, test, &methods[m])?;
            ExperimentRecord::new(
                &data.name,
                method_name(&methods[m]),
                "accuracy",
                acc,
                Some(f),
                seed,
                started.elapsed().as_secs_f64() * 1e3,
            )
        })
        .collect()
}

fn method_name(cfg: &NnConfig) -> String {
    match cfg.band {
        Some(BandConfig::Fraction(f)) if !cfg.distance.is_optimized() => format!("{}-band{f}", cfg.distance.name()),
        Some(BandConfig::Absolute(r)) if !cfg.distance.is_optimized() => format!("{}-radius{r}", cfg.distance.name()),
        _ => cfg.distance.name().to_string(),
    }
}

/// Cross-validation over every dataset found under `dataset_dir`.
///
/// With `merge`, each dataset's train and test files are pooled before
/// folding; otherwise the predefined split is evaluated instead, giving one
/// record per method with an empty fold.
pub fn run_cv_study(
    dataset_dir: impl AsRef<Path>,
    methods: &[NnConfig],
    folds: usize,
    seed: u64,
    merge: bool,
) -> Result<Vec<ExperimentRecord>> {
    let mut records = Vec::new();
    for files in discover_datasets(dataset_dir)? {
        log::info!("{}: loading", files.name);
        if merge {
            records.extend(cv_records(&files.load_merged()?, methods, folds, seed)?);
        } else {
            let test = files
                .test
                .as_ref()
                .ok_or_else(|| Error::invalid(format!("{} has no test file", files.name)))?;
            let train = super::io::load_ucr(&files.train)?;
            let test = super::io::load_ucr(test)?;
            records.extend(run_split_study(&train, &test, methods)?);
        }
    }
    Ok(records)
}

/// Accuracy of every method on a fixed train/test split.
pub fn run_split_study(train: &LabeledDataset, test: &LabeledDataset, methods: &[NnConfig]) -> Result<Vec<ExperimentRecord>> {
    if methods.is_empty() {
        return Err(Error::invalid("no methods given"));
    }
    methods
        .par_iter()
        .map(|cfg| {
            cfg.validate()?;
            let started = Instant::now();
            let acc = accuracy(train, test, cfg)?;
            ExperimentRecord::new(
                &train.name,
                method_name(cfg),
                "accuracy",
                acc,
                None,
                cfg.seed,
                started.elapsed().as_secs_f64() * 1e3,
            )
        })
        .collect()
}
