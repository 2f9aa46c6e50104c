//! 1-nearest-neighbor classification with plug-in distances, the pruned
//! search used by the `opt-*` variants, and stratified k-fold
//! cross-validation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distances::{self, dtw_sq_kernel, lb_improved_second_sq, lb_keogh_sq, BandConfig, Envelope};
use crate::error::{Error, Result};
use crate::series::{align_truncate_or_repeat, condense_values, resample_linear, Equality, LabeledDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DistanceKind {
    #[serde(rename = "euc")]
    Euclidean,
    #[serde(rename = "dtw")]
    Dtw,
    #[serde(rename = "twi")]
    Twi,
    #[serde(rename = "opt-dtw")]
    OptDtw,
    #[serde(rename = "opt-twi")]
    OptTwi,
}

impl DistanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            DistanceKind::Euclidean => "euc",
            DistanceKind::Dtw => "dtw",
            DistanceKind::Twi => "twi",
            DistanceKind::OptDtw => "opt-dtw",
            DistanceKind::OptTwi => "opt-twi",
        }
    }

    pub fn is_optimized(&self) -> bool {
        matches!(self, DistanceKind::OptDtw | DistanceKind::OptTwi)
    }

    fn condenses(&self) -> bool {
        matches!(self, DistanceKind::Twi | DistanceKind::OptTwi)
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euc" | "euclidean" => Ok(DistanceKind::Euclidean),
            "dtw" => Ok(DistanceKind::Dtw),
            "twi" => Ok(DistanceKind::Twi),
            "opt-dtw" => Ok(DistanceKind::OptDtw),
            "opt-twi" => Ok(DistanceKind::OptTwi),
            _ => Err(Error::invalid(format!("unknown distance {s:?}"))),
        }
    }
}

/// How a candidate is brought to the query's length when a distance or a
/// lower bound needs equal lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alignment {
    #[default]
    TruncateOrRepeat,
    LinearResample,
}

impl Alignment {
    pub fn align(&self, x: &[f64], target_len: usize) -> Result<Vec<f64>> {
        if x.len() == target_len {
            return Ok(x.to_vec());
        }
        match self {
            Alignment::TruncateOrRepeat => align_truncate_or_repeat(x, target_len),
            Alignment::LinearResample if x.len() >= 2 && target_len >= 2 => resample_linear(x, target_len),
            // a single point or a single target sample has only one sensible alignment
            Alignment::LinearResample => align_truncate_or_repeat(x, target_len),
        }
    }
}

/// Lower-bound policy for `opt-twi`, whose condensed forms usually differ
/// in length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LbMode {
    /// Lower bounds only when the condensed lengths already match; otherwise
    /// only early abandoning. Always returns the exhaustive neighbor.
    #[default]
    Safe,
    /// Resample the condensed candidate to the condensed query's length and
    /// prune on its lower bounds. Faster, but a pruned candidate is not
    /// re-checked, so the neighbor can differ from the exhaustive one.
    Heuristic,
}

/// Order of condensation and length alignment for `opt-twi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TwiOrder {
    #[default]
    CondenseThenAlign,
    AlignThenCondense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnConfig {
    pub distance: DistanceKind,
    pub band: Option<BandConfig>,
    pub alignment: Alignment,
    pub lb_mode: LbMode,
    pub twi_order: TwiOrder,
    pub equality: Equality,
    pub seed: u64,
}

impl NnConfig {
    /// Defaults: band radius 0.1 for the `opt-*` variants, no band otherwise.
    pub fn new(distance: DistanceKind) -> Self {
        NnConfig {
            distance,
            band: distance.is_optimized().then_some(BandConfig::Fraction(0.1)),
            alignment: Alignment::default(),
            lb_mode: LbMode::default(),
            twi_order: TwiOrder::default(),
            equality: Equality::Exact,
            seed: 0,
        }
    }

    pub fn with_band(mut self, band: Option<BandConfig>) -> Self {
        self.band = band;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.distance.is_optimized() && self.band.is_none() {
            return Err(Error::invalid(format!("{} requires a band", self.distance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub label: String,
    pub neighbor_index: usize,
    pub distance_value: f64,
    /// Candidates eliminated by a lower bound or by early abandoning.
    pub pruned_count: usize,
}

/// A training set prepared for repeated queries under one configuration.
#[derive(Debug, Clone)]
pub struct NnClassifier<'a> {
    train: &'a LabeledDataset,
    cfg: NnConfig,
    // condensed training series for twi / opt-twi (condense-then-align)
    condensed: Option<Vec<Vec<f64>>>,
}

impl<'a> NnClassifier<'a> {
    pub fn new(train: &'a LabeledDataset, cfg: NnConfig) -> Result<Self> {
        cfg.validate()?;
        if train.is_empty() {
            return Err(Error::invalid("training set is empty"));
        }
        let condensed = (cfg.distance.condenses()
            && !(cfg.distance == DistanceKind::OptTwi && cfg.twi_order == TwiOrder::AlignThenCondense))
            .then(|| {
                train
                    .iter()
                    .map(|(s, _)| condense_values(s, cfg.equality))
                    .collect()
            });
        Ok(NnClassifier { train, cfg, condensed })
    }

    pub fn config(&self) -> &NnConfig {
        &self.cfg
    }

    pub fn classify(&self, query: &[f64]) -> Result<Prediction> {
        if query.is_empty() {
            return Err(Error::invalid("query is empty"));
        }
        let (best, best_sq, pruned) = match self.cfg.distance {
            DistanceKind::Euclidean => self.scan_euclidean(query)?,
            DistanceKind::Dtw => self.scan_dtw(query, None)?,
            DistanceKind::Twi => {
                let q = condense_values(query, self.cfg.equality);
                self.scan_dtw(&q, Some(self.condensed.as_deref().expect("prepared")))?
            }
            DistanceKind::OptDtw => self.scan_opt_dtw(query)?,
            DistanceKind::OptTwi => self.scan_opt_twi(query)?,
        };
        Ok(Prediction {
            label: self.train.label(best).to_owned(),
            neighbor_index: best,
            distance_value: best_sq.sqrt(),
            pruned_count: pruned,
        })
    }

    /// Classifies every query in parallel; output order follows input order.
    pub fn classify_all<S: AsRef<[f64]> + Sync>(&self, queries: &[S]) -> Result<Vec<Prediction>> {
        queries.par_iter().map(|q| self.classify(q.as_ref())).collect()
    }

    fn scan_euclidean(&self, q: &[f64]) -> Result<(usize, f64, usize)> {
        let mut best = (0, f64::INFINITY);
        for (k, (c, _)) in self.train.iter().enumerate() {
            let d = if c.len() == q.len() {
                distances::squared_euclidean(q, c)?
            } else {
                distances::squared_euclidean(q, &self.cfg.alignment.align(c, q.len())?)?
            };
            if d < best.1 {
                best = (k, d);
            }
        }
        Ok((best.0, best.1, 0))
    }

    /// Exact scan with early abandoning against the best-so-far.
    fn scan_dtw(&self, q: &[f64], condensed: Option<&[Vec<f64>]>) -> Result<(usize, f64, usize)> {
        let mut best = (0, f64::INFINITY);
        let mut pruned = 0;
        for k in 0..self.train.len() {
            let c: &[f64] = match condensed {
                Some(cs) => &cs[k],
                None => self.train.series(k),
            };
            let r = self.cfg.band.map(|b| b.radius(q.len(), c.len()));
            match dtw_sq_kernel(q, c, r, best.1) {
                Some(d) if d < best.1 => best = (k, d),
                Some(_) => {}
                None => pruned += 1,
            }
        }
        Ok((best.0, best.1, pruned))
    }

    fn scan_opt_dtw(&self, q: &[f64]) -> Result<(usize, f64, usize)> {
        let band = self.cfg.band.expect("validated");
        let r = band.radius(q.len(), q.len());
        let mut best = (0, f64::INFINITY);
        let mut pruned = 0;
        for (k, (c, _)) in self.train.iter().enumerate() {
            let c = self.cfg.alignment.align(c, q.len())?;
            match cascade(q, &c, &c, r, best.1) {
                Some(d) if d < best.1 => best = (k, d),
                Some(_) => {}
                None => pruned += 1,
            }
        }
        Ok((best.0, best.1, pruned))
    }

    fn scan_opt_twi(&self, query: &[f64]) -> Result<(usize, f64, usize)> {
        let band = self.cfg.band.expect("validated");
        let eq = self.cfg.equality;
        let q = condense_values(query, eq);
        let mut best = (0, f64::INFINITY);
        let mut pruned = 0;
        for k in 0..self.train.len() {
            let owned;
            let c: &[f64] = match &self.condensed {
                Some(cs) => &cs[k],
                None => {
                    let aligned = self.cfg.alignment.align(self.train.series(k), query.len())?;
                    owned = condense_values(&aligned, eq);
                    &owned
                }
            };
            let outcome = if c.len() == q.len() {
                let r = band.radius(q.len(), q.len());
                cascade(&q, c, c, r, best.1)
            } else if self.cfg.lb_mode == LbMode::Heuristic && c.len() >= 2 && q.len() >= 2 {
                let r_lb = band.radius(q.len(), q.len());
                let resampled = resample_linear(c, q.len())?;
                let r = band.radius(q.len(), c.len());
                cascade_mixed(&q, &resampled, c, r_lb, r, best.1)
            } else {
                dtw_sq_kernel(&q, c, Some(band.radius(q.len(), c.len())), best.1)
            };
            match outcome {
                Some(d) if d < best.1 => best = (k, d),
                Some(_) => {}
                None => pruned += 1,
            }
        }
        Ok((best.0, best.1, pruned))
    }
}

/// LB_Keogh, then LB_Improved, then early-abandoned banded dtw, all in
/// squared space. `None` means the candidate cannot beat `best_sq`.
fn cascade(q: &[f64], lb_target: &[f64], c: &[f64], r: usize, best_sq: f64) -> Option<f64> {
    cascade_mixed(q, lb_target, c, r, r, best_sq)
}

fn cascade_mixed(
    q: &[f64],
    lb_target: &[f64],
    c: &[f64],
    lb_radius: usize,
    radius: usize,
    best_sq: f64,
) -> Option<f64> {
    if best_sq.is_finite() {
        let env = Envelope::new(lb_target, lb_radius);
        let first = lb_keogh_sq(q, &env);
        if first > best_sq {
            return None;
        }
        if first + lb_improved_second_sq(lb_target, q, &env, lb_radius) > best_sq {
            return None;
        }
    }
    dtw_sq_kernel(q, c, Some(radius), best_sq)
}

pub fn classify_1nn(train: &LabeledDataset, query: &[f64], cfg: &NnConfig) -> Result<Prediction> {
    NnClassifier::new(train, cfg.clone())?.classify(query)
}

/// Fraction of mismatching labels.
pub fn error_rate<P: AsRef<str>, T: AsRef<str>>(predicted: &[P], truth: &[T]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::invalid("no predictions"));
    }
    let wrong = predicted
        .iter()
        .zip(truth)
        .filter(|(p, t)| p.as_ref() != t.as_ref())
        .count();
    Ok(wrong as f64 / predicted.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvOutcome {
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub stratified: bool,
}

/// Fold index for every item. Each class is shuffled with the seed and dealt
/// round-robin, continuing across classes in label order. Falls back to an
/// unstratified shuffle when some class has fewer than `folds` members.
pub fn fold_assignment(data: &LabeledDataset, folds: usize, seed: u64) -> Result<(Vec<usize>, bool)> {
    if folds < 2 {
        return Err(Error::invalid("cross-validation needs at least 2 folds"));
    }
    if folds > data.len() {
        return Err(Error::invalid(format!(
            "{folds} folds for a dataset of {} series",
            data.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, (_, label)) in data.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    let stratified = by_class.values().all(|v| v.len() >= folds);
    let groups: Vec<Vec<usize>> = if stratified {
        by_class.into_values().collect()
    } else {
        log::warn!(
            "{}: some class has fewer than {folds} members, using unstratified folds",
            data.name
        );
        vec![(0..data.len()).collect()]
    };
    let mut fold_of = vec![0; data.len()];
    let mut next = 0;
    for mut group in groups {
        group.shuffle(&mut rng);
        for i in group {
            fold_of[i] = next % folds;
            next += 1;
        }
    }
    Ok((fold_of, stratified))
}

/// k-fold cross-validated 1-NN accuracy. Folds are evaluated in parallel.
pub fn cross_validate(data: &LabeledDataset, folds: usize, cfg: &NnConfig) -> Result<CvOutcome> {
    cfg.validate()?;
    let (fold_of, stratified) = fold_assignment(data, folds, cfg.seed)?;
    let fold_accuracies = (0..folds)
        .into_par_iter()
        .map(|f| {
            let train_idx: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] != f).collect();
            let test_idx: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] == f).collect();
            let train = data.subset(&train_idx)?;
            let clf = NnClassifier::new(&train, cfg.clone())?;
            let mut correct = 0;
            for &i in &test_idx {
                if clf.classify(data.series(i))?.label == data.label(i) {
                    correct += 1;
                }
            }
            Ok(correct as f64 / test_idx.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / folds as f64;
    Ok(CvOutcome {
        fold_accuracies,
        mean_accuracy,
        stratified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TimeSeries;

    fn dataset(items: &[(&[f64], &str)]) -> LabeledDataset {
        LabeledDataset::new(
            "toy",
            items
                .iter()
                .map(|(v, l)| (TimeSeries::new(v.to_vec()).unwrap(), l.to_string()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parses_distance_names() {
        for k in [
            DistanceKind::Euclidean,
            DistanceKind::Dtw,
            DistanceKind::Twi,
            DistanceKind::OptDtw,
            DistanceKind::OptTwi,
        ] {
            assert_eq!(k.name().parse::<DistanceKind>().unwrap(), k);
        }
        assert!("manhattan".parse::<DistanceKind>().is_err());
    }

    #[test]
    fn opt_variants_need_a_band() {
        let cfg = NnConfig::new(DistanceKind::OptDtw).with_band(None);
        let train = dataset(&[(&[1.0], "a")]);
        assert!(classify_1nn(&train, &[1.0], &cfg).is_err());
    }

    #[test]
    fn single_item_and_example_2_1() {
        let one = dataset(&[(&[5.0, 1.0], "only")]);
        let p = classify_1nn(&one, &[0.0, 0.0, 3.0], &NnConfig::new(DistanceKind::Dtw)).unwrap();
        assert_eq!((p.label.as_str(), p.neighbor_index), ("only", 0));

        let train = dataset(&[(&[0.0, 1.0], "A"), (&[0.0, 2.0], "B")]);
        for kind in [DistanceKind::Twi, DistanceKind::Dtw, DistanceKind::OptTwi, DistanceKind::OptDtw] {
            let p = classify_1nn(&train, &[0.0, 1.0, 1.0], &NnConfig::new(kind)).unwrap();
            assert_eq!(p.label, "A", "{kind}");
            assert_eq!(p.distance_value, 0.0, "{kind}");
        }
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let train = dataset(&[(&[1.0, 1.0], "first"), (&[1.0], "second"), (&[1.0, 1.0, 1.0], "third")]);
        for kind in [DistanceKind::Dtw, DistanceKind::Twi, DistanceKind::Euclidean, DistanceKind::OptDtw] {
            let p = classify_1nn(&train, &[1.0, 1.0], &NnConfig::new(kind)).unwrap();
            assert_eq!(p.neighbor_index, 0, "{kind}");
        }
    }

    #[test]
    fn error_rate_examples() {
        assert_eq!(error_rate(&["a", "b"], &["a", "b"]).unwrap(), 0.0);
        assert_eq!(error_rate(&["a", "b"], &["b", "a"]).unwrap(), 1.0);
        assert_eq!(error_rate(&["a", "b", "c", "d"], &["a", "b", "c", "x"]).unwrap(), 0.25);
        assert!(error_rate(&["a"], &["a", "b"]).is_err());
        assert!(error_rate::<&str, &str>(&[], &[]).is_err());
    }

    #[test]
    fn cross_validation_examples() {
        let mut items: Vec<(Vec<f64>, &str)> = Vec::new();
        for i in 0..10 {
            items.push((vec![0.0 + i as f64 * 1e-3; 4], "low"));
            items.push((vec![10.0 + i as f64 * 1e-3; 4], "high"));
        }
        let refs: Vec<(&[f64], &str)> = items.iter().map(|(v, l)| (v.as_slice(), *l)).collect();
        let data = dataset(&refs);
        let cfg = NnConfig::new(DistanceKind::Dtw).with_seed(42);
        let out = cross_validate(&data, 5, &cfg).unwrap();
        assert_eq!(out.mean_accuracy, 1.0);
        assert!(out.stratified);
        assert_eq!(out, cross_validate(&data, 5, &cfg).unwrap());
        assert_eq!(
            fold_assignment(&data, 5, 42).unwrap(),
            fold_assignment(&data, 5, 42).unwrap()
        );

        let single = dataset(&[(&[1.0], "a"), (&[2.0], "a"), (&[3.0], "a")]);
        assert_eq!(cross_validate(&single, 3, &cfg).unwrap().mean_accuracy, 1.0);
        assert!(cross_validate(&single, 4, &cfg).is_err());
        assert!(cross_validate(&single, 1, &cfg).is_err());
    }

    #[test]
    fn unstratified_fallback() {
        let data = dataset(&[(&[1.0], "a"), (&[2.0], "a"), (&[3.0], "a"), (&[9.0], "b")]);
        let (folds, stratified) = fold_assignment(&data, 2, 1).unwrap();
        assert!(!stratified);
        assert_eq!(folds.iter().filter(|&&f| f == 0).count(), 2);
    }

    #[test]
    fn stratified_folds_are_balanced() {
        let mut items: Vec<(Vec<f64>, String)> = Vec::new();
        for i in 0..30 {
            items.push((vec![i as f64], if i % 3 == 0 { "x" } else { "y" }.to_string()));
        }
        let refs: Vec<(&[f64], &str)> = items.iter().map(|(v, l)| (v.as_slice(), l.as_str())).collect();
        let data = dataset(&refs);
        let (fold_of, stratified) = fold_assignment(&data, 10, 3).unwrap();
        assert!(stratified);
        for f in 0..10 {
            let xs = (0..30).filter(|&i| fold_of[i] == f && data.label(i) == "x").count();
            assert_eq!(xs, 1);
        }
    }
}
