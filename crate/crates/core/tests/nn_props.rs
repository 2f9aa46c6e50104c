use proptest::prelude::*;
use twi::distances::{dtw_banded, dtw_distance, twi, BandConfig};
use twi::nn::{cross_validate, DistanceKind, LbMode, NnClassifier, NnConfig};
use twi::words::expand;
use twi::{LabeledDataset, TimeSeries};

fn dataset(series: Vec<Vec<f64>>) -> LabeledDataset {
    let items = series
        .into_iter()
        .enumerate()
        .map(|(k, v)| (TimeSeries::new(v).unwrap(), format!("c{}", k % 3)))
        .collect();
    LabeledDataset::new("rand", items).unwrap()
}

/// First index attaining the minimum.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    best
}

fn step_series(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0i32..4, len).prop_map(|v| v.into_iter().map(f64::from).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pruned_search_matches_exhaustive(
        train in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 16), 2..12),
        query in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let data = dataset(train.clone());
        let band = BandConfig::Fraction(0.1);
        let exhaustive: Vec<f64> = train.iter().map(|c| dtw_banded(&query, c, band).unwrap()).collect();
        let opt = NnClassifier::new(&data, NnConfig::new(DistanceKind::OptDtw)).unwrap().classify(&query).unwrap();
        prop_assert_eq!(opt.neighbor_index, argmin(&exhaustive));
        prop_assert!((opt.distance_value - exhaustive[opt.neighbor_index]).abs() < 1e-9);

        let full: Vec<f64> = train.iter().map(|c| dtw_distance(&query, c).unwrap()).collect();
        let plain = NnClassifier::new(&data, NnConfig::new(DistanceKind::Dtw)).unwrap().classify(&query).unwrap();
        prop_assert_eq!(plain.neighbor_index, argmin(&full));
    }

    #[test]
    fn safe_opt_twi_matches_banded_twi(
        train in prop::collection::vec(step_series(6..=14), 2..10),
        query in step_series(6..=14),
    ) {
        let data = dataset(train.clone());
        let cfg = NnConfig::new(DistanceKind::OptTwi);
        let pred = NnClassifier::new(&data, cfg).unwrap().classify(&query).unwrap();
        let q = twi::words::condense(&query);
        let exhaustive: Vec<f64> = train
            .iter()
            .map(|c| dtw_banded(&q, &twi::words::condense(c), BandConfig::Fraction(0.1)).unwrap())
            .collect();
        prop_assert_eq!(pred.neighbor_index, argmin(&exhaustive));
    }

    #[test]
    fn heuristic_opt_twi_returns_a_training_distance(
        train in prop::collection::vec(step_series(6..=14), 2..10),
        query in step_series(6..=14),
    ) {
        let data = dataset(train.clone());
        let mut cfg = NnConfig::new(DistanceKind::OptTwi);
        cfg.lb_mode = LbMode::Heuristic;
        let pred = NnClassifier::new(&data, cfg).unwrap().classify(&query).unwrap();
        let q = twi::words::condense(&query);
        let c = twi::words::condense(&train[pred.neighbor_index]);
        let d = dtw_banded(&q, &c, BandConfig::Fraction(0.1)).unwrap();
        prop_assert!((pred.distance_value - d).abs() < 1e-9);
    }

    #[test]
    fn expanding_a_prototype_shrinks_its_cell(
        x in step_series(2..=6),
        y in step_series(2..=6),
        alpha in prop::collection::vec(1usize..=4, 6),
        probes in prop::collection::vec(step_series(1..=8), 1..20),
    ) {
        let xe = expand(&x, &alpha[..x.len()]).unwrap();
        let original = dataset(vec![x.clone(), y.clone()]);
        let expanded = dataset(vec![xe.clone(), y.clone()]);
        let dtw_cfg = NnConfig::new(DistanceKind::Dtw);
        let twi_cfg = NnConfig::new(DistanceKind::Twi);
        let d = NnClassifier::new(&original, dtw_cfg.clone()).unwrap();
        let d2 = NnClassifier::new(&expanded, dtw_cfg).unwrap();
        let t = NnClassifier::new(&original, twi_cfg.clone()).unwrap();
        let t2 = NnClassifier::new(&expanded, twi_cfg).unwrap();
        for p in &probes {
            if d2.classify(p).unwrap().neighbor_index == 0 {
                prop_assert_eq!(d.classify(p).unwrap().neighbor_index, 0);
            }
            prop_assert_eq!(t.classify(p).unwrap().neighbor_index, t2.classify(p).unwrap().neighbor_index);
            prop_assert_eq!(twi(p, &x).unwrap(), twi(p, &xe).unwrap());
        }
    }
}

#[test]
fn parallel_matches_sequential() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let train: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..rng.random_range(10..30)).map(|_| rng.random_range(0..5) as f64).collect())
        .collect();
    let queries: Vec<Vec<f64>> = (0..60)
        .map(|_| (0..rng.random_range(10..30)).map(|_| rng.random_range(0..5) as f64).collect())
        .collect();
    let data = dataset(train);
    for kind in [
        DistanceKind::Euclidean,
        DistanceKind::Dtw,
        DistanceKind::Twi,
        DistanceKind::OptDtw,
        DistanceKind::OptTwi,
    ] {
        let clf = NnClassifier::new(&data, NnConfig::new(kind)).unwrap();
        let par = clf.classify_all(&queries).unwrap();
        let seq: Vec<_> = queries.iter().map(|q| clf.classify(q).unwrap()).collect();
        assert_eq!(par, seq, "{kind}");
    }
}

#[test]
fn cross_validation_is_deterministic() {
    let series: Vec<Vec<f64>> = (0..30).map(|k| (0..12).map(|i| ((i * (k % 3 + 1)) % 5) as f64).collect()).collect();
    let data = dataset(series);
    let cfg = NnConfig::new(DistanceKind::Dtw).with_seed(4);
    let a = cross_validate(&data, 5, &cfg).unwrap();
    assert_eq!(a, cross_validate(&data, 5, &cfg).unwrap());
    assert!(a.stratified);
    assert_eq!(a.fold_accuracies.len(), 5);
}
