use proptest::prelude::*;
use twi::distances::dtw_distance;
use twi::warping::{
    compose, cost_along, enumerate_paths, enumerate_walks, pullback_equalizer, walk_to_path, GridWalk,
    WarpingFunction,
};

fn series(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4i32..=4, 1..=max_len).prop_map(|v| v.into_iter().map(f64::from).collect())
}

/// A warping function onto `[n]` with random run lengths in `1..=3`.
fn warping_onto(n: usize) -> impl Strategy<Value = WarpingFunction> {
    prop::collection::vec(1usize..=3, n).prop_map(|m| WarpingFunction::from_multiplicities(&m).unwrap())
}

fn is_warping_function(f: &WarpingFunction) -> bool {
    WarpingFunction::new(f.map().to_vec(), f.codomain_len()).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn brute_force_paths_match_dp(x in series(6), y in series(6)) {
        let best = enumerate_paths(x.len(), y.len())
            .map(|p| cost_along(&p, &x, &y).unwrap())
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        prop_assert!((best - dtw_distance(&x, &y).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn walks_do_not_beat_paths(x in series(4), y in series(4)) {
        let (m, n) = (x.len(), y.len());
        let over_paths = enumerate_paths(m, n)
            .map(|p| cost_along(&p, &x, &y).unwrap())
            .fold(f64::INFINITY, f64::min);
        let mut over_walks = f64::INFINITY;
        for w in enumerate_walks(m, n, m + n) {
            let c = cost_along(&w, &x, &y).unwrap();
            // condensing a walk never raises its cost
            prop_assert!(cost_along(&walk_to_path(&w), &x, &y).unwrap() <= c + 1e-12);
            over_walks = over_walks.min(c);
        }
        prop_assert!((over_walks - over_paths).abs() < 1e-12);
    }

    #[test]
    fn pullback_equalizes(
        (phi, phi_prime) in (1usize..=6).prop_flat_map(|n| (warping_onto(n), warping_onto(n)))
    ) {
        let (theta, theta_prime) = pullback_equalizer(&phi, &phi_prime).unwrap();
        prop_assert!(is_warping_function(&theta));
        prop_assert!(is_warping_function(&theta_prime));
        prop_assert_eq!(theta.domain_len(), theta_prime.domain_len());
        prop_assert_eq!(theta.codomain_len(), phi.domain_len());
        prop_assert_eq!(theta_prime.codomain_len(), phi_prime.domain_len());
        prop_assert!(theta.domain_len() >= phi.domain_len().max(phi_prime.domain_len()));
        let left = compose(&phi, &theta).unwrap();
        let right = compose(&phi_prime, &theta_prime).unwrap();
        prop_assert_eq!(left.map(), right.map());
    }

    #[test]
    fn warping_acts_contravariantly(
        (phi, theta, x) in (1usize..=5)
            .prop_flat_map(|n| (warping_onto(n), Just(n)))
            .prop_flat_map(|(phi, n)| {
                let l = phi.domain_len();
                (Just(phi), warping_onto(l), prop::collection::vec(-5.0f64..5.0, n))
            })
    ) {
        // phi: [l] -> [n], theta: [k] -> [l]
        let composed = compose(&phi, &theta).unwrap();
        prop_assert!(is_warping_function(&composed));
        let direct = composed.apply(&x).unwrap();
        let stepwise = theta.apply(&phi.apply(&x).unwrap()).unwrap();
        prop_assert_eq!(direct, stepwise);
    }
}

#[test]
fn path_counts() {
    // central Delannoy numbers for square grids
    for (n, d) in [(1, 1), (2, 3), (3, 13), (4, 63), (5, 321), (6, 1683)] {
        assert_eq!(enumerate_paths(n, n).count(), d, "n = {n}");
    }
    assert_eq!(enumerate_paths(2, 3).count(), 5);
    for p in enumerate_paths(3, 4) {
        assert!(p.len() >= 4 && p.len() <= 6);
    }
}

#[test]
fn walk_of_a_path_is_itself() {
    for p in enumerate_paths(3, 3) {
        let w = twi::warping::WarpingWalk::from(p.clone());
        assert_eq!(walk_to_path(&w), p);
    }
}
