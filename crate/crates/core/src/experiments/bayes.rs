//! Bayesian sign test with a region of practical equivalence (rope).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::error::{Error, Result};

/// Posterior probabilities that the left method is better, that both are
/// practically equivalent, and that the right method is better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesResult {
    pub p_left: f64,
    pub p_rope: f64,
    pub p_right: f64,
}

/// Counts `d < -rope`, `|d| <= rope` and `d > rope`, places the posterior
/// `Dirichlet(n_left, n_rope + prior_strength, n_right)` on the three
/// probabilities, and estimates by Monte Carlo how often each component is
/// the largest. A zero parameter is a point mass at 0. Ties go to the rope.
pub fn bayes_sign_test(
    diffs: &[f64],
    rope: f64,
    prior_strength: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<BayesResult> {
    if diffs.is_empty() {
        return Err(Error::invalid("no differences given"));
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("differences must be finite"));
    }
    if !(rope >= 0.0 && rope.is_finite()) {
        return Err(Error::invalid(format!("rope must be >= 0, got {rope}")));
    }
    if !(prior_strength >= 0.0 && prior_strength.is_finite()) {
        return Err(Error::invalid(format!("prior strength must be >= 0, got {prior_strength}")));
    }
    if mc_samples == 0 {
        return Err(Error::invalid("mc_samples must be >= 1"));
    }
    let n_left = diffs.iter().filter(|&&d| d < -rope).count();
    let n_right = diffs.iter().filter(|&&d| d > rope).count();
    let n_rope = diffs.len() - n_left - n_right;
    let alphas = [n_left as f64, n_rope as f64 + prior_strength, n_right as f64];
    let gammas: Vec<Option<Gamma<f64>>> = alphas
        .iter()
        .map(|&a| (a > 0.0).then(|| Gamma::new(a, 1.0).expect("positive shape")))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = [0usize; 3];
    for _ in 0..mc_samples {
        let mut g = [0.0; 3];
        for (k, dist) in gammas.iter().enumerate() {
            if let Some(d) = dist {
                g[k] = d.sample(&mut rng);
            }
        }
        // normalization does not change the argmax
        let winner = if g[1] >= g[0] && g[1] >= g[2] {
            1
        } else if g[0] >= g[2] {
            0
        } else {
            2
        };
        wins[winner] += 1;
    }
    let n = mc_samples as f64;
    Ok(BayesResult {
        p_left: wins[0] as f64 / n,
        p_rope: wins[1] as f64 / n,
        p_right: wins[2] as f64 / n,
    })
}
