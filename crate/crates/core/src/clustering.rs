//! Fréchet functions, DBA sample means, k-means under dtw and twi, and the
//! cohesion/separation measures of a clustering.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distances::{dtw, dtw_sq_kernel};
use crate::error::{Error, Result};
use crate::series::{condense_values, resample_linear, Equality};
use crate::warping::GridWalk;

fn dtw_sq(x: &[f64], y: &[f64]) -> f64 {
    dtw_sq_kernel(x, y, None, f64::INFINITY).expect("no abandoning threshold")
}

fn check_sample<S: AsRef<[f64]>>(sample: &[S]) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::invalid("sample is empty"));
    }
    if sample.iter().any(|s| s.as_ref().is_empty()) {
        return Err(Error::invalid("sample contains an empty series"));
    }
    Ok(())
}

/// `F(z) = sum_i dtw(x_i, z)^2`.
pub fn frechet<S: AsRef<[f64]>>(sample: &[S], z: &[f64]) -> Result<f64> {
    check_sample(sample)?;
    if z.is_empty() {
        return Err(Error::invalid("candidate mean is empty"));
    }
    Ok(sample.iter().map(|x| dtw_sq(x.as_ref(), z)).sum())
}

/// Brings `x` to length `len` for use as a starting mean.
fn fit_length(x: &[f64], len: usize) -> Vec<f64> {
    if x.len() == len {
        x.to_vec()
    } else if len == 1 {
        vec![x.iter().sum::<f64>() / x.len() as f64]
    } else if x.len() == 1 {
        vec![x[0]; len]
    } else {
        resample_linear(x, len).expect("lengths checked")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DbaOutcome {
    pub mean: Vec<f64>,
    /// Fréchet value of the initial mean, then after every accepted update.
    pub trace: Vec<f64>,
}

impl DbaOutcome {
    pub fn objective(&self) -> f64 {
        *self.trace.last().expect("trace holds the initial value")
    }
}

/// One majorize-minimize step: the Fréchet value of `mean` and the mean
/// obtained by averaging every sample value aligned to each coordinate.
fn dba_step<S: AsRef<[f64]>>(sample: &[S], mean: &[f64]) -> (f64, Vec<f64>) {
    let mut sums = vec![0.0; mean.len()];
    let mut counts = vec![0usize; mean.len()];
    let mut f = 0.0;
    for x in sample {
        let x = x.as_ref();
        let res = dtw(mean, x, true).expect("non-empty inputs");
        f += res.distance * res.distance;
        for p in res.path.expect("path requested").points() {
            sums[p.i] += x[p.j];
            counts[p.i] += 1;
        }
    }
    let next = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    (f, next)
}

/// DTW barycenter averaging with a seeded random starting member.
///
/// Stops when the Fréchet value improves by less than `1e-9` or after
/// `max_iter` updates. The returned trace is non-increasing.
pub fn dba_mean<S: AsRef<[f64]>>(sample: &[S], len: usize, max_iter: usize, seed: u64) -> Result<DbaOutcome> {
    check_sample(sample)?;
    if len == 0 {
        return Err(Error::invalid("mean length must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = sample[rng.random_range(0..sample.len())].as_ref();
    dba_from(sample, fit_length(start, len), max_iter)
}

/// DBA from an explicit starting mean.
pub fn dba_from<S: AsRef<[f64]>>(sample: &[S], init: Vec<f64>, max_iter: usize) -> Result<DbaOutcome> {
    check_sample(sample)?;
    if init.is_empty() {
        return Err(Error::invalid("initial mean is empty"));
    }
    let mut mean = init;
    let (mut f, mut next) = dba_step(sample, &mean);
    let mut trace = vec![f];
    for _ in 0..max_iter {
        let (f_next, after) = dba_step(sample, &next);
        if f_next > f {
            // rounding only; the update cannot increase F
            break;
        }
        mean = next;
        trace.push(f_next);
        let converged = f - f_next < 1e-9;
        f = f_next;
        next = after;
        if converged {
            break;
        }
    }
    Ok(DbaOutcome { mean, trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClusterDistance {
    Dtw,
    Twi,
}

/// Length of the DBA mean computed for each cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanLength {
    /// Median member length (condensed lengths under twi), lower median on ties.
    #[default]
    Median,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub distance: ClusterDistance,
    pub mean_length: MeanLength,
    pub max_iter: usize,
    pub dba_iter: usize,
    pub seed: u64,
    /// Starting centroids; `None` draws `k` distinct data points with the seed.
    pub initial: Option<Vec<Vec<f64>>>,
}

impl KMeansConfig {
    pub fn new(k: usize, distance: ClusterDistance) -> Self {
        KMeansConfig {
            k,
            distance,
            mean_length: MeanLength::Median,
            max_iter: 50,
            dba_iter: 30,
            seed: 0,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clustering {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// `J = sum_x d(x, centroid(x))^2` under the configured distance.
    pub objective: f64,
    /// `J` after the initial assignment and after every iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Nearest centroid for each point, ties to the lowest centroid index.
/// Returns assignments and the squared distance to the assigned centroid.
fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    points
        .par_iter()
        .map(|x| {
            let mut best = (0, f64::INFINITY);
            for (c, mu) in centroids.iter().enumerate() {
                let d = dtw_sq(x, mu);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

/// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty(
    points: &[Vec<f64>],
    assignments: &mut [usize],
    dists: &mut [f64],
    centroids: &mut [Vec<f64>],
) {
    let k = centroids.len();
    loop {
        let mut sizes = vec![0usize; k];
        for &a in assignments.iter() {
            sizes[a] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let donor = (0..points.len())
            .filter(|&i| sizes[assignments[i]] > 1)
            .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
            .expect("k <= number of points leaves a cluster with two members");
        assignments[donor] = empty;
        dists[donor] = 0.0;
        centroids[empty] = points[donor].clone();
    }
}

fn median_len(members: &[&Vec<f64>]) -> usize {
    let mut lens: Vec<usize> = members.iter().map(|m| m.len()).collect();
    lens.sort_unstable();
    lens[(lens.len() - 1) / 2]
}

/// k-means with DBA centroids.
///
/// Each update runs DBA from the current centroid, fitted to the target
/// length, and keeps the current centroid if the result is worse for its
/// members. Under dtw, `J` is therefore non-increasing across iterations.
///
/// Under twi all points and centroids live in condensed form, so the
/// assignment step uses dtw between condensed forms and every updated
/// centroid is condensed again.
pub fn kmeans<S: AsRef<[f64]>>(data: &[S], cfg: &KMeansConfig) -> Result<Clustering> {
    check_sample(data)?;
    let k = cfg.k;
    if k == 0 || k > data.len() {
        return Err(Error::invalid(format!("k = {k} for {} series", data.len())));
    }
    let prepare = |x: &[f64]| match cfg.distance {
        ClusterDistance::Dtw => x.to_vec(),
        ClusterDistance::Twi => condense_values(x, Equality::Exact),
    };
    let points: Vec<Vec<f64>> = data.iter().map(|x| prepare(x.as_ref())).collect();

    let mut centroids: Vec<Vec<f64>> = match &cfg.initial {
        Some(init) => {
            if init.len() != k || init.iter().any(|c| c.is_empty()) {
                return Err(Error::invalid("initial centroids must be k non-empty series"));
            }
            init.iter().map(|c| prepare(c)).collect()
        }
        None => {
            let mut idx: Vec<usize> = (0..points.len()).collect();
            idx.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
            idx[..k].iter().map(|&i| points[i].clone()).collect()
        }
    };

    let (mut assignments, mut dists) = assign(&points, &centroids);
    repair_empty(&points, &mut assignments, &mut dists, &mut centroids);
    let mut iterations = 0;
    let mut converged = false;
    let mut trace = vec![dists.iter().sum::<f64>()];
    while iterations < cfg.max_iter {
        iterations += 1;
        centroids = (0..k)
            .into_par_iter()
            .map(|c| {
                let members: Vec<&Vec<f64>> = points
                    .iter()
                    .zip(&assignments)
                    .filter(|(_, &a)| a == c)
                    .map(|(p, _)| p)
                    .collect();
                let len = match cfg.mean_length {
                    MeanLength::Median => median_len(&members),
                    MeanLength::Fixed(l) => l,
                };
                let old = &centroids[c];
                let mean = prepare(&dba_from(&members, fit_length(old, len), cfg.dba_iter)?.mean);
                // keep the old centroid when a length change made things worse
                if frechet(&members, &mean)? > frechet(&members, old)? {
                    Ok(old.clone())
                } else {
                    Ok(mean)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let (mut next, mut next_dists) = assign(&points, &centroids);
        repair_empty(&points, &mut next, &mut next_dists, &mut centroids);
        dists = next_dists;
        trace.push(dists.iter().sum());
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
    }
    Ok(Clustering {
        k,
        assignments,
        centroids,
        objective: *trace.last().expect("trace holds the initial value"),
        trace,
        iterations,
        converged,
    })
}

/// Sum of the within-cluster Fréchet values `F_c(mu_c)` under dtw.
pub fn cluster_cohesion<S: AsRef<[f64]>>(data: &[S], assignments: &[usize], centroids: &[Vec<f64>]) -> Result<f64> {
    if data.len() != assignments.len() {
        return Err(Error::invalid("one assignment per series required"));
    }
    let mut total = 0.0;
    for (x, &a) in data.iter().zip(assignments) {
        let mu = centroids
            .get(a)
            .ok_or_else(|| Error::invalid(format!("assignment {a} has no centroid")))?;
        total += dtw_sq(x.as_ref(), mu);
    }
    Ok(total)
}

/// `dtw(mu_a, mu_b)^2`.
pub fn cluster_separation(mu_a: &[f64], mu_b: &[f64]) -> Result<f64> {
    let d = dtw(mu_a, mu_b, false)?.distance;
    Ok(d * d)
}

/// `twi(mu_a, mu_b)^2`.
pub fn cluster_separation_twi(mu_a: &[f64], mu_b: &[f64]) -> Result<f64> {
    let d = crate::distances::twi(mu_a, mu_b)?;
    Ok(d * d)
}

/// The four series of the running k-means example; the first two and the
/// last two form the clusters.
pub fn example_series() -> [Vec<f64>; 4] {
    [
        vec![-1.0, 0.0, 0.0],
        vec![-1.0, 0.0, 2.0],
        vec![0.0, 2.0, 3.0],
        vec![1.0, 2.0, 3.0],
    ]
}

/// `(0.5, 2, 3, ..., 3)` with `r` trailing threes.
pub fn replicated_mean(r: usize) -> Vec<f64> {
    let mut mu = vec![0.5, 2.0];
    mu.extend(std::iter::repeat_n(3.0, r));
    mu
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationRow {
    pub r: usize,
    pub cohesion: f64,
    pub separation_dtw: f64,
    pub separation_twi: f64,
}

/// Cohesion and separation of the example clustering as the last element
/// of the second mean is replicated `r = 1..=r_max` times.
pub fn separation_growth_demo(r_max: usize) -> Result<Vec<SeparationRow>> {
    if r_max == 0 {
        return Err(Error::invalid("r_max must be >= 1"));
    }
    let data = example_series();
    let assignments = [0, 0, 1, 1];
    let mu1 = vec![-1.0, 0.0, 1.0];
    (1..=r_max)
        .map(|r| {
            let mu2 = replicated_mean(r);
            Ok(SeparationRow {
                r,
                cohesion: cluster_cohesion(&data, &assignments, &[mu1.clone(), mu2.clone()])?,
                separation_dtw: cluster_separation(&mu1, &mu2)?,
                separation_twi: cluster_separation_twi(&mu1, &mu2)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frechet_examples() {
        let z = vec![0.3, 1.0, -2.0];
        assert_eq!(frechet(std::slice::from_ref(&z), &z).unwrap(), 0.0);
        let c2 = [vec![0.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]];
        assert!((frechet(&c2, &[0.5, 2.0, 3.0]).unwrap() - 0.5).abs() < 1e-12);
        let c1 = [vec![-1.0, 0.0, 0.0], vec![-1.0, 0.0, 2.0]];
        assert!((frechet(&c1, &[-1.0, 0.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(frechet::<Vec<f64>>(&[], &z).is_err());
    }

    #[test]
    fn dba_examples() {
        let x = vec![1.0, 3.0, 2.0, 2.5];
        let out = dba_mean(std::slice::from_ref(&x), 4, 10, 1).unwrap();
        assert_eq!(out.mean, x);
        assert_eq!(out.objective(), 0.0);

        let c2 = [vec![0.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]];
        for seed in 0..4 {
            let out = dba_mean(&c2, 3, 20, seed).unwrap();
            assert!((out.objective() - 0.5).abs() < 1e-12, "{out:?}");
            assert_eq!(out.mean, vec![0.5, 2.0, 3.0]);
        }
        assert!(dba_mean::<Vec<f64>>(&[], 3, 5, 0).is_err());
    }

    #[test]
    fn dba_trace_is_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for seed in 0..20 {
            let sample: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..rng.random_range(3..12)).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let out = dba_mean(&sample, 6, 25, seed).unwrap();
            assert!(out.trace.windows(2).all(|w| w[1] <= w[0]), "{:?}", out.trace);
            assert!((frechet(&sample, &out.mean).unwrap() - out.objective()).abs() < 1e-9);
        }
    }

    #[test]
    fn kmeans_trivial_cases() {
        let data = example_series();
        let cfg = KMeansConfig::new(4, ClusterDistance::Dtw);
        let c = kmeans(&data, &cfg).unwrap();
        assert_eq!(c.objective, 0.0);
        let mut seen = c.assignments.clone();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3]);

        let cfg = KMeansConfig::new(1, ClusterDistance::Dtw);
        let c = kmeans(&data, &cfg).unwrap();
        assert_eq!(c.assignments, vec![0; 4]);
        let f = frechet(&data, &c.centroids[0]).unwrap();
        assert!((f - c.objective).abs() < 1e-9);
        for x in &data {
            assert!(f <= frechet(&data, x).unwrap());
        }
        assert!(c.trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));

        assert!(kmeans(&data, &KMeansConfig::new(5, ClusterDistance::Dtw)).is_err());
    }

    #[test]
    fn kmeans_example_partition() {
        let data = example_series();
        let mut cfg = KMeansConfig::new(2, ClusterDistance::Dtw);
        cfg.initial = Some(vec![data[0].clone(), data[3].clone()]);
        let c = kmeans(&data, &cfg).unwrap();
        assert_eq!(c.assignments, vec![0, 0, 1, 1]);
        assert!(c.converged);
        assert!((c.objective - 2.5).abs() < 1e-12, "{c:?}");
        assert_eq!(c.centroids[0], vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn empty_clusters_are_reseeded() {
        let data = vec![vec![0.0], vec![0.1], vec![10.0]];
        let mut cfg = KMeansConfig::new(2, ClusterDistance::Dtw);
        // both centroids far from everything; the second gets no points at first
        cfg.initial = Some(vec![vec![5.0], vec![100.0]]);
        let c = kmeans(&data, &cfg).unwrap();
        assert!((0..2).all(|k| c.assignments.contains(&k)));
    }

    #[test]
    fn cohesion_and_separation() {
        let data = example_series();
        let singletons: Vec<Vec<f64>> = data.to_vec();
        assert_eq!(cluster_cohesion(&data, &[0, 1, 2, 3], &singletons).unwrap(), 0.0);
        assert_eq!(cluster_separation(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(cluster_cohesion(&data, &[0, 0, 0], &singletons).is_err());
    }

    #[test]
    fn separation_demo_shape() {
        let rows = separation_growth_demo(10).unwrap();
        assert_eq!(rows.len(), 10);
        assert!(rows.iter().all(|r| r.cohesion == rows[0].cohesion));
        assert!(rows.iter().all(|r| r.separation_twi == rows[0].separation_twi));
        assert!(rows.windows(2).all(|w| w[1].separation_dtw > w[0].separation_dtw));
        assert!(separation_growth_demo(0).is_err());
    }
}
