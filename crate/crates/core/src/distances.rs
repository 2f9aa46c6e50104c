//! Euclidean, dtw (full, banded, early abandoning), twi, lower bounds, and
//! the compression and speed-up figures derived from condensed lengths.
//!
//! All dynamic programs accumulate squared costs and take one square root
//! at the end.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::series::{condense_values, Equality};
use crate::warping::{GridPoint, WarpingPath};

fn non_empty(x: &[f64], y: &[f64]) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid("distance of an empty series"));
    }
    Ok(())
}

fn same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

pub fn squared_euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    same_len(x, y)?;
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum())
}

pub fn euclidean(x: &[f64], y: &[f64]) -> Result<f64> {
    squared_euclidean(x, y).map(f64::sqrt)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtwResult {
    pub distance: f64,
    pub path: Option<WarpingPath>,
}

/// Sakoe-Chiba band radius, either relative to the longer series or absolute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandConfig {
    Fraction(f64),
    Absolute(usize),
}

impl BandConfig {
    pub fn fraction(f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::invalid(format!("band fraction {f} not in [0, 1]")));
        }
        Ok(BandConfig::Fraction(f))
    }

    /// Effective radius for series of lengths `m` and `n`: the configured
    /// radius (fractions multiply `max(m, n)` and round up), widened to
    /// `|m - n|` so that the corner cell stays reachable.
    pub fn radius(&self, m: usize, n: usize) -> usize {
        let r = match *self {
            BandConfig::Fraction(f) => (f * m.max(n) as f64).ceil() as usize,
            BandConfig::Absolute(r) => r,
        };
        r.max(m.abs_diff(n))
    }
}

/// Squared dtw with two rolling rows.
///
/// `radius` restricts cells to `|i - j| <= radius` (callers guarantee
/// `radius >= |m - n|`). Returns `None` as soon as a whole row exceeds
/// `abandon_sq`; every later cell is at least that row's minimum.
pub(crate) fn dtw_sq_kernel(
    x: &[f64],
    y: &[f64],
    radius: Option<usize>,
    abandon_sq: f64,
) -> Option<f64> {
    // dtw is symmetric; keep the shorter series along the row buffer
    let (x, y) = if y.len() > x.len() { (y, x) } else { (x, y) };
    let (m, n) = (x.len(), y.len());
    let r = radius.unwrap_or(m.max(n));
    let mut prev = vec![f64::INFINITY; n + 1];
    let mut curr = vec![f64::INFINITY; n + 1];
    prev[0] = 0.0;
    for i in 1..=m {
        let lo = i.saturating_sub(r).max(1);
        let hi = (i + r).min(n);
        curr[lo - 1] = f64::INFINITY;
        let xi = x[i - 1];
        let mut row_min = f64::INFINITY;
        for j in lo..=hi {
            let d = xi - y[j - 1];
            let best = prev[j - 1].min(prev[j]).min(curr[j - 1]);
            let v = d * d + best;
            curr[j] = v;
            row_min = row_min.min(v);
        }
        if hi < n {
            curr[hi + 1] = f64::INFINITY;
        }
        if row_min > abandon_sq {
            return None;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Some(prev[n])
}

/// Full cost matrix and optimal path. Backtracking prefers the diagonal,
/// then `(i-1, j)`, then `(i, j-1)` on ties.
fn dtw_with_path(x: &[f64], y: &[f64], radius: Option<usize>) -> (f64, WarpingPath) {
    let (m, n) = (x.len(), y.len());
    let r = radius.unwrap_or(m.max(n));
    let w = n + 1;
    let mut d = vec![f64::INFINITY; (m + 1) * w];
    d[0] = 0.0;
    for i in 1..=m {
        for j in i.saturating_sub(r).max(1)..=(i + r).min(n) {
            let c = x[i - 1] - y[j - 1];
            let best = d[(i - 1) * w + j - 1].min(d[(i - 1) * w + j]).min(d[i * w + j - 1]);
            d[i * w + j] = c * c + best;
        }
    }
    let mut points = vec![GridPoint::new(m - 1, n - 1)];
    let (mut i, mut j) = (m, n);
    while (i, j) != (1, 1) {
        let diag = d[(i - 1) * w + j - 1];
        let up = d[(i - 1) * w + j];
        let left = d[i * w + j - 1];
        if diag <= up && diag <= left {
            i -= 1;
            j -= 1;
        } else if up <= left {
            i -= 1;
        } else {
            j -= 1;
        }
        points.push(GridPoint::new(i - 1, j - 1));
    }
    points.reverse();
    let path = WarpingPath::new(m, n, points).expect("backtracking yields a warping path");
    (d[m * w + n], path)
}

pub fn dtw(x: &[f64], y: &[f64], want_path: bool) -> Result<DtwResult> {
    non_empty(x, y)?;
    if want_path {
        let (sq, path) = dtw_with_path(x, y, None);
        return Ok(DtwResult {
            distance: sq.sqrt(),
            path: Some(path),
        });
    }
    let sq = dtw_sq_kernel(x, y, None, f64::INFINITY).expect("no abandoning threshold");
    Ok(DtwResult {
        distance: sq.sqrt(),
        path: None,
    })
}

/// Shorthand for `dtw(x, y, false)?.distance`.
pub fn dtw_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(dtw(x, y, false)?.distance)
}

/// dtw restricted to the Sakoe-Chiba band `|i - j| <= r`.
pub fn dtw_banded(x: &[f64], y: &[f64], band: BandConfig) -> Result<f64> {
    non_empty(x, y)?;
    let r = band.radius(x.len(), y.len());
    Ok(dtw_sq_kernel(x, y, Some(r), f64::INFINITY)
        .expect("no abandoning threshold")
        .sqrt())
}

/// Banded dtw together with an optimal path inside the band.
pub fn dtw_banded_with_path(x: &[f64], y: &[f64], band: BandConfig) -> Result<DtwResult> {
    non_empty(x, y)?;
    let (sq, path) = dtw_with_path(x, y, Some(band.radius(x.len(), y.len())));
    Ok(DtwResult {
        distance: sq.sqrt(),
        path: Some(path),
    })
}

/// dtw, or `None` once the distance is certain to exceed `threshold`.
pub fn dtw_early_abandon(x: &[f64], y: &[f64], threshold: f64) -> Result<Option<f64>> {
    dtw_banded_early_abandon(x, y, None, threshold)
}

pub fn dtw_banded_early_abandon(
    x: &[f64],
    y: &[f64],
    band: Option<BandConfig>,
    threshold: f64,
) -> Result<Option<f64>> {
    non_empty(x, y)?;
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::invalid(format!("threshold {threshold} must be >= 0")));
    }
    let r = band.map(|b| b.radius(x.len(), y.len()));
    let sq = dtw_sq_kernel(x, y, r, threshold * threshold);
    Ok(sq.map(f64::sqrt).filter(|d| *d <= threshold))
}

/// dtw between condensed forms (exact value equality).
pub fn twi(x: &[f64], y: &[f64]) -> Result<f64> {
    twi_with(x, y, Equality::Exact)
}

pub fn twi_with(x: &[f64], y: &[f64], eq: Equality) -> Result<f64> {
    non_empty(x, y)?;
    let cx = condense_values(x, eq);
    let cy = condense_values(y, eq);
    dtw_distance(&cx, &cy)
}

/// Upper and lower envelope `max/min(s[i-r..=i+r])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

impl Envelope {
    /// Streaming min/max with monotone deques, `O(n)` for any radius.
    pub fn new(s: &[f64], r: usize) -> Self {
        let n = s.len();
        let mut upper = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n);
        let mut maxq: VecDeque<usize> = VecDeque::new();
        let mut minq: VecDeque<usize> = VecDeque::new();
        let mut next = 0;
        for i in 0..n {
            let hi = (i + r).min(n - 1);
            while next <= hi {
                while maxq.back().is_some_and(|&k| s[k] <= s[next]) {
                    maxq.pop_back();
                }
                maxq.push_back(next);
                while minq.back().is_some_and(|&k| s[k] >= s[next]) {
                    minq.pop_back();
                }
                minq.push_back(next);
                next += 1;
            }
            let lo = i.saturating_sub(r);
            while maxq.front().is_some_and(|&k| k < lo) {
                maxq.pop_front();
            }
            while minq.front().is_some_and(|&k| k < lo) {
                minq.pop_front();
            }
            upper.push(s[maxq[0]]);
            lower.push(s[minq[0]]);
        }
        Envelope { upper, lower }
    }
}

fn outside_sq(v: f64, lower: f64, upper: f64) -> f64 {
    if v > upper {
        (v - upper) * (v - upper)
    } else if v < lower {
        (v - lower) * (v - lower)
    } else {
        0.0
    }
}

pub(crate) fn lb_keogh_sq(query: &[f64], env: &Envelope) -> f64 {
    query
        .iter()
        .zip(env.lower.iter().zip(&env.upper))
        .map(|(&q, (&l, &u))| outside_sq(q, l, u))
        .sum()
}

/// Second pass of LB_Improved: project the query onto the candidate's
/// envelope, then measure how far the candidate leaves the envelope of
/// that projection.
pub(crate) fn lb_improved_second_sq(candidate: &[f64], query: &[f64], env: &Envelope, r: usize) -> f64 {
    let projection: Vec<f64> = query
        .iter()
        .zip(env.lower.iter().zip(&env.upper))
        .map(|(&q, (&l, &u))| q.clamp(l, u))
        .collect();
    lb_keogh_sq(candidate, &Envelope::new(&projection, r))
}

/// LB_Keogh against the envelope of `candidate`.
pub fn lb_keogh(query: &[f64], candidate: &[f64], r: usize) -> Result<f64> {
    same_len(query, candidate)?;
    non_empty(query, candidate)?;
    Ok(lb_keogh_sq(query, &Envelope::new(candidate, r)).sqrt())
}

/// LB_Improved: LB_Keogh plus the second pass on the query's projection.
pub fn lb_lemire(query: &[f64], candidate: &[f64], r: usize) -> Result<f64> {
    same_len(query, candidate)?;
    non_empty(query, candidate)?;
    let env = Envelope::new(candidate, r);
    let first = lb_keogh_sq(query, &env);
    Ok((first + lb_improved_second_sq(candidate, query, &env, r)).sqrt())
}

/// `|x| / |x*|`.
pub fn compression_ratio(x: &[f64]) -> f64 {
    compression_ratio_with(x, Equality::Exact)
}

pub fn compression_ratio_with(x: &[f64], eq: Equality) -> f64 {
    let c = crate::series::condensed_len(x, eq);
    if c == 0 {
        return 1.0;
    }
    x.len() as f64 / c as f64
}

/// Speed-up of twi over dtw: `phi1` includes condensing both series,
/// `phi2` assumes both are stored condensed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupFactors {
    pub phi1: f64,
    pub phi2: f64,
}

pub fn speedup_factors(
    len_x: usize,
    len_y: usize,
    condensed_x: usize,
    condensed_y: usize,
) -> SpeedupFactors {
    let full = (len_x * len_y) as f64;
    let cc = (condensed_x * condensed_y) as f64;
    SpeedupFactors {
        phi1: full / (cc + condensed_x as f64 + condensed_y as f64),
        phi2: full / cc,
    }
}

/// Pairwise space-saving ratio `1 - (|x*| + |y*|) / (2(|x| + |y|))`.
pub fn space_saving_ratio(len_x: usize, len_y: usize, condensed_x: usize, condensed_y: usize) -> f64 {
    1.0 - (condensed_x + condensed_y) as f64 / (2 * (len_x + len_y)) as f64
}

/// Per-series space saving `1 - |x*| / |x|`.
pub fn series_saving_ratio(len: usize, condensed_len: usize) -> f64 {
    1.0 - condensed_len as f64 / len as f64
}
