//! Reducibility statistics and correlation coefficients.

use serde::Serialize;

use crate::distances::compression_ratio;
use crate::error::{Error, Result};
use crate::series::{condensed_len, Equality};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducibilityStats {
    pub n_series: usize,
    pub n_reducible: usize,
    /// Percentage of series that are strictly longer than their condensed form.
    pub p_red: f64,
    /// Mean of `1 - |x*|/|x|` over reducible series, in percent.
    pub mean_shortening: f64,
    /// `|x|/|x*|` for every series, in input order.
    pub ratios: Vec<f64>,
}

/// Reducibility under exact equality.
pub fn reducibility_stats<S: AsRef<[f64]>>(data: &[S]) -> Result<ReducibilityStats> {
    if data.is_empty() {
        return Err(Error::invalid("no series"));
    }
    let mut n_reducible = 0;
    let mut shortening = 0.0;
    let mut ratios = Vec::with_capacity(data.len());
    for x in data {
        let x = x.as_ref();
        if x.is_empty() {
            return Err(Error::invalid("empty series"));
        }
        let c = condensed_len(x, Equality::Exact);
        if c < x.len() {
            n_reducible += 1;
            shortening += 1.0 - c as f64 / x.len() as f64;
        }
        ratios.push(compression_ratio(x));
    }
    Ok(ReducibilityStats {
        n_series: data.len(),
        n_reducible,
        p_red: 100.0 * n_reducible as f64 / data.len() as f64,
        mean_shortening: if n_reducible == 0 {
            0.0
        } else {
            100.0 * shortening / n_reducible as f64
        },
        ratios,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlations {
    pub pearson: f64,
    pub spearman: f64,
    pub kendall: f64,
}

/// Pearson, Spearman and Kendall tau-b coefficients. Coefficients that are
/// undefined (a constant input) come back as NaN.
pub fn correlations(xs: &[f64], ys: &[f64]) -> Result<Correlations> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::invalid(format!(
            "correlations need equal non-zero lengths (got {} and {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("correlation inputs must be finite"));
    }
    Ok(Correlations {
        pearson: pearson(xs, ys),
        spearman: pearson(&ranks(xs), &ranks(ys)),
        kendall: kendall_tau_b(xs, ys),
    })
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

/// 1-based ranks, ties get the average rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn kendall_tau_b(xs: &[f64], ys: &[f64]) -> f64 {
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut untied_x, mut untied_y) = (0i64, 0i64);
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let dx = xs[i].total_cmp(&xs[j]) as i64;
            let dy = ys[i].total_cmp(&ys[j]) as i64;
            if dx != 0 {
                untied_x += 1;
            }
            if dy != 0 {
                untied_y += 1;
            }
            match dx * dy {
                1 => concordant += 1,
                -1 => discordant += 1,
                _ => {}
            }
        }
    }
    if untied_x == 0 || untied_y == 0 {
        return f64::NAN;
    }
    (concordant - discordant) as f64 / ((untied_x as f64) * (untied_y as f64)).sqrt()
}
