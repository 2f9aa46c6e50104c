//! Time-series value types, normalization and length alignment.

use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::words;

/// A non-empty sequence of finite samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("time series must have at least one value"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "time series value at index {pos} is not finite ({})",
                values[pos]
            )));
        }
        Ok(TimeSeries(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Condensed form under exact equality.
    pub fn condense(&self) -> CondensedSeries {
        CondensedSeries::new(self, Equality::Exact)
    }
}

impl Deref for TimeSeries {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        TimeSeries::new(values)
    }
}

/// Value equality used when condensing real-valued series.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Equality {
    /// Bit-for-bit float equality (`==`).
    #[default]
    Exact,
    /// `|a - b| <= eps`, compared against the first element of the current run.
    Tolerance(f64),
}

impl Equality {
    #[inline]
    pub fn eq(&self, a: f64, b: f64) -> bool {
        match *self {
            Equality::Exact => a == b,
            Equality::Tolerance(eps) => (a - b).abs() <= eps,
        }
    }
}

/// Collapses runs of equal values to their first element.
pub fn condense_values(x: &[f64], eq: Equality) -> Vec<f64> {
    words::condense_by(x, |a, b| eq.eq(*a, *b))
}

pub fn condensed_len(x: &[f64], eq: Equality) -> usize {
    words::condensed_len_by(x, |a, b| eq.eq(*a, *b))
}

/// An irreducible time series: no two consecutive values are equal.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CondensedSeries(TimeSeries);

impl CondensedSeries {
    pub fn new(x: &TimeSeries, eq: Equality) -> Self {
        CondensedSeries(TimeSeries(condense_values(x, eq)))
    }

    /// Wraps values that are already irreducible under `eq`.
    pub fn from_irreducible(values: Vec<f64>, eq: Equality) -> Result<Self> {
        let series = TimeSeries::new(values)?;
        if condensed_len(&series, eq) != series.len() {
            return Err(Error::invalid("series is not irreducible"));
        }
        Ok(CondensedSeries(series))
    }

    pub fn as_series(&self) -> &TimeSeries {
        &self.0
    }

    pub fn into_series(self) -> TimeSeries {
        self.0
    }
}

impl Deref for CondensedSeries {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Shifts to mean 0 and scales to population standard deviation 1. Series
/// whose standard deviation is below `1e-12` map to all zeros.
pub fn z_normalize(x: &TimeSeries) -> TimeSeries {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < 1e-12 {
        return TimeSeries(vec![0.0; x.len()]);
    }
    TimeSeries(x.iter().map(|v| (v - mean) / std).collect())
}

/// Piecewise-linear resampling onto `target_len` equally spaced points of the
/// same index range. Endpoints are kept exactly.
pub fn resample_linear(x: &[f64], target_len: usize) -> Result<Vec<f64>> {
    if target_len < 2 || x.len() < 2 {
        return Err(Error::invalid(format!(
            "resample_linear needs input and target length >= 2 (got {} -> {target_len})",
            x.len()
        )));
    }
    let n = x.len();
    let scale = (n - 1) as f64 / (target_len - 1) as f64;
    let mut out = Vec::with_capacity(target_len);
    for k in 0..target_len - 1 {
        let t = k as f64 * scale;
        let i = (t.floor() as usize).min(n - 2);
        let frac = t - i as f64;
        out.push(x[i] + frac * (x[i + 1] - x[i]));
    }
    out.push(x[n - 1]);
    Ok(out)
}

/// Truncates to the first `target_len` values, or repeats the last value
/// until the series has `target_len` values.
pub fn align_truncate_or_repeat(x: &[f64], target_len: usize) -> Result<Vec<f64>> {
    if target_len == 0 {
        return Err(Error::invalid("target length must be >= 1"));
    }
    let Some(&last) = x.last() else {
        return Err(Error::invalid("cannot align an empty series"));
    };
    let mut out: Vec<f64> = x.iter().copied().take(target_len).collect();
    out.resize(target_len, last);
    Ok(out)
}

/// A named collection of labeled series.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub name: String,
    items: Vec<(TimeSeries, String)>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, items: Vec<(TimeSeries, String)>) -> Result<Self> {
        let name = name.into();
        if items.is_empty() {
            return Err(Error::invalid(format!("dataset {name:?} is empty")));
        }
        if items.iter().any(|(_, l)| l.is_empty()) {
            return Err(Error::invalid(format!("dataset {name:?} has an empty label")));
        }
        Ok(LabeledDataset { name, items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(TimeSeries, String)] {
        &self.items
    }

    pub fn series(&self, i: usize) -> &TimeSeries {
        &self.items[i].0
    }

    pub fn label(&self, i: usize) -> &str {
        &self.items[i].1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TimeSeries, &str)> {
        self.items.iter().map(|(s, l)| (s, l.as_str()))
    }

    /// New dataset holding the items at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let items = indices.iter().map(|&i| self.items[i].clone()).collect();
        LabeledDataset::new(self.name.clone(), items)
    }

    /// Appends the items of `other`.
    pub fn merged(mut self, other: LabeledDataset) -> Self {
        self.items.extend(other.items);
        self
    }

    /// Applies `f` to every series, keeping labels.
    pub fn map_series(&self, f: impl Fn(&TimeSeries) -> TimeSeries) -> Self {
        LabeledDataset {
            name: self.name.clone(),
            items: self.items.iter().map(|(s, l)| (f(s), l.clone())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(TimeSeries::new(vec![]).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn z_normalize_examples() {
        // mean 2, population variance 2/3, std sqrt(2/3); (1-2)/sqrt(2/3) = -sqrt(3/2)
        let z = z_normalize(&ts(&[1.0, 2.0, 3.0]));
        let s = 1.5f64.sqrt();
        for (a, b) in z.iter().zip([-s, 0.0, s]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((z[0] + 1.2247).abs() < 1e-4);
        assert_eq!(z_normalize(&ts(&[5.0, 5.0, 5.0])).values(), &[0.0, 0.0, 0.0]);
        let again = z_normalize(&z);
        for (a, b) in again.iter().zip(z.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn resample_examples() {
        assert_eq!(resample_linear(&[0.0, 2.0], 3).unwrap(), vec![0.0, 1.0, 2.0]);
        let x = [0.3, -1.0, 4.0, 4.0, 2.5];
        assert_eq!(resample_linear(&x, 5).unwrap(), x.to_vec());
        assert_eq!(
            resample_linear(&[0.0, 1.0, 0.0], 5).unwrap(),
            vec![0.0, 0.5, 1.0, 0.5, 0.0]
        );
        assert!(resample_linear(&[1.0], 3).is_err());
        assert!(resample_linear(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn resample_keeps_endpoints_when_shrinking() {
        let x: Vec<f64> = (0..17).map(|i| (i as f64 * 0.7).sin()).collect();
        let y = resample_linear(&x, 5).unwrap();
        assert_eq!(y.len(), 5);
        assert_eq!(y[0], x[0]);
        assert_eq!(y[4], x[16]);
    }

    #[test]
    fn align_examples() {
        assert_eq!(align_truncate_or_repeat(&[1.0, 2.0, 3.0], 2).unwrap(), vec![1.0, 2.0]);
        assert_eq!(
            align_truncate_or_repeat(&[1.0, 2.0], 4).unwrap(),
            vec![1.0, 2.0, 2.0, 2.0]
        );
        assert_eq!(align_truncate_or_repeat(&[7.0], 1).unwrap(), vec![7.0]);
        assert!(align_truncate_or_repeat(&[7.0], 0).is_err());
    }

    #[test]
    fn repeat_alignment_is_an_expansion() {
        let x = [1.0, 3.0, 3.0, 2.0];
        let y = align_truncate_or_repeat(&x, 9).unwrap();
        assert!(words::is_expansion(&y, &x));
    }

    #[test]
    fn condensed_series() {
        let c = ts(&[0.0, 1.0, 1.0, 0.0, 0.0]).condense();
        assert_eq!(&*c, &[0.0, 1.0, 0.0]);
        assert!(CondensedSeries::from_irreducible(vec![1.0, 1.0], Equality::Exact).is_err());
        let tol = CondensedSeries::new(&ts(&[0.0, 1e-9, 1.0]), Equality::Tolerance(1e-6));
        assert_eq!(&*tol, &[0.0, 1.0]);
        assert_eq!(CondensedSeries::new(tol.as_series(), Equality::Exact), tol);
    }

    #[test]
    fn dataset_validation() {
        assert!(LabeledDataset::new("x", vec![]).is_err());
        assert!(LabeledDataset::new("x", vec![(ts(&[1.0]), String::new())]).is_err());
        let d = LabeledDataset::new("x", vec![(ts(&[1.0]), "a".into()), (ts(&[2.0]), "b".into())])
            .unwrap();
        assert_eq!(d.subset(&[1]).unwrap().label(0), "b");
    }
}
