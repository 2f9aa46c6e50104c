//! Dynamic time warping and the time-warp-invariant (twi) distance.
//!
//! The twi-distance is the dtw-distance between condensed forms, where a
//! condensed form collapses every run of repeated values to a single
//! element. It is a semi-metric on warping-identification classes and is
//! invariant under expansions of either argument.
//!
//! Modules, bottom up:
//!
//! * [`series`]: time-series values, normalization, length alignment, datasets.
//! * [`words`]: prime factorization, condensation and expansions over any alphabet.
//! * [`warping`]: warping paths, walks and functions, plus brute-force enumerators.
//! * [`distances`]: euclidean, dtw (full, banded, early abandoning), twi, lower bounds.
//! * [`nn`]: 1-nearest-neighbor classification and cross-validation.
//! * [`clustering`]: Fréchet functions, DBA means, k-means and cluster quality.
//! * [`experiments`]: ingestion, synthetic data, statistics, timing and studies.

pub mod clustering;
pub mod distances;
pub mod error;
pub mod experiments;
pub mod nn;
pub mod series;
pub mod warping;
pub mod words;

pub use error::{Error, Result};
pub use series::{CondensedSeries, Equality, LabeledDataset, TimeSeries};
