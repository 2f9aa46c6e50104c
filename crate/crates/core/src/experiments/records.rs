use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// One measurement row of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub method: String,
    pub metric: String,
    pub value: f64,
    /// Fold, repeat or pair index; empty for aggregate rows.
    pub fold: Option<usize>,
    pub seed: u64,
    pub wall_ms: f64,
}

impl ExperimentRecord {
    pub fn new(
        dataset: impl Into<String>,
        method: impl Into<String>,
        metric: impl Into<String>,
        value: f64,
        fold: Option<usize>,
        seed: u64,
        wall_ms: f64,
    ) -> Result<Self> {
        let metric = metric.into();
        if !value.is_finite() {
            return Err(Error::invalid(format!("{metric} value {value} is not finite")));
        }
        Ok(ExperimentRecord {
            dataset: dataset.into(),
            method: method.into(),
            metric,
            value,
            fold,
            seed,
            wall_ms,
        })
    }
}

/// CSV with a header row and `\n` line endings.
pub fn write_csv<W: Write>(w: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Pretty-printed JSON array.
pub fn write_json<W: Write>(mut w: W, records: &[ExperimentRecord]) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, records)?;
    writeln!(w).map_err(|e| Error::Json(serde_json::Error::io(e)))?;
    Ok(())
}
