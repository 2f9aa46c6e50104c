//! Readers for UCR-style dataset files, plain value files, and
//! segmentation of long meter readings into labeled windows.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::series::{LabeledDataset, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Delimiter {
    Tab,
    Comma,
    Whitespace,
}

impl Delimiter {
    fn detect(line: &str) -> Self {
        if line.contains('\t') {
            Delimiter::Tab
        } else if line.contains(',') {
            Delimiter::Comma
        } else {
            Delimiter::Whitespace
        }
    }

    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            Delimiter::Tab => line.split('\t').map(str::trim).collect(),
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Parses the value fields of one row. Trailing NaNs (padding for unequal
/// lengths) are dropped; a NaN followed by a number is an error.
fn parse_values(fields: &[&str], path: &Path, line: usize) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(fields.len());
    for (k, f) in fields.iter().enumerate() {
        if f.is_empty() {
            return Err(parse_err(path, line, format!("empty field {}", k + 2)));
        }
        let v: f64 = f
            .parse()
            .map_err(|_| parse_err(path, line, format!("cannot parse {f:?} as a number")))?;
        if v.is_infinite() {
            return Err(parse_err(path, line, format!("infinite value {f:?}")));
        }
        values.push(v);
    }
    let end = values.iter().rposition(|v| !v.is_nan()).map_or(0, |p| p + 1);
    values.truncate(end);
    if values.iter().any(|v| v.is_nan()) {
        return Err(parse_err(path, line, "missing value inside the series"));
    }
    if values.is_empty() {
        return Err(parse_err(path, line, "row has no values"));
    }
    Ok(values)
}

/// Reads a UCR-format file: one series per line, class label first.
/// The delimiter (tab, comma or whitespace) is detected from the first row.
pub fn load_ucr(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut delim = None;
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let d = *delim.get_or_insert_with(|| Delimiter::detect(line));
        let fields = d.split(line);
        let label = fields[0];
        if label.is_empty() {
            return Err(parse_err(path, idx + 1, "empty class label"));
        }
        let values = parse_values(&fields[1..], path, idx + 1)?;
        let series = TimeSeries::new(values).map_err(|e| parse_err(path, idx + 1, e.to_string()))?;
        items.push((series, label.to_string()));
    }
    if items.is_empty() {
        return Err(parse_err(path, 0, "file contains no series"));
    }
    LabeledDataset::new(dataset_name(path), items)
}

/// All numbers in a file, separated by whitespace, commas or newlines.
pub fn load_values(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for f in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()) {
            let v: f64 = f
                .parse()
                .map_err(|_| parse_err(path, idx + 1, format!("cannot parse {f:?} as a number")))?;
            if !v.is_finite() {
                return Err(parse_err(path, idx + 1, format!("value {f:?} is not finite")));
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err(parse_err(path, 0, "file contains no values"));
    }
    Ok(values)
}

/// A single series stored as a flat list of numbers.
pub fn load_series(path: impl AsRef<Path>) -> Result<TimeSeries> {
    TimeSeries::new(load_values(path)?)
}

/// `Adiac_TRAIN.tsv` -> `Adiac`.
fn dataset_name(path: &Path) -> String {
    let stem = path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    let stem = stem
        .strip_suffix(".tsv")
        .or_else(|| stem.strip_suffix(".txt"))
        .unwrap_or(stem);
    stem.strip_suffix("_TRAIN")
        .or_else(|| stem.strip_suffix("_TEST"))
        .unwrap_or(stem)
        .to_string()
}

/// The train file of a dataset and its test file, if present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetFiles {
    pub name: String,
    pub train: PathBuf,
    pub test: Option<PathBuf>,
}

impl DatasetFiles {
    /// Train and test merged into one dataset.
    pub fn load_merged(&self) -> Result<LabeledDataset> {
        let train = load_ucr(&self.train)?;
        match &self.test {
            Some(t) => Ok(train.merged(load_ucr(t)?)),
            None => Ok(train),
        }
    }
}

/// Finds every `*_TRAIN`, `*_TRAIN.tsv` or `*_TRAIN.txt` file below `dir`
/// and pairs it with the matching `*_TEST` file. Sorted by name.
pub fn discover_datasets(dir: impl AsRef<Path>) -> Result<Vec<DatasetFiles>> {
    let dir = dir.as_ref();
    let mut found = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let entries = fs::read_dir(&d).map_err(|source| Error::Io {
            path: d.clone(),
            source,
        })?;
        for entry in entries {
            let path = entry
                .map_err(|source| Error::Io {
                    path: d.clone(),
                    source,
                })?
                .path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let Some(fname) = path.file_name().and_then(|s| s.to_str()) else {
                continue;
            };
            for ext in ["_TRAIN.tsv", "_TRAIN.txt", "_TRAIN"] {
                if let Some(name) = fname.strip_suffix(ext) {
                    let test_name = format!("{name}{}", ext.replace("TRAIN", "TEST"));
                    let test = path.with_file_name(test_name);
                    found.push(DatasetFiles {
                        name: name.to_string(),
                        train: path.clone(),
                        test: test.is_file().then_some(test),
                    });
                    break;
                }
            }
        }
    }
    if found.is_empty() {
        return Err(Error::invalid(format!("no *_TRAIN files found under {}", dir.display())));
    }
    found.sort_by(|a, b| a.name.cmp(&b.name).then(a.train.cmp(&b.train)));
    Ok(found)
}

/// Splits a long reading into consecutive windows of `1440 * days` samples,
/// dropping an incomplete tail. Windows with odd 1-based index go to the
/// first (train) list, the others to the second (test) list.
pub fn segment(values: &[f64], days: usize) -> Result<(Vec<TimeSeries>, Vec<TimeSeries>)> {
    if days == 0 {
        return Err(Error::invalid("days must be >= 1"));
    }
    let width = 1440 * days;
    if values.len() < width {
        return Err(Error::invalid(format!(
            "{} readings do not fill a single {days}-day window",
            values.len()
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (k, w) in values.chunks_exact(width).enumerate() {
        let s = TimeSeries::new(w.to_vec())?;
        if k % 2 == 0 {
            train.push(s);
        } else {
            test.push(s);
        }
    }
    Ok((train, test))
}

/// One numeric column of a CSV file with a header row.
pub fn load_column(path: impl AsRef<Path>, column: &str) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => parse_err(path, 0, format!("{other:?}")),
    })?;
    let idx = rdr
        .headers()?
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| parse_err(path, 1, format!("no column named {column:?}")))?;
    let mut values = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let f = rec
            .get(idx)
            .ok_or_else(|| parse_err(path, line, "row is too short"))?
            .trim();
        let v: f64 = f
            .parse()
            .map_err(|_| parse_err(path, line, format!("cannot parse {f:?} as a number")))?;
        if !v.is_finite() {
            return Err(parse_err(path, line, format!("value {f:?} is not finite")));
        }
        values.push(v);
    }
    Ok(values)
}

/// Writes a dataset in tab-separated UCR format.
pub fn write_ucr<W: Write>(mut w: W, items: &[(TimeSeries, String)]) -> std::io::Result<()> {
    for (s, label) in items {
        write!(w, "{label}")?;
        for v in s.iter() {
            write!(w, "\t{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}
