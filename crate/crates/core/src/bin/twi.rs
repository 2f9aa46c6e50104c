use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use twi::clustering::separation_growth_demo;
use twi::distances::{dtw, dtw_banded, dtw_banded_with_path, euclidean, BandConfig};
use twi::experiments::io::{load_column, load_series, load_values, write_ucr};
use twi::experiments::{
    bayes_sign_test, correlations, discover_datasets, reducibility_stats, run_cv_study, run_synth_study, segment,
    summarize_synth, timing_bench, write_csv, write_json, ExperimentRecord, Table5Row, TimedMethod, TimingConfig,
};
use twi::nn::{DistanceKind, NnConfig};
use twi::series::{condense_values, Equality, TimeSeries};
use twi::{Error, Result};

#[derive(Parser)]
#[command(name = "twi", version, about = "dtw and time-warp-invariant distances, classifiers and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistMethod {
    Euc,
    Dtw,
    Twi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KnnMethod {
    Euc,
    Dtw,
    Twi,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two series files.
    Dist {
        #[arg(long, value_enum)]
        method: DistMethod,
        #[arg(long = "a")]
        a: PathBuf,
        #[arg(long = "b")]
        b: PathBuf,
        /// Sakoe-Chiba band radius as a fraction of the longer length.
        #[arg(long)]
        band: Option<f64>,
        /// Also print the optimal warping path as 1-based (i,j) pairs.
        #[arg(long)]
        path: bool,
    },
    /// Reducibility per dataset and correlations across datasets.
    Stats {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Timing of euc, dtw and twi on random pairs of each dataset.
    Bench {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validated 1-NN accuracy on every dataset under a directory.
    Knn {
        #[arg(long)]
        data: PathBuf,
        /// One or more of euc, dtw, twi (comma separated).
        #[arg(long, value_enum, value_delimiter = ',', default_value = "dtw")]
        method: Vec<KnnMethod>,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        band: Option<f64>,
        /// Use the lower-bound cascade (opt-dtw / opt-twi).
        #[arg(long)]
        opt: bool,
        /// Evaluate the predefined train/test split instead of pooling it for cross-validation.
        #[arg(long)]
        no_merge: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error rates of euc, dtw and twi 1-NN on the synthetic cylinder data.
    Synth {
        /// Rows to run (E1..E5, comma separated); all rows by default.
        #[arg(long, value_delimiter = ',')]
        row: Vec<String>,
        #[arg(long, default_value_t = 50)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print only the per-row means.
        #[arg(long)]
        summary: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cohesion and separation as one cluster mean is stretched.
    KmeansDemo {
        #[arg(long, default_value_t = 10)]
        rmax: usize,
    },
    /// Bayesian sign test with a rope on per-dataset accuracy differences.
    Bayes {
        #[arg(long)]
        diffs: PathBuf,
        #[arg(long, default_value_t = 0.005)]
        rope: f64,
        #[arg(long, default_value_t = 1.0)]
        prior: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cut long meter readings into day windows and write a UCR-style split.
    Segment {
        /// One CSV per meter; the file stem becomes the class label.
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, default_value = "P")]
        column: String,
        #[arg(long, default_value_t = 1)]
        days: usize,
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn band_arg(band: Option<f64>) -> Result<Option<BandConfig>> {
    band.map(BandConfig::fraction).transpose()
}

fn emit(records: &[ExperimentRecord], format: Format, out: Option<&Path>) -> Result<()> {
    let write = |w: &mut dyn Write| match format {
        Format::Csv => write_csv(w, records),
        Format::Json => write_json(w, records),
    };
    match out {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p).map_err(io_err(p))?);
            write(&mut f)?;
            f.flush().map_err(io_err(p))
        }
        None => write(&mut io::stdout().lock()),
    }
}

fn stdout_line(line: &str) -> Result<()> {
    writeln!(io::stdout().lock(), "{line}").map_err(io_err(Path::new("<stdout>")))
}

fn run_dist(method: DistMethod, a: &Path, b: &Path, band: Option<f64>, want_path: bool) -> Result<()> {
    let (x, y) = (load_series(a)?, load_series(b)?);
    let band = band_arg(band)?;
    let (x, y) = match method {
        DistMethod::Twi => (condense_values(&x, Equality::Exact), condense_values(&y, Equality::Exact)),
        _ => (x.into_values(), y.into_values()),
    };
    if method == DistMethod::Euc {
        if band.is_some() || want_path {
            return Err(Error::InvalidArgument("--band and --path apply to dtw and twi only".into()));
        }
        return stdout_line(&euclidean(&x, &y)?.to_string());
    }
    let res = match (band, want_path) {
        (Some(b), true) => dtw_banded_with_path(&x, &y, b)?,
        (Some(b), false) => twi::distances::DtwResult {
            distance: dtw_banded(&x, &y, b)?,
            path: None,
        },
        (None, p) => dtw(&x, &y, p)?,
    };
    stdout_line(&res.distance.to_string())?;
    if let Some(path) = res.path {
        stdout_line(&path.to_string())?;
    }
    Ok(())
}

fn run_stats(data: &Path, format: Format, out: Option<&Path>) -> Result<()> {
    let mut records = Vec::new();
    let mut all: Vec<TimeSeries> = Vec::new();
    let (mut lengths, mut p_reds) = (Vec::new(), Vec::new());
    for files in discover_datasets(data)? {
        let ds = files.load_merged()?;
        let series: Vec<&[f64]> = ds.iter().map(|(s, _)| s.values()).collect();
        let st = reducibility_stats(&series)?;
        let mean_len = series.iter().map(|s| s.len()).sum::<usize>() as f64 / series.len() as f64;
        for (metric, v) in [
            ("n_series", st.n_series as f64),
            ("length", mean_len),
            ("p_red", st.p_red),
            ("mean_shortening", st.mean_shortening),
        ] {
            records.push(ExperimentRecord::new(&ds.name, "condense", metric, v, None, 0, 0.0)?);
        }
        lengths.push(mean_len);
        p_reds.push(st.p_red);
        all.extend(ds.items().iter().map(|(s, _)| s.clone()));
    }
    let st = reducibility_stats(&all)?;
    records.push(ExperimentRecord::new("ALL", "condense", "n_series", st.n_series as f64, None, 0, 0.0)?);
    records.push(ExperimentRecord::new("ALL", "condense", "p_red", st.p_red, None, 0, 0.0)?);
    records.push(ExperimentRecord::new("ALL", "condense", "mean_shortening", st.mean_shortening, None, 0, 0.0)?);
    if lengths.len() >= 2 {
        let c = correlations(&lengths, &p_reds)?;
        for (metric, v) in [("pearson", c.pearson), ("spearman", c.spearman), ("kendall", c.kendall)] {
            if v.is_finite() {
                records.push(ExperimentRecord::new("ALL", "length_vs_p_red", metric, v, None, 0, 0.0)?);
            }
        }
    }
    emit(&records, format, out)
}

fn run_segment(inputs: &[PathBuf], column: &str, days: usize, name: &str, out: &Path) -> Result<()> {
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for input in inputs {
        let label = input
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidArgument(format!("bad file name {}", input.display())))?
            .to_string();
        let values = load_column(input, column)?;
        let (tr, te) = segment(&values, days)?;
        train.extend(tr.into_iter().map(|s| (s, label.clone())));
        test.extend(te.into_iter().map(|s| (s, label.clone())));
    }
    fs::create_dir_all(out).map_err(io_err(out))?;
    for (suffix, items) in [("TRAIN", &train), ("TEST", &test)] {
        let p = out.join(format!("{name}_{suffix}.tsv"));
        let mut f = BufWriter::new(File::create(&p).map_err(io_err(&p))?);
        write_ucr(&mut f, items).map_err(io_err(&p))?;
        f.flush().map_err(io_err(&p))?;
    }
    log::info!("{} train and {} test windows written to {}", train.len(), test.len(), out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dist {
            method,
            a,
            b,
            band,
            path,
        } => run_dist(method, &a, &b, band, path),
        Command::Stats { data, format, out } => run_stats(&data, format, out.as_deref()),
        Command::Bench {
            data,
            pairs,
            reps,
            seed,
            format,
            out,
        } => {
            let cfg = TimingConfig { pairs, reps, seed };
            let mut records = Vec::new();
            for files in discover_datasets(&data)? {
                records.extend(timing_bench(&files.load_merged()?, &TimedMethod::ALL, &cfg)?);
            }
            emit(&records, format, out.as_deref())
        }
        Command::Knn {
            data,
            method,
            folds,
            seed,
            band,
            opt,
            no_merge,
            format,
            out,
        } => {
            let band = band_arg(band)?;
            let methods: Vec<NnConfig> = method
                .iter()
                .map(|m| {
                    let kind = match (m, opt) {
                        (KnnMethod::Euc, _) => DistanceKind::Euclidean,
                        (KnnMethod::Dtw, false) => DistanceKind::Dtw,
                        (KnnMethod::Twi, false) => DistanceKind::Twi,
                        (KnnMethod::Dtw, true) => DistanceKind::OptDtw,
                        (KnnMethod::Twi, true) => DistanceKind::OptTwi,
                    };
                    let cfg = NnConfig::new(kind).with_seed(seed);
                    match (band, kind) {
                        (_, DistanceKind::Euclidean) => cfg,
                        (Some(b), _) => cfg.with_band(Some(b)),
                        (None, _) => cfg,
                    }
                })
                .collect();
            let records = run_cv_study(&data, &methods, folds, seed, !no_merge)?;
            emit(&records, format, out.as_deref())
        }
        Command::Synth {
            row,
            repeats,
            seed,
            summary,
            format,
            out,
        } => {
            let rows: Vec<Table5Row> = if row.is_empty() {
                Table5Row::ALL.to_vec()
            } else {
                row.iter().map(|r| r.parse()).collect::<Result<_>>()?
            };
            let mut records = run_synth_study(&rows, repeats, seed)?;
            if summary {
                records = summarize_synth(&records)
                    .into_iter()
                    .flat_map(|s| {
                        [("euc", s.euc), ("dtw", s.dtw), ("twi", s.twi)]
                            .map(|(m, v)| ExperimentRecord::new(s.row.name(), m, "mean_error_rate", v, None, seed, 0.0))
                    })
                    .collect::<Result<_>>()?;
            }
            emit(&records, format, out.as_deref())
        }
        Command::KmeansDemo { rmax } => {
            let rows = separation_growth_demo(rmax)?;
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(io::stdout().lock());
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush().map_err(io_err(Path::new("<stdout>")))
        }
        Command::Bayes {
            diffs,
            rope,
            prior,
            samples,
            seed,
        } => {
            let d = load_values(&diffs)?;
            let r = bayes_sign_test(&d, rope, prior, samples, seed)?;
            log::info!("Bayesian sign test with rope {rope} and prior strength {prior}");
            stdout_line("p_left,p_rope,p_right")?;
            stdout_line(&format!("{},{},{}", r.p_left, r.p_rope, r.p_right))
        }
        Command::Segment {
            input,
            column,
            days,
            name,
            out,
        } => run_segment(&input, &column, days, &name, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_user_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
