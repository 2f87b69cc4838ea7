//! CSV outputs of a sweep and their readers.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rates::{metric, RateEstimate};
use super::sweep::{RunRecord, RunResult};
use crate::energy::{EnergyReport, REPORT_COLUMNS};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: header {found:?} does not match the expected columns {expected:?}")]
    Schema {
        path: PathBuf,
        expected: Vec<String>,
        found: Vec<String>,
    },
}

pub const RUN_COLUMNS: [&str; 7] = ["eps", "a_eps", "status", "steps", "t_final", "worst_mass_defect", "message"];
pub const RATE_COLUMNS: [&str; 8] = [
    "t",
    "metric",
    "slope",
    "intercept",
    "rms_residual",
    "max_abs_residual",
    "points",
    "note",
];
pub const LONG_COLUMNS: [&str; 4] = ["eps", "t", "metric", "value"];
/// Metrics written to the long-format file, in order.
pub const LONG_METRICS: [&str; 6] = [
    "E_rel_total",
    "L1_rho",
    "L1_theta",
    "L1_m",
    "ballistic_total",
    "dissipation_accum",
];

pub const RUNS_FILE: &str = "runs.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const RATES_FILE: &str = "rates.csv";
pub const LONG_FILE: &str = "long.csv";
pub const README_FILE: &str = "README.md";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRow {
    pub eps: f64,
    pub t: f64,
    pub metric: String,
    pub value: f64,
}

pub fn long_format(table: &[EnergyReport]) -> Vec<LongRow> {
    table
        .iter()
        .flat_map(|r| {
            LONG_METRICS.iter().map(move |&m| LongRow {
                eps: r.eps,
                t: r.t,
                metric: m.to_string(),
                value: metric(r, m).expect("known metric"),
            })
        })
        .collect()
}

pub fn run_file_name(eps: f64) -> String {
    format!("run_eps_{eps}.csv")
}

/// Writes `header` then `rows`; an empty `rows` still gives the header.
pub fn write_rows<W: Write, T: Serialize>(writer: W, header: &[&str], rows: &[T]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows after checking the header against `header`.
pub fn read_rows<R: Read, T: DeserializeOwned>(reader: R, header: &[&str], path: &Path) -> Result<Vec<T>, ReportError> {
    let csv_err = |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_reader(reader);
    let found: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if found != header {
        return Err(ReportError::Schema {
            path: path.to_path_buf(),
            expected: header.iter().map(|s| s.to_string()).collect(),
            found,
        });
    }
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(csv_err)
}

pub fn read_aggregate<R: Read>(reader: R) -> Result<Vec<EnergyReport>, ReportError> {
    read_rows(reader, &REPORT_COLUMNS, Path::new(AGGREGATE_FILE))
}

pub fn read_rates<R: Read>(reader: R) -> Result<Vec<RateEstimate>, ReportError> {
    read_rows(reader, &RATE_COLUMNS, Path::new(RATES_FILE))
}

pub fn read_runs<R: Read>(reader: R) -> Result<Vec<RunRecord>, ReportError> {
    read_rows(reader, &RUN_COLUMNS, Path::new(RUNS_FILE))
}

pub fn read_long<R: Read>(reader: R) -> Result<Vec<LongRow>, ReportError> {
    read_rows(reader, &LONG_COLUMNS, Path::new(LONG_FILE))
}

fn write_file<T: Serialize>(dir: &Path, name: &str, header: &[&str], rows: &[T]) -> Result<PathBuf, ReportError> {
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|source| ReportError::Io { path: path.clone(), source })?;
    write_rows(std::io::BufWriter::new(file), header, rows).map_err(|source| ReportError::Csv { path: path.clone(), source })?;
    Ok(path)
}

fn open(dir: &Path, name: &str) -> Result<fs::File, ReportError> {
    let path = dir.join(name);
    fs::File::open(&path).map_err(|source| ReportError::Io { path, source })
}

/// Everything written for one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTables {
    pub runs: Vec<RunRecord>,
    pub aggregate: Vec<EnergyReport>,
    pub rates: Vec<RateEstimate>,
    pub long: Vec<LongRow>,
}

impl ReportTables {
    pub fn new(runs: &[RunResult], aggregate: Vec<EnergyReport>, rates: Vec<RateEstimate>) -> Self {
        ReportTables {
            runs: runs.iter().map(|r| r.record.clone()).collect(),
            long: long_format(&aggregate),
            aggregate,
            rates,
        }
    }
}

/// Writes per-run trajectories, `runs.csv`, `aggregate.csv`, `rates.csv`,
/// `long.csv` and a README describing them. Returns the paths written.
pub fn write_report(dir: &Path, runs: &[RunResult], tables: &ReportTables) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for run in runs {
        written.push(write_file(dir, &run_file_name(run.record.eps), &REPORT_COLUMNS, &run.reports)?);
    }
    written.push(write_file(dir, RUNS_FILE, &RUN_COLUMNS, &tables.runs)?);
    written.push(write_file(dir, AGGREGATE_FILE, &REPORT_COLUMNS, &tables.aggregate)?);
    written.push(write_file(dir, RATES_FILE, &RATE_COLUMNS, &tables.rates)?);
    written.push(write_file(dir, LONG_FILE, &LONG_COLUMNS, &tables.long)?);
    let readme = dir.join(README_FILE);
    fs::write(&readme, README_TEXT).map_err(|source| ReportError::Io {
        path: readme.clone(),
        source,
    })?;
    written.push(readme);
    Ok(written)
}

/// Reads back the tables written by [`write_report`].
pub fn read_report(dir: &Path) -> Result<ReportTables, ReportError> {
    Ok(ReportTables {
        runs: read_rows(open(dir, RUNS_FILE)?, &RUN_COLUMNS, &dir.join(RUNS_FILE))?,
        aggregate: read_rows(open(dir, AGGREGATE_FILE)?, &REPORT_COLUMNS, &dir.join(AGGREGATE_FILE))?,
        rates: read_rows(open(dir, RATES_FILE)?, &RATE_COLUMNS, &dir.join(RATES_FILE))?,
        long: read_rows(open(dir, LONG_FILE)?, &LONG_COLUMNS, &dir.join(LONG_FILE))?,
    })
}

pub fn read_run_file(dir: &Path, eps: f64) -> Result<Vec<EnergyReport>, ReportError> {
    let name = run_file_name(eps);
    read_rows(open(dir, &name)?, &REPORT_COLUMNS, &dir.join(&name))
}

const README_TEXT: &str = "\
# Sweep output

All files are comma-separated with one header line. Numbers are written in
shortest round-trip form; `NaN` marks a value that could not be computed.

## run_eps_<eps>.csv

Every observation of one run: the start time, each probe time and the final
time.

| column | meaning |
|---|---|
| eps | dissipation scale |
| t | time |
| E_rel_total | integral of the relative energy to the exact wave |
| L1_rho, L1_theta, L1_m | L1 distances of density, temperature, momentum |
| ballistic_total | integral of the ballistic energy |
| dissipation_accum | accumulated weighted dissipation up to t |

## aggregate.csv

Same columns, restricted to the probe times, runs in configuration order.
Aborted runs contribute only the probe times they reached.

## runs.csv

`eps, a_eps, status, steps, t_final, worst_mass_defect, message`. `status`
is `completed` or `aborted`; `message` holds the abort diagnostic.
`worst_mass_defect` is the largest relative per-step mass imbalance after
boundary fluxes.

## rates.csv

`t, metric, slope, intercept, rms_residual, max_abs_residual, points, note`:
least-squares fit of log(metric) against log(eps) per probe time. Zero
values are excluded and listed in `note`; fewer than three usable points
give `NaN`.

## long.csv

`eps, t, metric, value`: the aggregate table in long format, one row per
metric, for plotting.
";
