//! CSV output for ensemble histograms and per-iteration profiles.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tunnel::{Phase, Termination};

/// One row per sample: where it ended up and how long it took.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRecord {
    pub sample_id: usize,
    pub seed: u64,
    pub final_best_f: f64,
    pub n_tunnels_used: usize,
    pub termination: Termination,
    pub wall_iterations: usize,
}

/// One row per iteration of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRecord {
    pub sample_id: usize,
    pub global_iteration: usize,
    pub phase: Phase,
    pub f: f64,
    /// Empty during descent.
    pub distance_to_stable: Option<f64>,
}

pub const HISTOGRAM_HEADER: [&str; 6] = [
    "sample_id",
    "seed",
    "final_best_f",
    "n_tunnels_used",
    "termination",
    "wall_iterations",
];

pub const PROFILE_HEADER: [&str; 5] = ["sample_id", "global_iteration", "phase", "f", "distance_to_stable"];

const SIGNIFICANT_DIGITS: usize = 12;

/// Decimal with 12 significant digits; scientific notation only for very
/// large or small magnitudes.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.prec$e}", prec = SIGNIFICANT_DIGITS - 1)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    }
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn histogram_rows(records: &[HistogramRecord]) -> Vec<Vec<String>> {
    let mut sorted: Vec<&HistogramRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.sample_id);
    sorted
        .into_iter()
        .map(|r| {
            vec![
                r.sample_id.to_string(),
                r.seed.to_string(),
                format_value(r.final_best_f),
                r.n_tunnels_used.to_string(),
                r.termination.as_str().to_string(),
                r.wall_iterations.to_string(),
            ]
        })
        .collect()
}

fn profile_rows(records: &[ProfileRecord]) -> Vec<Vec<String>> {
    let mut sorted: Vec<&ProfileRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.sample_id, r.global_iteration));
    sorted
        .into_iter()
        .map(|r| {
            vec![
                r.sample_id.to_string(),
                r.global_iteration.to_string(),
                r.phase.as_str().to_string(),
                format_value(r.f),
                r.distance_to_stable.map(format_value).unwrap_or_default(),
            ]
        })
        .collect()
}

/// Histogram CSV as a string; rows sorted by `sample_id`.
pub fn histogram_csv(records: &[HistogramRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut buf = Vec::new();
    write_rows(&mut buf, &HISTOGRAM_HEADER, histogram_rows(records).into_iter())
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Profile CSV as a string; rows sorted by `(sample_id, global_iteration)`.
pub fn profile_csv(records: &[ProfileRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut buf = Vec::new();
    write_rows(&mut buf, &PROFILE_HEADER, profile_rows(records).into_iter())
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut file = File::create(path).map_err(io_err(path))?;
    file.write_all(text.as_bytes()).map_err(io_err(path))
}

pub fn write_histogram(records: &[HistogramRecord], path: &Path) -> Result<()> {
    write_file(path, &histogram_csv(records)?)
}

pub fn write_profile(records: &[ProfileRecord], path: &Path) -> Result<()> {
    write_file(path, &profile_csv(records)?)
}

fn read_table(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut text = String::new();
    File::open(path)
        .map_err(io_err(path))?
        .read_to_string(&mut text)
        .map_err(io_err(path))?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let found = r.headers().map_err(csv_err(path))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse(format!(
            "{}: expected columns {header:?}, found {found:?}",
            path.display()
        )));
    }
    r.records().map(|row| row.map_err(csv_err(path))).collect()
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    let raw = row.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::Parse(format!("bad {name} {raw:?} in row {row:?}")))
}

pub fn read_histogram(path: &Path) -> Result<Vec<HistogramRecord>> {
    read_table(path, &HISTOGRAM_HEADER)?
        .iter()
        .map(|row| {
            Ok(HistogramRecord {
                sample_id: field(row, 0, "sample_id")?,
                seed: field(row, 1, "seed")?,
                final_best_f: field(row, 2, "final_best_f")?,
                n_tunnels_used: field(row, 3, "n_tunnels_used")?,
                termination: field(row, 4, "termination")?,
                wall_iterations: field(row, 5, "wall_iterations")?,
            })
        })
        .collect()
}

pub fn read_profile(path: &Path) -> Result<Vec<ProfileRecord>> {
    read_table(path, &PROFILE_HEADER)?
        .iter()
        .map(|row| {
            let distance = match row.get(4) {
                None | Some("") => None,
                Some(_) => Some(field(row, 4, "distance_to_stable")?),
            };
            Ok(ProfileRecord {
                sample_id: field(row, 0, "sample_id")?,
                global_iteration: field(row, 1, "global_iteration")?,
                phase: field(row, 2, "phase")?,
                f: field(row, 3, "f")?,
                distance_to_stable: distance,
            })
        })
        .collect()
}
