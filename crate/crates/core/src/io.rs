//! CSV ingestion of annual series, resampling onto uniform grids and
//! result tables.
//!
//! Input schema: header `year,value`, one record per line, `#` comment
//! lines allowed, LF or CRLF line endings. Numbers are written with the
//! shortest representation that parses back to the same value.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Result, WadeError};
use crate::model::{Series, TimeGrid};
use crate::pontryagin::Trajectory;
use crate::scalar::Scalar;
use crate::sweeps::SweepResult;

/// Node times within this distance of a calendar year are treated as that year.
const YEAR_TOLERANCE: f64 = 1e-9;

pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "R", "lambda", "a_star", "S", "H"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnualRecord {
    pub year: i64,
    pub value: f64,
}

impl AnnualRecord {
    pub fn new(year: i64, value: f64) -> Self {
        Self { year, value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleMode {
    /// Each annual value holds over `[year, year + 1)`.
    Step,
    /// Straight lines between `(year, value)` points.
    Linear,
}

fn csv_error(err: csv::Error) -> WadeError {
    let line = err.position().map_or(0, |p| p.line());
    match err.kind() {
        csv::ErrorKind::Io(e) => WadeError::Io(e.to_string()),
        _ => WadeError::MalformedRow {
            line,
            message: err.to_string(),
        },
    }
}

pub fn load_annual_csv<R: Read>(source: R) -> Result<Vec<AnnualRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);

    let mut rows = reader.records();
    let header = match rows.next() {
        Some(row) => row.map_err(csv_error)?,
        None => {
            return Err(WadeError::MalformedRow {
                line: 1,
                message: "missing `year,value` header".into(),
            })
        }
    };
    let header_line = header.position().map_or(1, |p| p.line());
    if header.len() != 2 || &header[0] != "year" || &header[1] != "value" {
        return Err(WadeError::MalformedRow {
            line: header_line,
            message: format!(
                "expected header `year,value`, found `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut records: Vec<AnnualRecord> = Vec::new();
    for row in rows {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != 2 {
            return Err(WadeError::MalformedRow {
                line,
                message: format!("expected 2 fields, found {}", row.len()),
            });
        }
        let year: i64 = row[0].parse().map_err(|_| WadeError::MalformedRow {
            line,
            message: format!("bad year `{}`", &row[0]),
        })?;
        let value: f64 = row[1].parse().map_err(|_| WadeError::MalformedRow {
            line,
            message: format!("bad value `{}`", &row[1]),
        })?;
        if !value.is_finite() {
            return Err(WadeError::MalformedRow {
                line,
                message: format!("non-finite value `{}`", &row[1]),
            });
        }
        if let Some(prev) = records.last() {
            if year == prev.year {
                return Err(WadeError::DuplicateYear { line, year });
            }
            if year < prev.year {
                return Err(WadeError::NonIncreasingYear {
                    line,
                    year,
                    previous: prev.year,
                });
            }
        }
        records.push(AnnualRecord { year, value });
    }
    Ok(records)
}

pub fn load_annual_csv_path(path: impl AsRef<Path>) -> Result<Vec<AnnualRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| WadeError::Io(format!("{}: {e}", path.display())))?;
    load_annual_csv(file)
}

/// Samples annual records onto `grid`.
pub fn resample(
    records: &[AnnualRecord],
    grid: &TimeGrid<f64>,
    mode: ResampleMode,
) -> Result<Series<f64>> {
    let (first, last) = match (records.first(), records.last()) {
        (Some(f), Some(l)) => (f.year as f64, l.year as f64),
        _ => {
            return Err(WadeError::InvalidParameter {
                name: "records",
                reason: "no data to resample".into(),
            })
        }
    };
    let upper = match mode {
        ResampleMode::Step => last + 1.0,
        ResampleMode::Linear => last,
    };
    if grid.t_start() < first - YEAR_TOLERANCE || grid.t_end() > upper + YEAR_TOLERANCE {
        return Err(WadeError::OutsideDataSpan {
            t_start: grid.t_start(),
            t_end: grid.t_end(),
            first,
            last: upper,
        });
    }
    Series::from_fn(*grid, |t| match mode {
        ResampleMode::Step => step_value(records, t),
        ResampleMode::Linear => linear_value(records, t),
    })
}

fn step_value(records: &[AnnualRecord], t: f64) -> f64 {
    let idx = records.partition_point(|r| r.year as f64 <= t + YEAR_TOLERANCE);
    records[idx.saturating_sub(1)].value
}

fn linear_value(records: &[AnnualRecord], t: f64) -> f64 {
    let idx = records.partition_point(|r| r.year as f64 <= t + YEAR_TOLERANCE);
    if idx == 0 {
        return records[0].value;
    }
    let left = records[idx - 1];
    if (t - left.year as f64).abs() <= YEAR_TOLERANCE || idx == records.len() {
        return left.value;
    }
    let right = records[idx];
    let frac = (t - left.year as f64) / (right.year - left.year) as f64;
    left.value + frac * (right.value - left.value)
}

fn write_rows<W: Write>(
    sink: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    writer.write_record(header).map_err(csv_error)?;
    for row in rows {
        writer.write_record(&row).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

fn trajectory_row<T: Scalar>(traj: &Trajectory<T>, i: usize) -> Vec<String> {
    vec![
        traj.grid.node(i).to_string(),
        traj.reserves.values()[i].to_string(),
        traj.lambda.values()[i].to_string(),
        traj.a_star.values()[i].to_string(),
        traj.super_profit.values()[i].to_string(),
        traj.hamiltonian.values()[i].to_string(),
    ]
}

/// Writes `t,R,lambda,a_star,S,H`, one row per node.
pub fn write_trajectory_csv<T: Scalar, W: Write>(traj: &Trajectory<T>, sink: W) -> Result<()> {
    write_rows(
        sink,
        &TRAJECTORY_COLUMNS,
        (0..traj.len()).map(|i| trajectory_row(traj, i)),
    )
}

/// Writes `k,t,R,lambda,a_star,S,H`, entries in order.
pub fn write_sweep_csv<T: Scalar, W: Write>(sweep: &SweepResult<T>, sink: W) -> Result<()> {
    let mut header = vec!["k"];
    header.extend(TRAJECTORY_COLUMNS);
    let rows = sweep.entries.iter().flat_map(|e| {
        (0..e.trajectory.len()).map(move |i| {
            let mut row = vec![e.k.to_string()];
            row.extend(trajectory_row(&e.trajectory, i));
            row
        })
    });
    write_rows(sink, &header, rows)
}

/// Writes `k,start_value,objective`, one row per sweep entry.
pub fn write_sweep_objectives_csv<T: Scalar, W: Write>(
    sweep: &SweepResult<T>,
    sink: W,
) -> Result<()> {
    let rows = sweep.entries.iter().map(|e| {
        vec![
            e.k.to_string(),
            e.start_value.to_string(),
            e.objective.to_string(),
        ]
    });
    write_rows(sink, &["k", "start_value", "objective"], rows)
}

/// Writes named columns of equal length.
pub fn write_columns_csv<T: Scalar, W: Write>(columns: &[(&str, &[T])], sink: W) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.1.len());
    if columns.iter().any(|c| c.1.len() != n) {
        return Err(WadeError::InvalidParameter {
            name: "columns",
            reason: "columns differ in length".into(),
        });
    }
    let header: Vec<&str> = columns.iter().map(|c| c.0).collect();
    let rows = (0..n).map(|i| columns.iter().map(|c| c.1[i].to_string()).collect());
    write_rows(sink, &header, rows)
}

/// Either result table kind accepted by [`write_result_csv`].
pub enum ResultTable<'a, T> {
    Trajectory(&'a Trajectory<T>),
    Sweep(&'a SweepResult<T>),
}

pub fn write_result_csv<T: Scalar, W: Write>(table: ResultTable<'_, T>, sink: W) -> Result<()> {
    match table {
        ResultTable::Trajectory(t) => write_trajectory_csv(t, sink),
        ResultTable::Sweep(s) => write_sweep_csv(s, sink),
    }
}

/// Numeric table with a header row, as produced by the writers above.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_table<R: Read>(source: R) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new().from_reader(source);
    let header = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let values = row
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| WadeError::MalformedRow {
                    line,
                    message: format!("bad number `{f}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(values);
    }
    Ok(Table { header, rows })
}
