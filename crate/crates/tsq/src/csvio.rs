//! CSV ingestion and output.
//!
//! Input rows are `timestamp,value[,value...]` with integer millisecond
//! timestamps. A first row whose leading field is not an integer is taken as
//! a header and skipped.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;
use tsq_core::{PointCloud, TimeSeries, Timestamp};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}, field {field}: {message}")]
    Field { line: u64, field: usize, message: String },
    #[error("no data rows")]
    Empty,
    #[error("{0}")]
    Data(#[from] tsq_core::Error),
}

/// Timestamps plus a row-major table of value columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub timestamps: Vec<Timestamp>,
    pub columns: usize,
    pub values: Vec<f64>,
}

impl Table {
    pub fn column(&self, c: usize) -> Vec<f64> {
        self.values.iter().skip(c).step_by(self.columns).copied().collect()
    }
}

pub fn read_table<R: Read>(input: R) -> Result<Table, CsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    let mut columns = None;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let first = record.get(0).unwrap_or("");
        let ts = match first.parse::<i64>() {
            Ok(t) => t,
            Err(_) if timestamps.is_empty() && columns.is_none() => {
                // header row
                columns = Some(record.len().saturating_sub(1));
                continue;
            }
            Err(e) => return Err(CsvError::Field { line, field: 1, message: format!("bad timestamp {first:?}: {e}") }),
        };
        let width = record.len() - 1;
        match columns {
            None => columns = Some(width),
            Some(c) if c != width => {
                return Err(CsvError::Field {
                    line,
                    field: record.len(),
                    message: format!("expected {c} value columns, found {width}"),
                })
            }
            _ => {}
        }
        if width == 0 {
            return Err(CsvError::Field { line, field: 2, message: "missing value column".into() });
        }
        timestamps.push(ts);
        for (i, field) in record.iter().enumerate().skip(1) {
            let v: f64 = field.parse().map_err(|e| CsvError::Field {
                line,
                field: i + 1,
                message: format!("bad value {field:?}: {e}"),
            })?;
            if !v.is_finite() {
                return Err(CsvError::Field { line, field: i + 1, message: format!("non-finite value {field:?}") });
            }
            values.push(v);
        }
    }
    if timestamps.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(Table { timestamps, columns: columns.unwrap_or(1), values })
}

/// A 1-D series from value column `column` (0 = first value column).
pub fn series_from_table(table: &Table, column: usize) -> Result<TimeSeries, CsvError> {
    if column >= table.columns {
        return Err(CsvError::Field {
            line: 1,
            field: column + 2,
            message: format!("file has {} value columns", table.columns),
        });
    }
    Ok(TimeSeries::new(table.timestamps.clone(), table.column(column))?)
}

pub fn cloud_from_table(table: &Table) -> Result<PointCloud, CsvError> {
    if table.timestamps.windows(2).any(|w| w[0] >= w[1]) {
        let i = table.timestamps.windows(2).position(|w| w[0] >= w[1]).unwrap() + 1;
        return Err(tsq_core::Error::UnorderedTimestamps { index: i }.into());
    }
    Ok(PointCloud::new(table.columns, table.values.clone())?)
}

pub fn read_series(path: &Path, column: usize) -> Result<TimeSeries, CsvError> {
    series_from_table(&read_table(File::open(path)?)?, column)
}

pub fn read_cloud(path: &Path) -> Result<(Vec<Timestamp>, PointCloud), CsvError> {
    let table = read_table(File::open(path)?)?;
    let cloud = cloud_from_table(&table)?;
    Ok((table.timestamps, cloud))
}

/// Reconstruction grid: the timestamp column of a CSV file; any value
/// columns are ignored.
pub fn read_grid<R: Read>(input: R) -> Result<Vec<Timestamp>, CsvError> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(input);
    let mut grid = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let first = record.get(0).unwrap_or("");
        if first.is_empty() {
            continue;
        }
        match first.parse::<i64>() {
            Ok(t) => grid.push(t),
            Err(_) if row == 0 => {}
            Err(e) => {
                let line = record.position().map_or(row as u64 + 1, |p| p.line());
                return Err(CsvError::Field { line, field: 1, message: format!("bad timestamp {first:?}: {e}") });
            }
        }
    }
    Ok(grid)
}

pub fn write_series<W: Write>(out: W, points: impl IntoIterator<Item = (Timestamp, f64)>) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["timestamp", "value"])?;
    for (t, v) in points {
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cloud<W: Write>(out: W, timestamps: &[Timestamp], cloud: &PointCloud) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["timestamp".to_string()];
    header.extend((0..cloud.dim()).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (t, p) in timestamps.iter().zip(cloud.points()) {
        let mut row = vec![t.to_string()];
        row.extend(p.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
