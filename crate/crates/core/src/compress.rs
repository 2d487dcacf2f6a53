//! Sequential-duplicate elimination and step-function reconstruction.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::series::{check_increasing, CompressedSeries, QuantizedSeries, TimeSeries, Timestamp};

/// Keeps the first sample of every maximal run of equal consecutive values.
pub fn compress(quantized: &QuantizedSeries) -> Result<CompressedSeries> {
    compress_values(quantized.timestamps(), quantized.values())
}

/// [`compress`] over raw parallel slices.
pub fn compress_values(timestamps: &[Timestamp], values: &[f64]) -> Result<CompressedSeries> {
    if timestamps.len() != values.len() {
        return Err(Error::LengthMismatch { expected: timestamps.len(), actual: values.len() });
    }
    if values.is_empty() {
        return Err(Error::invalid("cannot compress an empty series"));
    }
    let mut points: Vec<(Timestamp, f64)> = Vec::new();
    for (&t, &v) in timestamps.iter().zip(values) {
        match points.last() {
            Some(&(_, last)) if last == v => {}
            _ => points.push((t, v)),
        }
    }
    Ok(CompressedSeries::from_parts_unchecked(points, values.len(), timestamps[timestamps.len() - 1]))
}

/// Last-observation-carried-forward reconstruction over `grid`.
///
/// The grid must start at the first change-point and contain every
/// change-point timestamp.
pub fn decompress(compressed: &CompressedSeries, grid: &[Timestamp]) -> Result<TimeSeries> {
    if grid.is_empty() {
        return Err(Error::invalid("empty reconstruction grid"));
    }
    check_increasing(grid)?;
    let points = compressed.points();
    if grid[0] != compressed.first_timestamp() {
        return Err(Error::InconsistentGrid { timestamp: compressed.first_timestamp() });
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut next = 0;
    let mut current = points[0].1;
    for &t in grid {
        if next < points.len() && points[next].0 < t {
            // the grid stepped over a change-point
            return Err(Error::InconsistentGrid { timestamp: points[next].0 });
        }
        if next < points.len() && points[next].0 == t {
            current = points[next].1;
            next += 1;
        }
        values.push(current);
    }
    if next < points.len() {
        return Err(Error::InconsistentGrid { timestamp: points[next].0 });
    }
    TimeSeries::new(grid.to_vec(), values)
}
