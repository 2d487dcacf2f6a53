//! Shared 1-D domain types and the nearest-level rule.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Epoch milliseconds.
pub type Timestamp = i64;

/// Maps `-0.0` onto `0.0` so that numeric and bitwise equality agree.
#[inline]
pub(crate) fn canonical(x: f64) -> f64 {
    x + 0.0
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

pub(crate) fn check_increasing(timestamps: &[Timestamp]) -> Result<()> {
    match timestamps.windows(2).position(|w| w[0] >= w[1]) {
        Some(i) => Err(Error::UnorderedTimestamps { index: i + 1 }),
        None => Ok(()),
    }
}

/// A regularly or irregularly sampled metric: strictly increasing timestamps
/// paired with finite values. Never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    timestamps: Vec<Timestamp>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(timestamps: Vec<Timestamp>, values: Vec<f64>) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::LengthMismatch { expected: timestamps.len(), actual: values.len() });
        }
        if values.is_empty() {
            return Err(Error::invalid("time series must hold at least one sample"));
        }
        check_finite(&values)?;
        check_increasing(&timestamps)?;
        let values = values.into_iter().map(canonical).collect();
        Ok(TimeSeries { timestamps, values })
    }

    /// Series sampled at `0, 1, 2, ...`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let timestamps = (0..values.len() as Timestamp).collect();
        Self::new(timestamps, values)
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always `false`; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first_timestamp(&self) -> Timestamp {
        self.timestamps[0]
    }

    pub fn last_timestamp(&self) -> Timestamp {
        self.timestamps[self.timestamps.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Timestamp, f64)> + '_ {
        self.timestamps.iter().copied().zip(self.values.iter().copied())
    }

    pub fn into_parts(self) -> (Vec<Timestamp>, Vec<f64>) {
        (self.timestamps, self.values)
    }
}

/// Ordered, distinct reproduction levels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Codebook {
    levels: Vec<f64>,
}

impl Codebook {
    /// Levels must be finite and strictly increasing. An empty codebook is
    /// representable but cannot quantize anything.
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        check_finite(&levels)?;
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("codebook levels must be strictly increasing"));
        }
        Ok(Codebook { levels: levels.into_iter().map(canonical).collect() })
    }

    /// Sorts and deduplicates arbitrary finite levels.
    pub fn from_unsorted(mut levels: Vec<f64>) -> Result<Self> {
        check_finite(&levels)?;
        levels.sort_by(f64::total_cmp);
        let mut levels: Vec<f64> = levels.into_iter().map(canonical).collect();
        levels.dedup();
        Ok(Codebook { levels })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn contains(&self, value: f64) -> bool {
        self.levels.binary_search_by(|l| l.total_cmp(&value)).is_ok()
    }

    pub fn nearest(&self, value: f64) -> Result<f64> {
        nearest_level(value, self)
    }
}

/// Returns the level closest to `value`. An exact tie between two adjacent
/// levels resolves to the lower one.
pub fn nearest_level(value: f64, codebook: &Codebook) -> Result<f64> {
    let levels = codebook.levels();
    if levels.is_empty() {
        return Err(Error::invalid("empty codebook"));
    }
    if !value.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    // first level strictly above the value
    let upper = levels.partition_point(|&l| l <= value);
    if upper == 0 {
        return Ok(levels[0]);
    }
    if upper == levels.len() {
        return Ok(levels[upper - 1]);
    }
    let (lo, hi) = (levels[upper - 1], levels[upper]);
    Ok(if value - lo <= hi - value { lo } else { hi })
}

/// A series whose values were replaced by codebook levels, except where
/// `exact_mask` marks a sample preserved verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedSeries {
    timestamps: Vec<Timestamp>,
    values: Vec<f64>,
    codebook: Codebook,
    exact_mask: Vec<bool>,
}

impl QuantizedSeries {
    pub fn new(
        timestamps: Vec<Timestamp>,
        values: Vec<f64>,
        codebook: Codebook,
        exact_mask: Vec<bool>,
    ) -> Result<Self> {
        let n = timestamps.len();
        if values.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: values.len() });
        }
        if exact_mask.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: exact_mask.len() });
        }
        if n == 0 {
            return Err(Error::invalid("quantized series must hold at least one sample"));
        }
        check_finite(&values)?;
        check_increasing(&timestamps)?;
        let values: Vec<f64> = values.into_iter().map(canonical).collect();
        if let Some(k) = values.iter().zip(&exact_mask).position(|(&v, &exact)| !exact && !codebook.contains(v)) {
            return Err(Error::invalid(alloc::format!("value at index {k} is neither exact nor a codebook level")));
        }
        Ok(QuantizedSeries { timestamps, values, codebook, exact_mask })
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    pub fn exact_mask(&self) -> &[bool] {
        &self.exact_mask
    }

    pub fn exact_count(&self) -> usize {
        self.exact_mask.iter().filter(|&&e| e).count()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The quantized values as a plain series on the same grid.
    pub fn to_series(&self) -> TimeSeries {
        TimeSeries { timestamps: self.timestamps.clone(), values: self.values.clone() }
    }
}

/// Change-points left after sequential-duplicate elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedSeries {
    points: Vec<(Timestamp, f64)>,
    original_length: usize,
    original_last_timestamp: Timestamp,
}

impl CompressedSeries {
    /// Validates every container invariant; used when decoding artifacts.
    pub fn new(
        points: Vec<(Timestamp, f64)>,
        original_length: usize,
        original_last_timestamp: Timestamp,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("compressed series needs at least one change-point"));
        }
        if points.len() > original_length {
            return Err(Error::invalid("more change-points than original samples"));
        }
        if let Some(index) = points.iter().position(|p| !p.1.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(i) = points.windows(2).position(|w| w[0].0 >= w[1].0) {
            return Err(Error::UnorderedTimestamps { index: i + 1 });
        }
        if points.windows(2).any(|w| w[0].1 == w[1].1) {
            return Err(Error::invalid("consecutive change-points share a value"));
        }
        if points[points.len() - 1].0 > original_last_timestamp {
            return Err(Error::invalid("change-point after the original last timestamp"));
        }
        let points = points.into_iter().map(|(t, v)| (t, canonical(v))).collect();
        Ok(CompressedSeries { points, original_length, original_last_timestamp })
    }

    pub(crate) fn from_parts_unchecked(
        points: Vec<(Timestamp, f64)>,
        original_length: usize,
        original_last_timestamp: Timestamp,
    ) -> Self {
        CompressedSeries { points, original_length, original_last_timestamp }
    }

    pub fn points(&self) -> &[(Timestamp, f64)] {
        &self.points
    }

    /// Number of stored change-points (M).
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of samples in the series this was compressed from (N).
    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn original_last_timestamp(&self) -> Timestamp {
        self.original_last_timestamp
    }

    pub fn first_timestamp(&self) -> Timestamp {
        self.points[0].0
    }

    /// The change-points as a series of their own.
    pub fn to_series(&self) -> TimeSeries {
        let (timestamps, values) = self.points.iter().copied().unzip();
        TimeSeries { timestamps, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn book(levels: &[f64]) -> Codebook {
        Codebook::new(levels.to_vec()).unwrap()
    }

    #[test]
    fn nearest_picks_closer_level() {
        assert_eq!(nearest_level(5.0, &book(&[1.0, 8.0])).unwrap(), 8.0);
    }

    #[test]
    fn nearest_tie_goes_low() {
        assert_eq!(nearest_level(4.5, &book(&[1.0, 8.0])).unwrap(), 1.0);
    }

    #[test]
    fn nearest_single_level() {
        assert_eq!(nearest_level(1.0, &book(&[1.0])).unwrap(), 1.0);
        assert_eq!(nearest_level(-100.0, &book(&[1.0])).unwrap(), 1.0);
    }

    #[test]
    fn nearest_outside_range_clamps() {
        let b = book(&[1.0, 2.0, 3.0]);
        assert_eq!(nearest_level(-7.0, &b).unwrap(), 1.0);
        assert_eq!(nearest_level(70.0, &b).unwrap(), 3.0);
    }

    #[test]
    fn nearest_rejects_empty_codebook() {
        assert!(matches!(nearest_level(1.0, &Codebook::default()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn time_series_rejects_bad_input() {
        assert!(TimeSeries::new(vec![], vec![]).is_err());
        assert_eq!(TimeSeries::new(vec![1, 2], vec![1.0, f64::NAN]), Err(Error::NonFinite { index: 1 }));
        assert_eq!(TimeSeries::new(vec![1, 1], vec![1.0, 2.0]), Err(Error::UnorderedTimestamps { index: 1 }));
        assert!(matches!(TimeSeries::new(vec![1], vec![1.0, 2.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn negative_zero_is_canonicalized() {
        let s = TimeSeries::from_values(vec![-0.0, 1.0]).unwrap();
        assert_eq!(s.values()[0].to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn codebook_requires_strict_order() {
        assert!(Codebook::new(vec![1.0, 1.0]).is_err());
        assert!(Codebook::new(vec![2.0, 1.0]).is_err());
        assert_eq!(Codebook::from_unsorted(vec![3.0, 1.0, 3.0]).unwrap().levels(), &[1.0, 3.0]);
    }

    #[test]
    fn quantized_series_checks_membership() {
        let b = book(&[1.0, 8.0]);
        assert!(QuantizedSeries::new(vec![0, 1], vec![1.0, 8.0], b.clone(), vec![false, false]).is_ok());
        assert!(QuantizedSeries::new(vec![0, 1], vec![1.0, 7.0], b.clone(), vec![false, false]).is_err());
        assert!(QuantizedSeries::new(vec![0, 1], vec![1.0, 7.0], b, vec![false, true]).is_ok());
    }

    #[test]
    fn compressed_series_invariants() {
        assert!(CompressedSeries::new(vec![(0, 1.0), (2, 2.0)], 3, 2).is_ok());
        assert!(CompressedSeries::new(vec![], 3, 2).is_err());
        assert!(CompressedSeries::new(vec![(0, 1.0), (2, 1.0)], 3, 2).is_err());
        assert!(CompressedSeries::new(vec![(0, 1.0), (2, 2.0)], 1, 2).is_err());
        assert!(CompressedSeries::new(vec![(2, 1.0), (0, 2.0)], 3, 2).is_err());
    }
}
