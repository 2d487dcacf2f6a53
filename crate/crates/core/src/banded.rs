//! Importance-banded quantization.
//!
//! Samples above the upper threshold or below the lower one are important
//! and kept verbatim. The band `[L, H]` is cut into `n` equal slices
//! `I_j = [c_j, c_{j+1})` (the last one closed), and every in-band sample is
//! replaced by a statistic of all raw samples that fell into the same slice.
//! Running [`crate::compress::compress`] on the result completes the
//! pipeline.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::series::{canonical, check_finite, Codebook, QuantizedSeries, TimeSeries};

/// Default slice count; one to three slices keep the rate/error trade-off
/// reasonable on high-variability metrics.
pub const DEFAULT_SLICES: usize = 2;

/// Per-slice representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Statistic {
    #[default]
    Median,
    Mean,
}

impl Statistic {
    /// Statistic of a non-empty group. The result always lies within the
    /// group's range.
    pub fn apply(self, group: &mut [f64]) -> f64 {
        debug_assert!(!group.is_empty());
        match self {
            Statistic::Median => {
                group.sort_by(f64::total_cmp);
                let mid = group.len() / 2;
                if group.len() % 2 == 1 {
                    group[mid]
                } else {
                    canonical(group[mid - 1] / 2.0 + group[mid] / 2.0)
                }
            }
            Statistic::Mean => {
                let (lo, hi) =
                    group.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                let mean = group.iter().sum::<f64>() / group.len() as f64;
                canonical(mean.clamp(lo, hi))
            }
        }
    }
}

/// Lower/upper thresholds, either fixed or one pair per timestamp.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdBand {
    Constant { lower: f64, upper: f64 },
    Dynamic { lower: Vec<f64>, upper: Vec<f64> },
}

impl ThresholdBand {
    pub fn constant(lower: f64, upper: f64) -> Result<Self> {
        check_finite(&[lower, upper])?;
        if !(lower < upper) {
            return Err(Error::invalid("band requires lower < upper"));
        }
        Ok(ThresholdBand::Constant { lower, upper })
    }

    pub fn dynamic(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch { expected: lower.len(), actual: upper.len() });
        }
        check_finite(&lower)?;
        check_finite(&upper)?;
        if let Some(k) = lower.iter().zip(&upper).position(|(l, h)| !(l < h)) {
            return Err(Error::invalid(alloc::format!("band requires lower < upper at index {k}")));
        }
        Ok(ThresholdBand::Dynamic { lower, upper })
    }

    /// `(L_k, H_k)`.
    pub fn at(&self, k: usize) -> (f64, f64) {
        match self {
            ThresholdBand::Constant { lower, upper } => (*lower, *upper),
            ThresholdBand::Dynamic { lower, upper } => (lower[k], upper[k]),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ThresholdBand::Constant { .. })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        match self {
            ThresholdBand::Dynamic { lower, .. } if lower.len() != len => {
                Err(Error::LengthMismatch { expected: len, actual: lower.len() })
            }
            _ => Ok(()),
        }
    }
}

/// `c_k = L + (H − L)·k/n` for `k = 0..=n`; the last boundary is `H` exactly.
pub fn slice_boundaries(lower: f64, upper: f64, n: usize) -> Result<Vec<f64>> {
    if !(lower < upper) {
        return Err(Error::invalid("slice boundaries require lower < upper"));
    }
    if n == 0 {
        return Err(Error::invalid("slice count must be at least 1"));
    }
    let mut c = Vec::with_capacity(n + 1);
    fill_boundaries(lower, upper, n, &mut c);
    Ok(c)
}

fn fill_boundaries(lower: f64, upper: f64, n: usize, out: &mut Vec<f64>) {
    out.clear();
    let width = upper - lower;
    out.extend((0..n).map(|k| lower + width * k as f64 / n as f64));
    out.push(upper);
}

/// Slice index of an in-band `x`: `x = c_n` belongs to the last slice.
fn slice_of(x: f64, boundaries: &[f64]) -> usize {
    let n = boundaries.len() - 1;
    boundaries[1..n].partition_point(|&c| c <= x)
}

/// Result of [`quantize_banded`].
#[derive(Debug, Clone, PartialEq)]
pub struct BandedQuantization {
    /// In-band samples replaced by slice representatives; `exact_mask` marks
    /// the out-of-band samples kept verbatim.
    pub quantized: QuantizedSeries,
    /// `slice_stats[j]` is `m_j`, or `None` when slice `j` stayed empty.
    pub slice_stats: Vec<Option<f64>>,
    pub n_slices: usize,
    pub statistic: Statistic,
}

impl BandedQuantization {
    pub fn representative(&self, slice: usize) -> Option<f64> {
        self.slice_stats.get(slice).copied().flatten()
    }
}

/// Steps 1 to 4 of the banded pipeline. Slice indices are computed per
/// timestamp against that timestamp's band; each `m_j` aggregates the raw
/// values of every sample with index `j`.
pub fn quantize_banded(
    series: &TimeSeries,
    band: &ThresholdBand,
    n: usize,
    statistic: Statistic,
) -> Result<BandedQuantization> {
    if n == 0 {
        return Err(Error::invalid("slice count must be at least 1"));
    }
    band.check_len(series.len())?;

    // None = out of band, Some(j) = slice j
    let mut slot: Vec<Option<usize>> = Vec::with_capacity(series.len());
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut boundaries = Vec::with_capacity(n + 1);
    if let ThresholdBand::Constant { lower, upper } = *band {
        fill_boundaries(lower, upper, n, &mut boundaries);
    }
    for (k, &x) in series.values().iter().enumerate() {
        let (lower, upper) = band.at(k);
        if x > upper || x < lower {
            slot.push(None);
            continue;
        }
        if !band.is_constant() {
            fill_boundaries(lower, upper, n, &mut boundaries);
        }
        let j = slice_of(x, &boundaries);
        groups[j].push(x);
        slot.push(Some(j));
    }

    let slice_stats: Vec<Option<f64>> =
        groups.iter_mut().map(|g| if g.is_empty() { None } else { Some(statistic.apply(g)) }).collect();
    let codebook = Codebook::from_unsorted(slice_stats.iter().flatten().copied().collect())?;
    let values = series
        .values()
        .iter()
        .zip(&slot)
        .map(|(&x, s)| s.map_or(x, |j| slice_stats[j].expect("occupied slice")))
        .collect();
    let exact_mask = slot.iter().map(Option::is_none).collect();
    let quantized = QuantizedSeries::new(series.timestamps().to_vec(), values, codebook, exact_mask)?;
    Ok(BandedQuantization { quantized, slice_stats, n_slices: n, statistic })
}

/// Trailing-window quantile band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollingBandConfig {
    /// Samples per trailing window, including the current one.
    pub window: usize,
    pub lower_q: f64,
    pub upper_q: f64,
    /// Added to `L_k` when a window yields `H_k <= L_k`.
    pub epsilon: f64,
}

impl RollingBandConfig {
    pub const DEFAULT_EPSILON: f64 = 1e-9;

    pub fn new(window: usize, lower_q: f64, upper_q: f64) -> Self {
        RollingBandConfig { window, lower_q, upper_q, epsilon: Self::DEFAULT_EPSILON }
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Per-timestamp `lower_q`/`upper_q` quantiles of the trailing window ending
/// at each sample. Near the start the window shrinks to the available prefix.
pub fn rolling_band(series: &TimeSeries, config: RollingBandConfig) -> Result<ThresholdBand> {
    let RollingBandConfig { window, lower_q, upper_q, epsilon } = config;
    if window < 2 {
        return Err(Error::invalid("rolling window must span at least 2 samples"));
    }
    if !(0.0 <= lower_q && lower_q < upper_q && upper_q <= 1.0) {
        return Err(Error::invalid("quantiles must satisfy 0 <= lower < upper <= 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("band epsilon must be positive and finite"));
    }
    let values = series.values();
    let mut lower = Vec::with_capacity(values.len());
    let mut upper = Vec::with_capacity(values.len());
    let mut buf = Vec::with_capacity(window);
    for k in 0..values.len() {
        buf.clear();
        buf.extend_from_slice(&values[(k + 1).saturating_sub(window)..=k]);
        buf.sort_by(f64::total_cmp);
        let l = quantile_sorted(&buf, lower_q);
        let mut h = quantile_sorted(&buf, upper_q);
        if h <= l {
            h = l + epsilon;
            if h <= l {
                h = l.next_up();
            }
        }
        lower.push(l);
        upper.push(h);
    }
    ThresholdBand::dynamic(lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::compress;
    use crate::metrics::{compression_rate, variability};

    fn series(values: &[f64]) -> TimeSeries {
        TimeSeries::from_values(values.to_vec()).unwrap()
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(slice_boundaries(0.0, 10.0, 2).unwrap(), vec![0.0, 5.0, 10.0]);
        assert_eq!(slice_boundaries(0.0, 10.0, 1).unwrap(), vec![0.0, 10.0]);
        assert_eq!(slice_boundaries(-5.0, 5.0, 5).unwrap(), vec![-5.0, -3.0, -1.0, 1.0, 3.0, 5.0]);
        assert!(slice_boundaries(1.0, 1.0, 2).is_err());
        assert!(slice_boundaries(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn closing_boundary_is_exact() {
        let c = slice_boundaries(0.1, 0.3, 3).unwrap();
        assert_eq!(c[3], 0.3);
    }

    #[test]
    fn banded_worked_example() {
        let s = series(&[-1.0, 2.0, 3.0, 7.0, 12.0]);
        let band = ThresholdBand::constant(0.0, 10.0).unwrap();
        let b = quantize_banded(&s, &band, 2, Statistic::Median).unwrap();
        assert_eq!(b.quantized.values(), &[-1.0, 2.5, 2.5, 7.0, 12.0]);
        assert_eq!(b.quantized.exact_mask(), &[true, false, false, false, true]);
        assert_eq!(b.slice_stats, vec![Some(2.5), Some(7.0)]);
        assert_eq!(b.quantized.codebook().levels(), &[2.5, 7.0]);
    }

    #[test]
    fn single_slice_mean() {
        let s = series(&[1.0, 2.0, 6.0]);
        let band = ThresholdBand::constant(0.0, 10.0).unwrap();
        let b = quantize_banded(&s, &band, 1, Statistic::Mean).unwrap();
        assert_eq!(b.quantized.values(), &[3.0, 3.0, 3.0]);
    }

    #[test]
    fn all_out_of_band_is_identity() {
        let s = series(&[11.0, 12.5, 30.0]);
        let band = ThresholdBand::constant(0.0, 10.0).unwrap();
        let b = quantize_banded(&s, &band, 3, Statistic::Median).unwrap();
        assert_eq!(b.quantized.values(), s.values());
        assert!(b.quantized.exact_mask().iter().all(|&e| e));
        assert!(b.quantized.codebook().is_empty());
        assert_eq!(b.slice_stats, vec![None, None, None]);
    }

    #[test]
    fn band_edges_are_in_band() {
        let s = series(&[0.0, 5.0, 10.0]);
        let band = ThresholdBand::constant(0.0, 10.0).unwrap();
        let b = quantize_banded(&s, &band, 2, Statistic::Median).unwrap();
        // 0 -> slice 0, 5 and 10 -> slice 1
        assert_eq!(b.quantized.values(), &[0.0, 7.5, 7.5]);
        assert!(b.quantized.exact_mask().iter().all(|&e| !e));
    }

    #[test]
    fn invalid_inputs() {
        let s = series(&[1.0, 2.0]);
        let band = ThresholdBand::constant(0.0, 10.0).unwrap();
        assert!(quantize_banded(&s, &band, 0, Statistic::Median).is_err());
        let short = ThresholdBand::dynamic(vec![0.0], vec![1.0]).unwrap();
        assert!(quantize_banded(&s, &short, 2, Statistic::Median).is_err());
        assert!(ThresholdBand::constant(3.0, 3.0).is_err());
        assert!(ThresholdBand::dynamic(vec![0.0, 2.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn dynamic_band_slices_per_timestamp() {
        // band [0,10] then [100,110]; both samples sit in the lower half
        let s = series(&[2.0, 104.0]);
        let band = ThresholdBand::dynamic(vec![0.0, 100.0], vec![10.0, 110.0]).unwrap();
        let b = quantize_banded(&s, &band, 2, Statistic::Mean).unwrap();
        assert_eq!(b.slice_stats, vec![Some(53.0), None]);
        assert_eq!(b.quantized.values(), &[53.0, 53.0]);
    }

    #[test]
    fn pipeline_rate_matches_variability() {
        let s = series(&[1.0, 9.0, 2.0, 3.0, 8.0, 20.0, 4.0, 4.5]);
        let band = ThresholdBand::constant(0.0, 10.0).unwrap();
        let b = quantize_banded(&s, &band, 2, Statistic::Median).unwrap();
        let c = compress(&b.quantized).unwrap();
        let cr = compression_rate(s.len(), c.len()).unwrap();
        assert!((cr - (100.0 - variability(b.quantized.values()).unwrap())).abs() < 1e-9);
    }

    #[test]
    fn rolling_constant_series_is_widened() {
        let s = series(&[5.0; 6]);
        let band = rolling_band(&s, RollingBandConfig::new(3, 0.1, 0.9)).unwrap();
        for k in 0..6 {
            assert_eq!(band.at(k), (5.0, 5.0 + RollingBandConfig::DEFAULT_EPSILON));
        }
    }

    #[test]
    fn rolling_two_sample_window() {
        let s = series(&[1.0, 2.0, 3.0, 4.0]);
        let eps = RollingBandConfig::DEFAULT_EPSILON;
        let band = rolling_band(&s, RollingBandConfig::new(2, 0.0, 1.0)).unwrap();
        let ThresholdBand::Dynamic { lower, upper } = band else { panic!("expected dynamic band") };
        assert_eq!(lower, vec![1.0, 1.0, 2.0, 3.0]);
        assert_eq!(upper, vec![1.0 + eps, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn rolling_full_window_tracks_running_range() {
        let s = series(&[3.0, 1.0, 4.0, 1.5, 9.0]);
        let band = rolling_band(&s, RollingBandConfig::new(5, 0.0, 1.0)).unwrap();
        assert_eq!(band.at(4), (1.0, 9.0));
        assert_eq!(band.at(2), (1.0, 4.0));
    }

    #[test]
    fn rolling_huge_values_still_widen() {
        let s = series(&[1e300, 1e300, 1e300]);
        let band = rolling_band(&s, RollingBandConfig::new(2, 0.2, 0.8)).unwrap();
        let (l, h) = band.at(1);
        assert!(l < h);
    }

    #[test]
    fn rolling_rejects_bad_config() {
        let s = series(&[1.0, 2.0]);
        assert!(rolling_band(&s, RollingBandConfig::new(1, 0.1, 0.9)).is_err());
        assert!(rolling_band(&s, RollingBandConfig::new(3, 0.9, 0.1)).is_err());
        assert!(rolling_band(&s, RollingBandConfig::new(3, 0.5, 0.5)).is_err());
        assert!(rolling_band(&s, RollingBandConfig::new(3, 0.0, 1.5)).is_err());
    }

    #[test]
    fn median_and_mean_stay_in_range() {
        let mut g = vec![f64::MAX, f64::MAX];
        assert_eq!(Statistic::Median.apply(&mut g), f64::MAX);
        let mut g = vec![0.1; 7];
        assert_eq!(Statistic::Mean.apply(&mut g), 0.1);
    }
}
