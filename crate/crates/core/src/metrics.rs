//! Scalar quality measures: ℓ1 loss, compression rate, variability (VarM),
//! and the paired-cloud distances d1/d2 with their relative forms ℓmax/ℓ2.

use crate::cloud::{distance, norm, PointCloud};
use crate::error::{Error, Result};
use crate::series::{QuantizedSeries, TimeSeries};

/// VarM at or below this percentage marks a low-variability metric.
pub const LOW_VARIABILITY_MAX: f64 = 50.0;

/// Mean absolute error between the original and quantized values.
pub fn l1_loss(original: &TimeSeries, quantized: &QuantizedSeries) -> Result<f64> {
    l1_distance(original.values(), quantized.values())
}

/// `(1/N) Σ |a_k − b_k|` over two equally long value sequences.
pub fn l1_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), actual: b.len() });
    }
    if a.is_empty() {
        return Err(Error::invalid("l1 loss of empty sequences"));
    }
    let total: f64 = a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).sum();
    Ok(total / a.len() as f64)
}

/// `100 · (N − M) / N`.
pub fn compression_rate(n_original: usize, m_compressed: usize) -> Result<f64> {
    if n_original == 0 {
        return Err(Error::invalid("compression rate of an empty series"));
    }
    if m_compressed > n_original {
        return Err(Error::invalid("compressed length exceeds original length"));
    }
    Ok(100.0 * (n_original - m_compressed) as f64 / n_original as f64)
}

/// Number of nonzero consecutive differences.
pub(crate) fn jump_count(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] - w[0] != 0.0).count()
}

/// Percentage of jumps: `100 · (#nonzero consecutive differences + 1) / N`.
///
/// A constant series of length N scores `100 / N`, not zero.
pub fn variability(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("variability of an empty series"));
    }
    Ok(100.0 * (jump_count(values) + 1) as f64 / values.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum VariabilityClass {
    Low,
    High,
}

impl VariabilityClass {
    pub fn of(varm_percent: f64) -> Self {
        if varm_percent <= LOW_VARIABILITY_MAX {
            VariabilityClass::Low
        } else {
            VariabilityClass::High
        }
    }
}

/// Reduction of paired per-point distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudMode {
    /// d1: the largest paired distance.
    Max,
    /// d2: the mean paired distance.
    Mean,
}

fn check_paired(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), actual: b.len() });
    }
    Ok(())
}

fn reduce(it: impl Iterator<Item = f64>, len: usize, mode: CloudMode) -> f64 {
    let (sum, max) = it.fold((0.0f64, 0.0f64), |(s, m), d| (s + d, m.max(d)));
    match mode {
        CloudMode::Max => max,
        // rounding in the sum must not push the mean above the max
        CloudMode::Mean => (sum / len as f64).min(max),
    }
}

/// Max (d1) or mean (d2) Euclidean distance between paired points.
pub fn cloud_distance(a: &PointCloud, b: &PointCloud, mode: CloudMode) -> Result<f64> {
    check_paired(a, b)?;
    Ok(reduce(a.points().zip(b.points()).map(|(p, q)| distance(p, q)), a.len(), mode))
}

/// ℓmax = d1 / max‖m_k‖ or ℓ2 = d2 / mean‖m_k‖, norms of the original points.
pub fn relative_cloud_error(original: &PointCloud, encoded: &PointCloud, mode: CloudMode) -> Result<f64> {
    let d = cloud_distance(original, encoded, mode)?;
    let scale = reduce(original.points().map(norm), original.len(), mode);
    if scale == 0.0 {
        return Err(Error::DivisionByZero("original cloud has zero norm"));
    }
    Ok(d / scale)
}

/// Distortion summary of one 1-D compression run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DistortionReport {
    pub n_original: usize,
    pub m_compressed: usize,
    pub l1: f64,
    /// ℓ1 divided by |mean| of the original, or plain ℓ1 when that mean is 0.
    pub relative_l1: f64,
    /// False when `relative_l1` could not be normalized.
    pub relative_l1_normalized: bool,
    pub cr_percent: f64,
    pub varm_original: f64,
    pub varm_quantized: f64,
}

impl DistortionReport {
    pub fn compute(original: &[f64], quantized: &[f64], m_compressed: usize) -> Result<Self> {
        let l1 = l1_distance(original, quantized)?;
        let n = original.len();
        let mean = original.iter().sum::<f64>() / n as f64;
        let (relative_l1, relative_l1_normalized) =
            if mean == 0.0 { (l1, false) } else { (l1 / libm::fabs(mean), true) };
        Ok(DistortionReport {
            n_original: n,
            m_compressed,
            l1,
            relative_l1,
            relative_l1_normalized,
            cr_percent: compression_rate(n, m_compressed)?,
            varm_original: variability(original)?,
            varm_quantized: variability(quantized)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Codebook;
    use alloc::vec;

    fn quantized(values: &[f64]) -> QuantizedSeries {
        let book = Codebook::from_unsorted(values.to_vec()).unwrap();
        let ts = (0..values.len() as i64).collect();
        QuantizedSeries::new(ts, values.to_vec(), book, vec![false; values.len()]).unwrap()
    }

    #[test]
    fn l1_examples() {
        let x = TimeSeries::from_values(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(l1_loss(&x, &quantized(&[1.0, 2.0, 3.0])).unwrap(), 0.0);
        let x = TimeSeries::from_values(vec![0.0, 10.0]).unwrap();
        assert_eq!(l1_loss(&x, &quantized(&[1.0, 9.0])).unwrap(), 1.0);
        let x = TimeSeries::from_values(vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(l1_loss(&x, &quantized(&[2.0, 2.0, 2.0])).unwrap(), 1.0);
    }

    #[test]
    fn l1_length_mismatch() {
        let x = TimeSeries::from_values(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(l1_loss(&x, &quantized(&[1.0])), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn compression_rate_examples() {
        assert_eq!(compression_rate(10, 4).unwrap(), 60.0);
        assert_eq!(compression_rate(7, 7).unwrap(), 0.0);
        assert!((compression_rate(1000, 14).unwrap() - 98.6).abs() < 1e-12);
        assert!(compression_rate(3, 4).is_err());
        assert!(compression_rate(0, 0).is_err());
    }

    #[test]
    fn variability_examples() {
        assert_eq!(variability(&[1.0, 2.0, 3.0]).unwrap(), 100.0);
        assert_eq!(variability(&[1.0, 1.0, 2.0, 2.0]).unwrap(), 50.0);
        assert_eq!(variability(&[5.0; 5]).unwrap(), 20.0);
        assert_eq!(variability(&[5.0]).unwrap(), 100.0);
        assert!(variability(&[]).is_err());
        assert_eq!(VariabilityClass::of(50.0), VariabilityClass::Low);
        assert_eq!(VariabilityClass::of(50.1), VariabilityClass::High);
    }

    fn cloud(points: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_points(points).unwrap()
    }

    #[test]
    fn cloud_distance_examples() {
        let a = cloud(&[[0.0, 0.0], [0.0, 0.0]]);
        let b = cloud(&[[3.0, 4.0], [0.0, 0.0]]);
        assert_eq!(cloud_distance(&a, &a, CloudMode::Max).unwrap(), 0.0);
        assert_eq!(cloud_distance(&a, &b, CloudMode::Max).unwrap(), 5.0);
        assert_eq!(cloud_distance(&a, &b, CloudMode::Mean).unwrap(), 2.5);
        let c = cloud(&[[0.0, 0.0]]);
        assert!(cloud_distance(&a, &c, CloudMode::Max).is_err());
    }

    #[test]
    fn relative_error_examples() {
        let a = cloud(&[[3.0, 4.0], [6.0, 8.0]]);
        assert_eq!(relative_cloud_error(&a, &a, CloudMode::Max).unwrap(), 0.0);
        let o = cloud(&[[3.0, 4.0]]);
        let z = cloud(&[[0.0, 0.0]]);
        assert_eq!(relative_cloud_error(&o, &z, CloudMode::Max).unwrap(), 1.0);
        // shifted by (0, 1): d1 = 1, max norm = 10
        let shifted = cloud(&[[3.0, 5.0], [6.0, 9.0]]);
        assert_eq!(relative_cloud_error(&a, &shifted, CloudMode::Max).unwrap(), 0.1);
        assert!(matches!(relative_cloud_error(&z, &o, CloudMode::Max), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn report_zero_mean_is_flagged() {
        let r = DistortionReport::compute(&[-1.0, 1.0], &[0.0, 0.0], 1).unwrap();
        assert_eq!(r.l1, 1.0);
        assert!(!r.relative_l1_normalized);
        assert_eq!(r.relative_l1, 1.0);
        assert_eq!(r.cr_percent, 50.0);
        let r = DistortionReport::compute(&[2.0, 4.0], &[3.0, 3.0], 1).unwrap();
        assert!(r.relative_l1_normalized);
        assert_eq!(r.relative_l1, 1.0 / 3.0);
    }
}
