//! Lossy quantization and compression of monitoring time series.
//!
//! Three families of compressors live here:
//!
//! * [`quantile`]: an ℓ1-optimal codebook of data-valued levels, fitted exactly
//!   by dynamic programming, plus the two constrained set-ups (maximize the
//!   compression rate under a loss bound, or minimize the loss under a rate
//!   floor).
//! * [`banded`]: importance-banded quantization. Samples outside a threshold
//!   band are kept exactly, in-band samples collapse onto per-slice medians or
//!   means.
//! * [`coverage`]: Δ-coverage of multi-dimensional point clouds by
//!   incremental K-means, with streaming encoding and outlier handling.
//!
//! Both 1-D families finish with [`compress::compress`], which drops
//! sequential duplicates and keeps change-points only.
//!
//! ```
//! use tsq_core::{compress, optimize_max_cr, quantize, TimeSeries};
//!
//! let series = TimeSeries::new(vec![0, 1000, 2000, 3000], vec![1.0, 2.0, 8.0, 9.0])?;
//! let best = optimize_max_cr(&series, 0.5)?;
//! let quantized = quantize(&series, &best.codebook)?;
//! assert_eq!(compress(&quantized)?.points(), &[(0, 1.0), (2000, 8.0)]);
//! # Ok::<(), tsq_core::Error>(())
//! ```
//!
//! The crate is `no_std` and only needs `alloc`. File formats, CSV ingestion
//! and the command line live in the `tsq` crate.

#![no_std]
// Range checks are written as `!(a < b)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod banded;
pub mod cloud;
pub mod compress;
pub mod coverage;
pub mod error;
pub mod kmeans;
pub mod metrics;
pub mod quantile;
pub mod series;

pub use banded::{
    quantize_banded, rolling_band, slice_boundaries, BandedQuantization, RollingBandConfig, Statistic, ThresholdBand,
};
pub use cloud::PointCloud;
pub use compress::{compress, compress_values, decompress};
pub use coverage::{
    combined_coverage, delta_coverage, delta_coverage_with, encode, encode_with_normalcy, normalcy_radius,
    outlier_delta_coverage, outlier_delta_coverage_with, small_cluster_outliers, streaming_encode, Assignment,
    Coverage, CoverageOptions, NormalcyModel,
};
pub use error::{Error, Result};
pub use kmeans::{kmeans, kmeans_with, Clustering, KMeansConfig};
pub use metrics::{
    cloud_distance, compression_rate, l1_distance, l1_loss, relative_cloud_error, variability, CloudMode,
    DistortionReport, VariabilityClass,
};
pub use quantile::{
    fit_codebook, optimize_max_cr, optimize_max_cr_capped, optimize_min_loss, optimize_min_loss_capped, quantize,
    OptimizationResult, QuantileFit, QuantileFitter,
};
pub use series::{nearest_level, Codebook, CompressedSeries, QuantizedSeries, TimeSeries, Timestamp};
