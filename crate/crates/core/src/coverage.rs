//! Δ-coverage of point clouds.
//!
//! A coverage is a set of centroids such that every encoded point lies within
//! Euclidean distance Δ of the centroid it is coded to. Centroids come from
//! K-means run with K = 1, 2, … until the bound holds. Outliers are kept
//! verbatim instead of forcing K up: either points of unusually small
//! clusters, or points outside every cluster's normalcy circle.

use alloc::vec;
use alloc::vec::Vec;

use crate::cloud::{distance, PointCloud};
use crate::error::{Error, Result};
use crate::kmeans::{kmeans_with, nearest_centroid, Clustering, KMeansConfig};

/// Normalcy radius multiplier used by default (`R_j = 3 · max distance`).
pub const DEFAULT_NORMALCY_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    Centroid(usize),
    /// Stored exactly, no centroid.
    Outlier,
}

impl Assignment {
    pub fn centroid(self) -> Option<usize> {
        match self {
            Assignment::Centroid(j) => Some(j),
            Assignment::Outlier => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    dim: usize,
    centroids: Vec<f64>,
    assignment: Vec<Assignment>,
    delta: f64,
}

impl Coverage {
    /// Structural checks only; the Δ bound needs the original cloud, see
    /// [`Coverage::max_error`].
    pub fn from_parts(dim: usize, centroids: Vec<f64>, assignment: Vec<Assignment>, delta: f64) -> Result<Self> {
        if dim == 0 || centroids.is_empty() || !centroids.len().is_multiple_of(dim) {
            return Err(Error::invalid("coverage needs at least one centroid of the cloud's dimension"));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::invalid("coverage radius must be finite and non-negative"));
        }
        if centroids.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite centroid coordinate"));
        }
        let k = centroids.len() / dim;
        if assignment.iter().any(|a| matches!(a, Assignment::Centroid(j) if *j >= k)) {
            return Err(Error::invalid("assignment to a missing centroid"));
        }
        Ok(Coverage { dim, centroids, assignment, delta })
    }

    /// A one-centroid coverage with no encoded points, for streaming from scratch.
    pub fn seeded(first: &[f64], delta: f64) -> Result<Self> {
        Self::from_parts(first.len(), first.to_vec(), Vec::new(), delta)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of centroids (K).
    pub fn k(&self) -> usize {
        self.centroids.len() / self.dim
    }

    pub fn centroid(&self, j: usize) -> &[f64] {
        &self.centroids[j * self.dim..(j + 1) * self.dim]
    }

    pub fn centroids(&self) -> &[f64] {
        &self.centroids
    }

    pub fn assignment(&self) -> &[Assignment] {
        &self.assignment
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn outliers(&self) -> Vec<usize> {
        self.assignment.iter().enumerate().filter(|(_, a)| **a == Assignment::Outlier).map(|(i, _)| i).collect()
    }

    fn check_cloud(&self, cloud: &PointCloud) -> Result<()> {
        if cloud.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: cloud.dim() });
        }
        if cloud.len() != self.assignment.len() {
            return Err(Error::LengthMismatch { expected: self.assignment.len(), actual: cloud.len() });
        }
        Ok(())
    }

    /// Largest distance from a non-outlier point to its centroid.
    pub fn max_error(&self, cloud: &PointCloud) -> Result<f64> {
        self.check_cloud(cloud)?;
        Ok(cloud
            .points()
            .zip(&self.assignment)
            .filter_map(|(p, a)| a.centroid().map(|j| distance(p, self.centroid(j))))
            .fold(0.0, f64::max))
    }

    /// Codes one new point. Reuses the nearest centroid when it lies within
    /// Δ, otherwise the point becomes a new centroid. Returns the code.
    pub fn encode_streaming(&mut self, point: &[f64]) -> Result<usize> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: point.len() });
        }
        if point.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index: 0 });
        }
        let (j, _) = nearest_centroid(point, &self.centroids, self.dim);
        let code = if distance(point, self.centroid(j)) <= self.delta {
            j
        } else {
            self.centroids.extend_from_slice(point);
            self.k() - 1
        };
        self.assignment.push(Assignment::Centroid(code));
        Ok(code)
    }

    /// Marks as outliers the points lying outside their own cluster's
    /// normalcy circle (radius from that cluster's non-outlier members).
    pub fn with_normalcy(&self, cloud: &PointCloud, factor: f64) -> Result<Coverage> {
        self.check_cloud(cloud)?;
        check_factor(factor)?;
        let radii =
            radii(cloud, self.k(), self.dim, &self.centroids, self.assignment.iter().map(|a| a.centroid()), factor);
        let assignment = cloud
            .points()
            .zip(&self.assignment)
            .map(|(p, &a)| match a {
                Assignment::Centroid(j) if distance(p, self.centroid(j)) <= radii[j].unwrap_or(0.0) => a,
                _ => Assignment::Outlier,
            })
            .collect();
        Ok(Coverage { assignment, ..self.clone() })
    }
}

/// Streaming encode of one point; see [`Coverage::encode_streaming`].
pub fn streaming_encode(point: &[f64], coverage: &mut Coverage) -> Result<usize> {
    coverage.encode_streaming(point)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CoverageOptions {
    pub kmeans: KMeansConfig,
    /// Give up with [`Error::Infeasible`] beyond this many centroids.
    pub max_k: Option<usize>,
    /// K used to look for small clusters; `None` runs a plain Δ-coverage first
    /// and probes at its K.
    pub probe_k: Option<usize>,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::invalid("coverage radius must be finite and non-negative"));
    }
    Ok(())
}

fn check_factor(factor: f64) -> Result<()> {
    if !(factor >= 0.0) || !factor.is_finite() {
        return Err(Error::invalid("normalcy factor must be finite and non-negative"));
    }
    Ok(())
}

fn covers(cloud: &PointCloud, clustering: &Clustering, delta: f64) -> bool {
    cloud.points().zip(clustering.assignment()).all(|(p, &j)| distance(p, clustering.centroid(j)) <= delta)
}

/// Smallest K (found by incremental K-means) whose clustering keeps every
/// point within `delta` of its centroid.
pub fn delta_coverage(cloud: &PointCloud, delta: f64, seed: u64) -> Result<Coverage> {
    delta_coverage_with(cloud, delta, seed, &CoverageOptions::default())
}

pub fn delta_coverage_with(cloud: &PointCloud, delta: f64, seed: u64, options: &CoverageOptions) -> Result<Coverage> {
    check_delta(delta)?;
    let top = options.max_k.map_or(cloud.len(), |m| m.min(cloud.len()));
    for k in 1..=top {
        let clustering = kmeans_with(cloud, k, seed, &options.kmeans)?;
        if covers(cloud, &clustering, delta) {
            let (dim, centroids, assignment) = clustering.into_parts();
            let assignment = assignment.into_iter().map(Assignment::Centroid).collect();
            return Ok(Coverage { dim, centroids, assignment, delta });
        }
    }
    Err(Error::Infeasible(alloc::format!("no Δ-coverage with at most {top} centroids")))
}

/// Points in clusters holding less than `min_fraction` of all points.
pub fn small_cluster_outliers(clustering: &Clustering, min_fraction: f64) -> Result<Vec<usize>> {
    if !(min_fraction > 0.0 && min_fraction < 1.0) {
        return Err(Error::invalid("minimum cluster fraction must lie in (0, 1)"));
    }
    let n = clustering.assignment().len() as f64;
    let sizes = clustering.sizes();
    Ok(clustering
        .assignment()
        .iter()
        .enumerate()
        .filter(|(_, &j)| (sizes[j] as f64) / n < min_fraction)
        .map(|(i, _)| i)
        .collect())
}

/// Keeps small-cluster outliers exact and Δ-covers the rest. The returned K
/// counts the centroids of the non-outlier coverage only.
pub fn outlier_delta_coverage(cloud: &PointCloud, delta: f64, min_fraction: f64, seed: u64) -> Result<Coverage> {
    outlier_delta_coverage_with(cloud, delta, min_fraction, seed, &CoverageOptions::default())
}

pub fn outlier_delta_coverage_with(
    cloud: &PointCloud,
    delta: f64,
    min_fraction: f64,
    seed: u64,
    options: &CoverageOptions,
) -> Result<Coverage> {
    check_delta(delta)?;
    if !(min_fraction > 0.0 && min_fraction < 1.0) {
        return Err(Error::invalid("minimum cluster fraction must lie in (0, 1)"));
    }
    let probe_k = match options.probe_k {
        Some(k) => k,
        None => delta_coverage_with(cloud, delta, seed, options)?.k(),
    };
    let probe = kmeans_with(cloud, probe_k, seed, &options.kmeans)?;
    let mut outliers = small_cluster_outliers(&probe, min_fraction)?;
    if outliers.len() == cloud.len() {
        // every cluster is small: keep the largest one as the normal population
        let sizes = probe.sizes();
        let largest = (0..sizes.len()).fold(0, |best, j| if sizes[j] > sizes[best] { j } else { best });
        outliers.retain(|&i| probe.assignment()[i] != largest);
    }
    if outliers.is_empty() {
        return delta_coverage_with(cloud, delta, seed, options);
    }
    let mut is_outlier = vec![false; cloud.len()];
    outliers.iter().for_each(|&i| is_outlier[i] = true);
    let normal: Vec<usize> = (0..cloud.len()).filter(|&i| !is_outlier[i]).collect();
    let inner = delta_coverage_with(&cloud.select(&normal)?, delta, seed, options)?;
    let mut assignment = vec![Assignment::Outlier; cloud.len()];
    for (&i, &a) in normal.iter().zip(inner.assignment()) {
        assignment[i] = a;
    }
    Ok(Coverage { assignment, ..inner })
}

/// Small-cluster outliers first, then normalcy circles on the remaining
/// clusters.
pub fn combined_coverage(
    cloud: &PointCloud,
    delta: f64,
    min_fraction: f64,
    factor: f64,
    seed: u64,
    options: &CoverageOptions,
) -> Result<Coverage> {
    outlier_delta_coverage_with(cloud, delta, min_fraction, seed, options)?.with_normalcy(cloud, factor)
}

/// Non-outlier points collapse onto their centroids; outliers pass through.
pub fn encode(cloud: &PointCloud, coverage: &Coverage) -> Result<PointCloud> {
    coverage.check_cloud(cloud)?;
    let mut coords = Vec::with_capacity(cloud.coords().len());
    for (p, a) in cloud.points().zip(coverage.assignment()) {
        match a {
            Assignment::Centroid(j) => coords.extend_from_slice(coverage.centroid(*j)),
            Assignment::Outlier => coords.extend_from_slice(p),
        }
    }
    PointCloud::new(cloud.dim(), coords)
}

/// `factor · max_k ‖p_k − centroid‖` over the cluster's points.
pub fn normalcy_radius<'p, I>(points: I, centroid: &[f64], factor: f64) -> Result<f64>
where
    I: IntoIterator<Item = &'p [f64]>,
{
    check_factor(factor)?;
    let mut seen = false;
    let mut max = 0.0f64;
    for p in points {
        if p.len() != centroid.len() {
            return Err(Error::DimensionMismatch { expected: centroid.len(), actual: p.len() });
        }
        seen = true;
        max = max.max(distance(p, centroid));
    }
    if !seen {
        return Err(Error::invalid("normalcy radius of an empty cluster"));
    }
    Ok(factor * max)
}

fn radii(
    cloud: &PointCloud,
    k: usize,
    dim: usize,
    centroids: &[f64],
    membership: impl Iterator<Item = Option<usize>>,
    factor: f64,
) -> Vec<Option<f64>> {
    let mut max = vec![None::<f64>; k];
    for (p, j) in cloud.points().zip(membership) {
        if let Some(j) = j {
            let d = distance(p, &centroids[j * dim..(j + 1) * dim]);
            max[j] = Some(max[j].map_or(d, |m| m.max(d)));
        }
    }
    max.into_iter().map(|m| m.map(|m| factor * m)).collect()
}

/// Centroids with their normalcy circles.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalcyModel {
    dim: usize,
    centroids: Vec<f64>,
    /// `None` for a cluster without members (no circle).
    radii: Vec<Option<f64>>,
}

impl NormalcyModel {
    /// Circles of radius `factor · max member distance` around each centroid
    /// of a clustering fitted on `cloud`.
    pub fn fit(cloud: &PointCloud, clustering: &Clustering, factor: f64) -> Result<Self> {
        if cloud.dim() != clustering.dim() {
            return Err(Error::DimensionMismatch { expected: clustering.dim(), actual: cloud.dim() });
        }
        if cloud.len() != clustering.assignment().len() {
            return Err(Error::LengthMismatch { expected: clustering.assignment().len(), actual: cloud.len() });
        }
        check_factor(factor)?;
        let radii = radii(
            cloud,
            clustering.k(),
            clustering.dim(),
            clustering.centroids(),
            clustering.assignment().iter().map(|&j| Some(j)),
            factor,
        );
        Ok(NormalcyModel { dim: clustering.dim(), centroids: clustering.centroids().to_vec(), radii })
    }

    pub fn radius(&self, j: usize) -> Option<f64> {
        self.radii[j]
    }

    /// Code for one point: the nearest centroid whose circle contains it, or
    /// `None` when it lies outside every circle.
    pub fn classify(&self, point: &[f64]) -> Option<usize> {
        self.centroids
            .chunks_exact(self.dim)
            .enumerate()
            .filter_map(|(j, c)| {
                let d = distance(point, c);
                self.radii[j].filter(|&r| d <= r).map(|_| (j, d))
            })
            .fold(None, |best: Option<(usize, f64)>, (j, d)| match best {
                Some((_, bd)) if bd <= d => best,
                _ => Some((j, d)),
            })
            .map(|(j, _)| j)
    }

    /// Points inside some circle become that centroid; the rest pass
    /// through exactly.
    pub fn encode(&self, cloud: &PointCloud) -> Result<PointCloud> {
        if cloud.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: cloud.dim() });
        }
        let mut coords = Vec::with_capacity(cloud.coords().len());
        for p in cloud.points() {
            match self.classify(p) {
                Some(j) => coords.extend_from_slice(&self.centroids[j * self.dim..(j + 1) * self.dim]),
                None => coords.extend_from_slice(p),
            }
        }
        PointCloud::new(cloud.dim(), coords)
    }
}

/// [`NormalcyModel::fit`] followed by [`NormalcyModel::encode`] on the same cloud.
pub fn encode_with_normalcy(cloud: &PointCloud, clustering: &Clustering, factor: f64) -> Result<PointCloud> {
    NormalcyModel::fit(cloud, clustering, factor)?.encode(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmeans::kmeans;
    use crate::metrics::{relative_cloud_error, CloudMode};

    fn cloud(points: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_points(points).unwrap()
    }

    fn four() -> PointCloud {
        cloud(&[[0.0, 0.0], [0.0, 1.0], [10.0, 10.0], [10.0, 11.0]])
    }

    #[test]
    fn four_points_need_two_centroids() {
        let p = four();
        let c = delta_coverage(&p, 1.0, 7).unwrap();
        assert_eq!(c.k(), 2);
        assert_eq!(c.max_error(&p).unwrap(), 0.5);
        assert!(c.outliers().is_empty());
    }

    #[test]
    fn zero_delta_counts_distinct_points() {
        let p = cloud(&[[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [2.0, 2.0], [1.0, 0.0]]);
        assert_eq!(delta_coverage(&p, 0.0, 1).unwrap().k(), 3);
    }

    #[test]
    fn large_delta_needs_one_centroid() {
        let p = four();
        let mean = p.mean();
        let reach = p.points().map(|q| distance(q, &mean)).fold(0.0, f64::max);
        assert_eq!(delta_coverage(&p, reach, 0).unwrap().k(), 1);
    }

    #[test]
    fn negative_delta_rejected() {
        assert!(delta_coverage(&four(), -1.0, 0).is_err());
        assert!(delta_coverage(&four(), f64::NAN, 0).is_err());
    }

    #[test]
    fn max_k_cap_is_infeasible() {
        let opts = CoverageOptions { max_k: Some(1), ..Default::default() };
        assert!(matches!(delta_coverage_with(&four(), 1.0, 0, &opts), Err(Error::Infeasible(_))));
    }

    #[test]
    fn encode_examples() {
        let p = four();
        let full = delta_coverage(&p, 0.0, 0).unwrap();
        assert_eq!(encode(&p, &full).unwrap(), p);

        let all_out = Coverage::from_parts(2, vec![0.0, 0.0], vec![Assignment::Outlier; 4], 0.0).unwrap();
        assert_eq!(encode(&p, &all_out).unwrap(), p);

        let pair = cloud(&[[0.0, 0.0], [0.0, 1.0]]);
        let one = delta_coverage(&pair, 10.0, 0).unwrap();
        assert_eq!(encode(&pair, &one).unwrap(), cloud(&[[0.0, 0.5], [0.0, 0.5]]));

        let other = cloud(&[[0.0, 0.0]]);
        assert!(encode(&other, &one).is_err());
    }

    #[test]
    fn streaming_examples() {
        let mut c = Coverage::seeded(&[0.0, 0.0], 1.0).unwrap();
        assert_eq!(c.encode_streaming(&[0.0, 0.0]).unwrap(), 0);
        assert_eq!(c.encode_streaming(&[0.0, 0.5]).unwrap(), 0);
        assert_eq!(c.k(), 1);
        assert_eq!(c.encode_streaming(&[5.0, 5.0]).unwrap(), 1);
        assert_eq!(c.k(), 2);
        assert_eq!(c.centroid(1), &[5.0, 5.0]);
        assert!(c.encode_streaming(&[1.0]).is_err());
        assert_eq!(streaming_encode(&[5.0, 5.5], &mut c).unwrap(), 1);
    }

    #[test]
    fn small_cluster_examples() {
        let mut pts: Vec<[f64; 2]> = (0..96).map(|i| [(i % 12) as f64 * 0.1, (i / 12) as f64 * 0.1]).collect();
        pts.extend([[50.0, 50.0], [50.1, 50.0], [50.0, 50.1], [50.1, 50.1]]);
        let p = cloud(&pts);
        let c = kmeans(&p, 2, 0).unwrap();
        assert_eq!(c.sizes().iter().copied().min(), Some(4));
        assert_eq!(small_cluster_outliers(&c, 0.05).unwrap(), vec![96, 97, 98, 99]);

        let eq = kmeans(&four(), 2, 0).unwrap();
        assert!(small_cluster_outliers(&eq, 0.4).unwrap().is_empty());

        let single = kmeans(&four(), 1, 0).unwrap();
        assert!(small_cluster_outliers(&single, 0.99).unwrap().is_empty());

        assert!(small_cluster_outliers(&single, 0.0).is_err());
        assert!(small_cluster_outliers(&single, 1.0).is_err());
    }

    fn blob_and_far_point() -> PointCloud {
        let mut pts: Vec<[f64; 2]> = (0..19).map(|i| [(i % 5) as f64 * 0.1, (i / 5) as f64 * 0.1]).collect();
        pts.push([100.0, 100.0]);
        cloud(&pts)
    }

    #[test]
    fn outlier_coverage_drops_the_far_point() {
        let p = blob_and_far_point();
        let plain = delta_coverage(&p, 0.5, 3).unwrap();
        assert_eq!(plain.k(), 2);
        let c = outlier_delta_coverage(&p, 0.5, 0.1, 3).unwrap();
        assert_eq!(c.k(), 1);
        assert_eq!(c.outliers(), vec![19]);
        let enc = encode(&p, &c).unwrap();
        assert_eq!(enc.point(19), p.point(19));
        assert!(c.max_error(&p).unwrap() <= 0.5);
    }

    #[test]
    fn outlier_coverage_without_small_clusters_matches_plain() {
        let p = four();
        assert_eq!(outlier_delta_coverage(&p, 1.0, 0.1, 5).unwrap(), delta_coverage(&p, 1.0, 5).unwrap());
    }

    #[test]
    fn outlier_coverage_scattered_points() {
        let p = cloud(&[[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0], [20.0, 20.0]]);
        let c = outlier_delta_coverage(&p, 1.0, 0.01, 0).unwrap();
        assert_eq!(c.k(), 5);
        assert!(c.outliers().is_empty());
    }

    #[test]
    fn outlier_coverage_never_marks_everything() {
        let p = four();
        let opts = CoverageOptions { probe_k: Some(2), ..Default::default() };
        let c = outlier_delta_coverage_with(&p, 1.0, 0.9, 0, &opts).unwrap();
        assert_eq!(c.outliers().len(), 2);
        assert_eq!(c.k(), 1);
    }

    #[test]
    fn normalcy_radius_examples() {
        let pts: [&[f64]; 2] = [&[0.0, 0.0], &[0.0, 1.0]];
        assert_eq!(normalcy_radius(pts, &[0.0, 0.5], DEFAULT_NORMALCY_FACTOR).unwrap(), 1.5);
        assert_eq!(normalcy_radius(pts, &[0.0, 0.5], 1.0).unwrap(), 0.5);
        let single: [&[f64]; 1] = [&[2.0, 2.0]];
        assert_eq!(normalcy_radius(single, &[2.0, 2.0], 3.0).unwrap(), 0.0);
        let none: [&[f64]; 0] = [];
        assert!(normalcy_radius(none, &[0.0, 0.0], 3.0).is_err());
    }

    #[test]
    fn normalcy_large_factor_matches_encode() {
        let p = four();
        let k = kmeans(&p, 2, 0).unwrap();
        let cov = delta_coverage(&p, 1.0, 0).unwrap();
        assert_eq!(encode_with_normalcy(&p, &k, 1e6).unwrap(), encode(&p, &cov).unwrap());
    }

    #[test]
    fn normalcy_zero_factor_preserves_off_centroid_points() {
        let p = cloud(&[[0.0, 0.0], [0.0, 1.0], [0.0, 0.5], [9.0, 9.0]]);
        let k = kmeans(&p, 2, 0).unwrap();
        let enc = encode_with_normalcy(&p, &k, 0.0).unwrap();
        assert_eq!(enc, p);
    }

    #[test]
    fn normalcy_preserves_distant_point() {
        let mut pts: Vec<[f64; 2]> = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [10.0, 10.0], [10.0, 11.0], [11.0, 10.0]];
        let base = cloud(&pts);
        let k = kmeans(&base, 2, 0).unwrap();
        let model = NormalcyModel::fit(&base, &k, 3.0).unwrap();
        pts.push([40.0, -30.0]);
        let full = cloud(&pts);
        let enc = model.encode(&full).unwrap();
        assert_eq!(enc.point(6), &[40.0, -30.0]);
        assert_ne!(enc.point(0), full.point(0));
    }

    #[test]
    fn with_normalcy_keeps_delta_bound() {
        let p = blob_and_far_point();
        let cov = delta_coverage(&p, 0.5, 1).unwrap();
        let tight = cov.with_normalcy(&p, 0.5).unwrap();
        assert!(!tight.outliers().is_empty());
        assert!(tight.max_error(&p).unwrap() <= 0.5);
        let combined = combined_coverage(&p, 0.5, 0.1, 3.0, 1, &CoverageOptions::default()).unwrap();
        assert_eq!(combined.outliers(), vec![19]);
    }

    #[test]
    fn relative_error_bounded_by_delta() {
        let p = four();
        let cov = delta_coverage(&p, 1.0, 0).unwrap();
        let max_norm = p.points().map(crate::cloud::norm).fold(0.0, f64::max);
        let err = relative_cloud_error(&p, &encode(&p, &cov).unwrap(), CloudMode::Max).unwrap();
        assert!(err <= 1.0 / max_norm);
    }
}
