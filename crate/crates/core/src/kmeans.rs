//! Deterministic Lloyd K-means.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::{squared_distance, PointCloud};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub max_iterations: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig { max_iterations: 100 }
    }
}

/// Centroids plus the index of the nearest centroid for every point.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    dim: usize,
    centroids: Vec<f64>,
    assignment: Vec<usize>,
    iterations: usize,
}

impl Clustering {
    pub fn from_parts(dim: usize, centroids: Vec<f64>, assignment: Vec<usize>) -> Result<Self> {
        if dim == 0 || centroids.is_empty() || !centroids.len().is_multiple_of(dim) {
            return Err(Error::invalid("centroids must be a non-empty multiple of the dimension"));
        }
        let k = centroids.len() / dim;
        if let Some(&bad) = assignment.iter().find(|&&j| j >= k) {
            return Err(Error::invalid(alloc::format!("assignment to missing centroid {bad}")));
        }
        Ok(Clustering { dim, centroids, assignment, iterations: 0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.centroids.len() / self.dim
    }

    pub fn centroid(&self, j: usize) -> &[f64] {
        &self.centroids[j * self.dim..(j + 1) * self.dim]
    }

    pub fn centroids(&self) -> &[f64] {
        &self.centroids
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Lloyd iterations run before convergence or the cap.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &j in &self.assignment {
            sizes[j] += 1;
        }
        sizes
    }

    pub fn members(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment.iter().enumerate().filter(move |(_, &a)| a == j).map(|(i, _)| i)
    }

    pub(crate) fn into_parts(self) -> (usize, Vec<f64>, Vec<usize>) {
        (self.dim, self.centroids, self.assignment)
    }
}

/// Index of the nearest centroid (squared Euclidean), lowest index on ties.
pub(crate) fn nearest_centroid(point: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    centroids
        .chunks_exact(dim)
        .map(|c| squared_distance(point, c))
        .enumerate()
        .fold((0, f64::INFINITY), |best, (j, d)| if d < best.1 { (j, d) } else { best })
}

fn assign(cloud: &PointCloud, centroids: &[f64], out: &mut Vec<usize>) {
    out.clear();
    out.extend(cloud.points().map(|p| nearest_centroid(p, centroids, cloud.dim()).0));
}

/// K-means with the default iteration cap.
pub fn kmeans(cloud: &PointCloud, k: usize, seed: u64) -> Result<Clustering> {
    kmeans_with(cloud, k, seed, &KMeansConfig::default())
}

/// Farthest-point initialization (first point drawn from `seed`), then Lloyd
/// iterations until assignments stop changing or `max_iterations` is hit.
/// A cluster that empties out is moved onto the point farthest from its own
/// centroid. Identical inputs give bit-identical output.
pub fn kmeans_with(cloud: &PointCloud, k: usize, seed: u64, config: &KMeansConfig) -> Result<Clustering> {
    let n = cloud.len();
    let dim = cloud.dim();
    if k == 0 || k > n {
        return Err(Error::invalid(alloc::format!("cluster count {k} outside 1..={n}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..n);
    let mut centroids = Vec::with_capacity(k * dim);
    centroids.extend_from_slice(cloud.point(first));
    let mut min_d2: Vec<f64> = cloud.points().map(|p| squared_distance(p, cloud.point(first))).collect();
    for _ in 1..k {
        let next = argmax(&min_d2);
        let c = cloud.point(next);
        centroids.extend_from_slice(c);
        for (d, p) in min_d2.iter_mut().zip(cloud.points()) {
            *d = d.min(squared_distance(p, c));
        }
    }

    let mut assignment = Vec::with_capacity(n);
    assign(cloud, &centroids, &mut assignment);
    let mut next_assignment = Vec::with_capacity(n);
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        update(cloud, &assignment, k, &mut centroids);
        assign(cloud, &centroids, &mut next_assignment);
        let settled = next_assignment == assignment;
        core::mem::swap(&mut assignment, &mut next_assignment);
        if settled {
            break;
        }
    }
    Ok(Clustering { dim, centroids, assignment, iterations })
}

fn argmax(values: &[f64]) -> usize {
    values.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &d)| if d > best.1 { (i, d) } else { best }).0
}

fn update(cloud: &PointCloud, assignment: &[usize], k: usize, centroids: &mut [f64]) {
    let dim = cloud.dim();
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (p, &j) in cloud.points().zip(assignment) {
        counts[j] += 1;
        for (s, x) in sums[j * dim..(j + 1) * dim].iter_mut().zip(p) {
            *s += x;
        }
    }
    for j in 0..k {
        if counts[j] > 0 {
            let c = counts[j] as f64;
            for (dst, s) in centroids[j * dim..(j + 1) * dim].iter_mut().zip(&sums[j * dim..(j + 1) * dim]) {
                *dst = *s / c;
            }
        }
    }
    let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
    let mut taken = vec![false; cloud.len()];
    for j in empty {
        // distance of every movable point to its current centroid
        let spread: Vec<f64> =
            cloud
                .points()
                .zip(assignment)
                .enumerate()
                .map(|(i, (p, &a))| {
                    if taken[i] || counts[a] < 2 {
                        0.0
                    } else {
                        squared_distance(p, &centroids[a * dim..(a + 1) * dim])
                    }
                })
                .collect();
        let far = argmax(&spread);
        if spread[far] > 0.0 {
            centroids[j * dim..(j + 1) * dim].copy_from_slice(cloud.point(far));
            counts[assignment[far]] -= 1;
            counts[j] = 1;
            taken[far] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::distance;

    fn cloud(points: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_points(points).unwrap()
    }

    fn four() -> PointCloud {
        cloud(&[[0.0, 0.0], [0.0, 1.0], [10.0, 10.0], [10.0, 11.0]])
    }

    #[test]
    fn two_clusters_on_two_pairs() {
        for seed in 0..8 {
            let c = kmeans(&four(), 2, seed).unwrap();
            let mut found: Vec<[f64; 2]> = (0..2).map(|j| [c.centroid(j)[0], c.centroid(j)[1]]).collect();
            found.sort_by(|a, b| a[0].total_cmp(&b[0]));
            assert_eq!(found, vec![[0.0, 0.5], [10.0, 10.5]]);
        }
    }

    #[test]
    fn one_cluster_is_the_mean() {
        let c = kmeans(&four(), 1, 3).unwrap();
        assert_eq!(c.centroid(0), &[5.0, 5.5]);
        assert_eq!(c.assignment(), &[0, 0, 0, 0]);
    }

    #[test]
    fn k_equals_n_is_exact() {
        let p = four();
        let c = kmeans(&p, 4, 11).unwrap();
        for (i, &j) in c.assignment().iter().enumerate() {
            assert_eq!(distance(p.point(i), c.centroid(j)), 0.0);
        }
    }

    #[test]
    fn k_bounds() {
        assert!(kmeans(&four(), 0, 0).is_err());
        assert!(kmeans(&four(), 5, 0).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let p = cloud(&[[0.0, 0.0], [1.0, 3.0], [2.0, -1.0], [7.0, 7.0], [6.0, 8.0], [-3.0, 4.0]]);
        assert_eq!(kmeans(&p, 3, 42).unwrap(), kmeans(&p, 3, 42).unwrap());
    }

    #[test]
    fn duplicates_do_not_panic() {
        let p = cloud(&[[1.0, 1.0]; 5]);
        let c = kmeans(&p, 5, 0).unwrap();
        assert_eq!(c.k(), 5);
        assert!(c.assignment().iter().all(|&j| c.centroid(j) == [1.0, 1.0]));
    }

    #[test]
    fn sizes_and_members() {
        let c = kmeans(&four(), 2, 0).unwrap();
        assert_eq!(c.sizes(), vec![2, 2]);
        assert_eq!(c.members(c.assignment()[0]).collect::<Vec<_>>(), vec![0, 1]);
    }
}
