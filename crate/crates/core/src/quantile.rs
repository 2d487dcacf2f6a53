//! Quantile quantization: an ℓ1-optimal codebook of data-valued levels and
//! the two constrained set-ups built on it.
//!
//! For a level set `l_1 < … < l_n` drawn from the sorted distinct values
//! `v_0 < … < v_{V−1}`, the nearest-level cost splits into a left tail (points
//! below `l_1`), one gap term per adjacent pair of levels, and a right tail.
//! Suffix layers
//!
//! ```text
//! layer[0][a] = right_tail(a)
//! layer[c][a] = min_{b > a} gap(a, b) + layer[c − 1][b]
//! ```
//!
//! give the optimum for `n` levels as `min_a left_tail(a) + layer[n − 1][a]`.
//! The layers do not depend on `n`, so a scan over `n` computes each once.
//! The gap cost satisfies the quadrangle inequality, which makes the leftmost
//! minimizing `b` monotone in `a`; each layer is filled by divide and conquer
//! in `O(V log² V)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::compress::compress;
use crate::error::{Error, Result};
use crate::metrics::{compression_rate, jump_count, l1_loss};
use crate::series::{nearest_level, Codebook, QuantizedSeries, TimeSeries};

/// Replaces every value with its nearest codebook level.
pub fn quantize(series: &TimeSeries, codebook: &Codebook) -> Result<QuantizedSeries> {
    let values = series.values().iter().map(|&v| nearest_level(v, codebook)).collect::<Result<Vec<_>>>()?;
    QuantizedSeries::new(series.timestamps().to_vec(), values, codebook.clone(), vec![false; series.len()])
}

/// An optimal codebook together with its realized ℓ1 loss.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFit {
    pub codebook: Codebook,
    /// `l1_loss(series, quantize(series, codebook))`, computed directly.
    pub l1: f64,
}

/// Fits the ℓ1-optimal `n`-level codebook whose levels are data values.
pub fn fit_codebook(series: &TimeSeries, n: usize) -> Result<QuantileFit> {
    QuantileFitter::new(series).fit(n)
}

/// Reusable DP state for fitting many codebook sizes on one series.
#[derive(Debug, Clone)]
pub struct QuantileFitter<'a> {
    series: &'a TimeSeries,
    /// sorted distinct values
    values: Vec<f64>,
    /// `weights[i]` = number of samples in `values[..i]`
    weights: Vec<f64>,
    /// `sums[i]` = sum of samples in `values[..i]`
    sums: Vec<f64>,
    layers: Vec<Vec<f64>>,
}

impl<'a> QuantileFitter<'a> {
    pub fn new(series: &'a TimeSeries) -> Self {
        let mut sorted = series.values().to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut values = Vec::new();
        let mut counts: Vec<f64> = Vec::new();
        for v in sorted {
            match values.last() {
                Some(&last) if last == v => *counts.last_mut().unwrap() += 1.0,
                _ => {
                    values.push(v);
                    counts.push(1.0);
                }
            }
        }
        let mut weights = Vec::with_capacity(values.len() + 1);
        let mut sums = Vec::with_capacity(values.len() + 1);
        let (mut w, mut s) = (0.0, 0.0);
        weights.push(w);
        sums.push(s);
        for (&v, &c) in values.iter().zip(&counts) {
            w += c;
            s += c * v;
            weights.push(w);
            sums.push(s);
        }
        QuantileFitter { series, values, weights, sums, layers: Vec::new() }
    }

    /// Number of distinct values, the largest admissible codebook size.
    pub fn distinct(&self) -> usize {
        self.values.len()
    }

    pub fn series(&self) -> &TimeSeries {
        self.series
    }

    fn left_tail(&self, a: usize) -> f64 {
        self.values[a] * self.weights[a] - self.sums[a]
    }

    fn right_tail(&self, a: usize) -> f64 {
        let v = self.values.len();
        (self.sums[v] - self.sums[a + 1]) - self.values[a] * (self.weights[v] - self.weights[a + 1])
    }

    /// Cost of the samples strictly between levels `a < b`, each sent to the
    /// nearer level (ties low, matching [`nearest_level`]).
    fn gap(&self, a: usize, b: usize) -> f64 {
        let (va, vb) = (self.values[a], self.values[b]);
        let split = a + 1 + self.values[a + 1..b].partition_point(|&x| x - va <= vb - x);
        let low = (self.sums[split] - self.sums[a + 1]) - va * (self.weights[split] - self.weights[a + 1]);
        let high = vb * (self.weights[b] - self.weights[split]) - (self.sums[b] - self.sums[split]);
        low + high
    }

    fn ensure_layers(&mut self, count: usize) {
        let v = self.values.len();
        while self.layers.len() < count {
            let c = self.layers.len();
            let layer = if c == 0 {
                (0..v).map(|a| self.right_tail(a)).collect()
            } else {
                let mut layer = vec![f64::INFINITY; v];
                // a needs c more levels strictly to its right
                if v > c {
                    self.fill_layer(c, &mut layer, 0, v - 1 - c, 1, v - c);
                }
                layer
            };
            self.layers.push(layer);
        }
    }

    /// Divide and conquer over `a ∈ [a_lo, a_hi]` with the optimal `b`
    /// known to lie in `[b_lo, b_hi]`.
    fn fill_layer(&self, c: usize, layer: &mut [f64], a_lo: usize, a_hi: usize, b_lo: usize, b_hi: usize) {
        let prev = &self.layers[c - 1];
        let mut stack = vec![(a_lo, a_hi, b_lo, b_hi)];
        while let Some((a_lo, a_hi, b_lo, b_hi)) = stack.pop() {
            let a = a_lo + (a_hi - a_lo) / 2;
            let mut best = f64::INFINITY;
            let mut best_b = b_lo.max(a + 1);
            #[allow(clippy::needless_range_loop)]
            for b in b_lo.max(a + 1)..=b_hi {
                let cost = self.gap(a, b) + prev[b];
                if cost < best {
                    best = cost;
                    best_b = b;
                }
            }
            layer[a] = best;
            if a > a_lo {
                stack.push((a_lo, a - 1, b_lo, best_b));
            }
            if a < a_hi {
                stack.push((a + 1, a_hi, best_b, b_hi));
            }
        }
    }

    /// Optimal `n`-level codebook; ties go to the lexicographically smallest
    /// level sequence.
    pub fn fit(&mut self, n: usize) -> Result<QuantileFit> {
        let v = self.values.len();
        if n == 0 || n > v {
            return Err(Error::invalid(alloc::format!("codebook size {n} outside 1..={v} (distinct values)")));
        }
        self.ensure_layers(n);
        let total = |a: usize| self.left_tail(a) + self.layers[n - 1][a];
        let best = (0..=v - n).map(total).fold(f64::INFINITY, f64::min);
        let mut a = (0..=v - n).find(|&a| total(a) == best).expect("minimum is attained");
        let mut picks = Vec::with_capacity(n);
        picks.push(a);
        for c in (1..n).rev() {
            let target = self.layers[c][a];
            let prev = &self.layers[c - 1];
            a = (a + 1..=v - c).find(|&b| self.gap(a, b) + prev[b] == target).expect("layer value is attained");
            picks.push(a);
        }
        let codebook = Codebook::new(picks.into_iter().map(|i| self.values[i]).collect())?;
        let l1 = l1_loss(self.series, &quantize(self.series, &codebook)?)?;
        Ok(QuantileFit { codebook, l1 })
    }
}

/// Outcome of a constrained codebook-size search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub codebook: Codebook,
    pub n: usize,
    pub l1: f64,
    /// Change-points left after duplicate elimination (M).
    pub m_compressed: usize,
    pub cr_percent: f64,
    pub feasible: bool,
}

struct Candidate {
    fit: QuantileFit,
    n: usize,
    m: usize,
    cr: f64,
}

impl Candidate {
    fn into_result(self, feasible: bool) -> OptimizationResult {
        OptimizationResult {
            codebook: self.fit.codebook,
            n: self.n,
            l1: self.fit.l1,
            m_compressed: self.m,
            cr_percent: self.cr,
            feasible,
        }
    }
}

fn scan(series: &TimeSeries, max_levels: Option<usize>) -> Result<Vec<Candidate>> {
    let mut fitter = QuantileFitter::new(series);
    let top = max_levels.map_or(fitter.distinct(), |m| m.clamp(1, fitter.distinct()));
    (1..=top)
        .map(|n| {
            let fit = fitter.fit(n)?;
            let q = quantize(series, &fit.codebook)?;
            let m = jump_count(q.values()) + 1;
            debug_assert_eq!(m, compress(&q).map(|c| c.len()).unwrap_or(0));
            let cr = compression_rate(series.len(), m)?;
            Ok(Candidate { fit, n, m, cr })
        })
        .collect()
}

/// Set-up (1): maximize the compression rate subject to `ℓ1 ≤ delta`.
pub fn optimize_max_cr(series: &TimeSeries, delta: f64) -> Result<OptimizationResult> {
    optimize_max_cr_capped(series, delta, None)
}

/// [`optimize_max_cr`] scanning codebook sizes `1..=max_levels` only.
pub fn optimize_max_cr_capped(
    series: &TimeSeries,
    delta: f64,
    max_levels: Option<usize>,
) -> Result<OptimizationResult> {
    if !(delta >= 0.0) {
        return Err(Error::invalid("loss bound must be non-negative"));
    }
    let candidates = scan(series, max_levels)?;
    // candidates are ordered by n, so strict comparisons keep the smallest n
    let mut best: Option<Candidate> = None;
    let mut fallback: Option<Candidate> = None;
    for cand in candidates {
        if cand.fit.l1 <= delta {
            if best.as_ref().is_none_or(|b| cand.m < b.m) {
                best = Some(cand);
            }
        } else if fallback.as_ref().is_none_or(|f| cand.fit.l1 < f.fit.l1) {
            fallback = Some(cand);
        }
    }
    match best {
        Some(b) => Ok(b.into_result(true)),
        None => Ok(fallback.expect("at least one codebook size is scanned").into_result(false)),
    }
}

/// Set-up (2): minimize ℓ1 subject to a compression rate of at least `r`.
pub fn optimize_min_loss(series: &TimeSeries, r: f64) -> Result<OptimizationResult> {
    optimize_min_loss_capped(series, r, None)
}

/// [`optimize_min_loss`] scanning codebook sizes `1..=max_levels` only.
pub fn optimize_min_loss_capped(series: &TimeSeries, r: f64, max_levels: Option<usize>) -> Result<OptimizationResult> {
    if !(0.0..=100.0).contains(&r) {
        return Err(Error::invalid("target compression rate must lie in [0, 100]"));
    }
    let candidates = scan(series, max_levels)?;
    let mut best: Option<Candidate> = None;
    let mut fallback: Option<Candidate> = None;
    for cand in candidates {
        if cand.cr >= r {
            let better =
                best.as_ref().is_none_or(|b| cand.fit.l1 < b.fit.l1 || (cand.fit.l1 == b.fit.l1 && cand.m < b.m));
            if better {
                best = Some(cand);
            }
        } else if fallback.as_ref().is_none_or(|f| cand.m < f.m) {
            fallback = Some(cand);
        }
    }
    match best {
        Some(b) => Ok(b.into_result(true)),
        None => Ok(fallback.expect("at least one codebook size is scanned").into_result(false)),
    }
}
