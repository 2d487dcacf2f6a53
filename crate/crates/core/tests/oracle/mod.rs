//! Independent brute-force references. Nothing here calls into the library's
//! algorithms; the acceptance suite of the `tsq` crate includes this file too.

#![allow(dead_code, clippy::needless_range_loop)]

/// Nearest level by linear scan, lower level on ties.
pub fn nearest_by_scan(x: f64, levels: &[f64]) -> f64 {
    let mut best = levels[0];
    for &l in &levels[1..] {
        if (x - l).abs() < (x - best).abs() {
            best = l;
        }
    }
    best
}

pub fn l1_of_levels(values: &[f64], levels: &[f64]) -> f64 {
    let total: f64 = values.iter().map(|&x| (x - nearest_by_scan(x, levels)).abs()).sum();
    total / values.len() as f64
}

pub fn sorted_distinct(values: &[f64]) -> Vec<f64> {
    let mut d = values.to_vec();
    d.sort_by(f64::total_cmp);
    d.dedup();
    d
}

fn next_combination(idx: &mut [usize], pool: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < pool - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimum ℓ1 over every n-subset of the distinct values, with the
/// lexicographically first subset attaining it.
pub fn brute_codebook(values: &[f64], n: usize) -> (Vec<f64>, f64) {
    let pool = sorted_distinct(values);
    let mut idx: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    loop {
        let levels: Vec<f64> = idx.iter().map(|&i| pool[i]).collect();
        let l1 = l1_of_levels(values, &levels);
        if best.as_ref().is_none_or(|b| l1 < b.1) {
            best = Some((levels, l1));
        }
        if !next_combination(&mut idx, pool.len()) {
            break;
        }
    }
    best.unwrap()
}

/// Total (not averaged) ℓ1 of the best split of the sorted samples into
/// `n` contiguous cells, each represented by its median. Plain O(N²·n) DP.
pub fn partition_median_cost(values: &[f64], n: usize) -> f64 {
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let len = x.len();
    let cell = |i: usize, j: usize| -> f64 {
        let m = x[i + (j - i) / 2];
        x[i..=j].iter().map(|v| (v - m).abs()).sum()
    };
    let inf = f64::INFINITY;
    // dp[c][j]: first j samples in c cells
    let mut dp = vec![vec![inf; len + 1]; n + 1];
    dp[0][0] = 0.0;
    for c in 1..=n {
        for j in 1..=len {
            for i in (c - 1)..j {
                if dp[c - 1][i] < inf {
                    let v = dp[c - 1][i] + cell(i, j - 1);
                    if v < dp[c][j] {
                        dp[c][j] = v;
                    }
                }
            }
        }
    }
    dp[n][len]
}

/// Radius of the smallest ball through all of `support` with its centre in
/// their affine hull; `None` if the points are affinely dependent.
fn circumball(support: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = support[0];
    let m = support.len() - 1;
    if m == 0 {
        return Some((p0.to_vec(), 0.0));
    }
    let u: Vec<Vec<f64>> = support[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // 2 Σ_j λ_j (u_i·u_j) = |u_i|²
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = (0..m).map(|j| 2.0 * dot(&u[i], &u[j])).collect();
            row.push(dot(&u[i], &u[i]));
            row
        })
        .collect();
    for col in 0..m {
        let piv = (col..m).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
    let mut centre = p0.to_vec();
    for (l, ui) in lambda.iter().zip(&u) {
        for (c, x) in centre.iter_mut().zip(ui) {
            *c += l * x;
        }
    }
    let r = centre.iter().zip(p0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Some((centre, r))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Radius of the minimum enclosing ball, by enumerating support sets of
/// size at most d + 1.
pub fn min_enclosing_radius(points: &[&[f64]]) -> f64 {
    let d = points[0].len();
    let n = points.len();
    let mut best = f64::INFINITY;
    for size in 1..=(d + 1).min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let support: Vec<&[f64]> = idx.iter().map(|&i| points[i]).collect();
            if let Some((c, r)) = circumball(&support) {
                if r < best && points.iter().all(|p| dist(p, &c) <= r * (1.0 + 1e-9) + 1e-12) {
                    best = r;
                }
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    best
}

/// Fewest balls of radius `delta` (free centres) covering all points.
/// Exponential; meant for N <= 10. A tiny relative slack keeps the result a
/// lower bound under rounding.
pub fn min_ball_cover(points: &[Vec<f64>], delta: f64) -> usize {
    let n = points.len();
    assert!(n <= 12, "oracle is exponential");
    let full = (1usize << n) - 1;
    let feasible: Vec<bool> = (0..=full)
        .map(|mask| {
            if mask == 0 {
                return true;
            }
            let group: Vec<&[f64]> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| points[i].as_slice()).collect();
            min_enclosing_radius(&group) <= delta * (1.0 + 1e-9) + 1e-12
        })
        .collect();
    let mut dp = vec![usize::MAX; full + 1];
    dp[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        // subsets of mask containing its lowest point
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let group = sub | low;
            if feasible[group] && dp[mask ^ group] != usize::MAX {
                dp[mask] = dp[mask].min(dp[mask ^ group] + 1);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    dp[full]
}

/// Best split of the points into two non-empty groups by within-group sum
/// of squared distances to the group mean. Returns the two means, sorted.
pub fn best_two_partition(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = points.len();
    let d = points[0].len();
    let mean = |idx: &[usize]| -> Vec<f64> {
        let mut m = vec![0.0; d];
        for &i in idx {
            for (a, x) in m.iter_mut().zip(&points[i]) {
                *a += x;
            }
        }
        m.iter_mut().for_each(|a| *a /= idx.len() as f64);
        m
    };
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 1..(1usize << n) - 1 {
        let a: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let b: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let (ma, mb) = (mean(&a), mean(&b));
        let sse: f64 = a.iter().map(|&i| dist(&points[i], &ma).powi(2)).sum::<f64>()
            + b.iter().map(|&i| dist(&points[i], &mb).powi(2)).sum::<f64>();
        if sse < best.0 {
            let mut ms = vec![ma, mb];
            ms.sort_by(|x, y| x.partial_cmp(y).unwrap());
            best = (sse, ms);
        }
    }
    best.1
}

/// Exhaustive set-up (1): every n, every n-subset; returns (n, l1, M) of the
/// best feasible choice or None.
pub fn brute_max_cr(values: &[f64], delta: f64) -> Option<(usize, f64, usize)> {
    let v = sorted_distinct(values).len();
    let mut best: Option<(usize, f64, usize)> = None;
    for n in 1..=v {
        let (levels, l1) = brute_codebook(values, n);
        if l1 > delta {
            continue;
        }
        let m = change_points(values, &levels);
        if best.is_none_or(|b| m < b.2) {
            best = Some((n, l1, m));
        }
    }
    best
}

pub fn change_points(values: &[f64], levels: &[f64]) -> usize {
    let q: Vec<f64> = values.iter().map(|&x| nearest_by_scan(x, levels)).collect();
    1 + q.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Hand-rolled banded quantization with a constant band: slice membership by
/// comparison against each boundary, statistic computed from scratch.
pub fn banded_reference(values: &[f64], lower: f64, upper: f64, n: usize, median: bool) -> Vec<f64> {
    let bounds: Vec<f64> =
        (0..=n).map(|k| if k == n { upper } else { lower + (upper - lower) * k as f64 / n as f64 }).collect();
    let slice = |x: f64| -> usize {
        (0..n).find(|&j| x >= bounds[j] && (x < bounds[j + 1] || (j == n - 1 && x <= bounds[n]))).unwrap()
    };
    let mut groups = vec![Vec::new(); n];
    for &x in values {
        if x >= lower && x <= upper {
            groups[slice(x)].push(x);
        }
    }
    let stat: Vec<f64> = groups
        .iter()
        .map(|g: &Vec<f64>| {
            if g.is_empty() {
                return f64::NAN;
            }
            let mut g = g.clone();
            g.sort_by(f64::total_cmp);
            if median {
                let m = g.len() / 2;
                if g.len() % 2 == 1 {
                    g[m]
                } else {
                    g[m - 1] / 2.0 + g[m] / 2.0
                }
            } else {
                let lo = g[0];
                let hi = g[g.len() - 1];
                (g.iter().sum::<f64>() / g.len() as f64).clamp(lo, hi)
            }
        })
        .collect();
    values.iter().map(|&x| if x < lower || x > upper { x } else { stat[slice(x)] }).collect()
}
