//! K-means over embeddings and external clustering metrics.

use ndarray::ArrayView2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seed;

/// Output of [`kmeans`].
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    /// Cluster id per row, in `0..k`.
    pub labels: Vec<usize>,
    /// Within-cluster sum of squared distances of the kept (best) restart.
    pub inertia: f64,
    /// How many restarts were run.
    pub restarts_used: usize,
}

/// Clustering agreement between a prediction and the reference labels.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MetricReport {
    /// Normalized mutual information, in `[0, 1]`.
    pub nmi: f64,
    /// Best-permutation accuracy, in `[0, 1]`.
    pub acc: f64,
    /// The permutation realizing `acc`: `permutation[p]` is the reference
    /// class matched to predicted class `p`.
    pub permutation: Vec<usize>,
}

/// Lloyd iterations from k-means++ starts; the best inertia over `restarts`
/// runs wins. Deterministic for a fixed `seed` (each restart derives its own
/// stream from it). An emptied cluster is re-seeded from the point farthest
/// from its assigned centroid.
pub fn kmeans(
    points: ArrayView2<'_, f64>,
    k: usize,
    seed_value: u64,
    restarts: usize,
) -> Result<ClusteringResult> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::Config(format!(
            "k must be in 1..={n} for {n} points, got {k}"
        )));
    }
    if restarts == 0 {
        return Err(Error::Config("at least one restart is required".into()));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite coordinate in k-means input".into()));
    }

    let mut best: Option<(Vec<usize>, f64)> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seed_value, r as u64));
        let (labels, inertia) = lloyd(points, k, &mut rng);
        let better = match &best {
            None => true,
            Some((_, best_inertia)) => inertia < *best_inertia,
        };
        if better {
            best = Some((labels, inertia));
        }
    }
    let (labels, inertia) = best.expect("restarts >= 1");
    Ok(ClusteringResult {
        labels,
        inertia,
        restarts_used: restarts,
    })
}

fn dist_sq(points: ArrayView2<'_, f64>, i: usize, c: &[f64]) -> f64 {
    points
        .row(i)
        .iter()
        .zip(c)
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

fn plus_plus_init(points: ArrayView2<'_, f64>, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.nrows();
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    let first = rng.random_range(0..n);
    centroids.push(points.row(first).to_vec());
    let mut d2: Vec<f64> = (0..n).map(|i| dist_sq(points, i, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let chosen = if total > 0.0 {
            // Inverse-CDF sampling proportional to squared distance.
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc >= target {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // All mass at chosen centroids (duplicate points); take the
            // first index not already a centroid.
            (0..n)
                .find(|&i| !centroids.iter().any(|c| dist_sq(points, i, c) == 0.0))
                .unwrap_or(0)
        };
        let c = points.row(chosen).to_vec();
        for i in 0..n {
            d2[i] = d2[i].min(dist_sq(points, i, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd(points: ArrayView2<'_, f64>, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let n = points.nrows();
    let d = points.ncols();
    let mut centroids = plus_plus_init(points, k, rng);
    let mut labels = vec![0usize; n];
    let mut prev_inertia = f64::INFINITY;
    let mut reseeded = false;
    // Absolute rounding slack for the monotonicity check: near-duplicate
    // points leave an inertia that is pure cancellation noise, far below
    // any relative tolerance.
    let slack = 64.0 * f64::EPSILON * (points.iter().map(|v| v * v).sum::<f64>() + 1.0);

    for _iter in 0..300 {
        // Assignment step; ties go to the smaller centroid index.
        let mut inertia = 0.0;
        for i in 0..n {
            let mut best = 0usize;
            let mut best_d = dist_sq(points, i, &centroids[0]);
            for (c, centroid) in centroids.iter().enumerate().skip(1) {
                let dd = dist_sq(points, i, centroid);
                if dd < best_d {
                    best_d = dd;
                    best = c;
                }
            }
            labels[i] = best;
            inertia += best_d;
        }
        // Standard Lloyd steps never increase the objective; a reseeded
        // centroid (empty-cluster recovery) legitimately can.
        debug_assert!(
            reseeded || inertia <= prev_inertia + 1e-9 * prev_inertia.min(1e300) + slack,
            "inertia rose from {prev_inertia} to {inertia} without a reseed"
        );
        reseeded = false;

        // Update step.
        let mut counts = vec![0usize; k];
        let mut sums = vec![vec![0.0; d]; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (s, v) in sums[labels[i]].iter_mut().zip(points.row(i)) {
                *s += v;
            }
        }
        let mut moved = false;
        let mut taken = vec![false; n];
        for c in 0..k {
            let new: Vec<f64> = if counts[c] > 0 {
                sums[c].iter().map(|s| s / counts[c] as f64).collect()
            } else {
                // Re-seed an emptied cluster from the farthest point.
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .max_by(|&a, &b| {
                        dist_sq(points, a, &centroids[labels[a]])
                            .total_cmp(&dist_sq(points, b, &centroids[labels[b]]))
                    })
                    .unwrap_or(0);
                taken[far] = true;
                reseeded = true;
                points.row(far).to_vec()
            };
            if new != centroids[c] {
                moved = true;
                centroids[c] = new;
            }
        }
        if !moved && inertia == prev_inertia {
            break;
        }
        prev_inertia = inertia;
    }

    // Final assignment against the converged centroids.
    let mut inertia = 0.0;
    for i in 0..n {
        let mut best = 0usize;
        let mut best_d = dist_sq(points, i, &centroids[0]);
        for (c, centroid) in centroids.iter().enumerate().skip(1) {
            let dd = dist_sq(points, i, centroid);
            if dd < best_d {
                best_d = dd;
                best = c;
            }
        }
        labels[i] = best;
        inertia += best_d;
    }
    (labels, inertia)
}

/// Maximum-agreement assignment between predicted and reference classes.
///
/// Given the `K x K` contingency matrix `counts[t][p]` (reference class `t`,
/// predicted class `p`), finds the permutation maximizing
/// `sum_p counts[perm[p]][p]`. Returns the permutation and the matched total.
pub fn hungarian_match(counts: &[Vec<u64>]) -> Result<(Vec<usize>, u64)> {
    let k = counts.len();
    if k == 0 {
        return Err(Error::Input("empty contingency matrix".into()));
    }
    if counts.iter().any(|row| row.len() != k) {
        return Err(Error::Input("contingency matrix must be square".into()));
    }
    let max_entry = counts
        .iter()
        .flat_map(|r| r.iter())
        .max()
        .copied()
        .unwrap_or(0);
    // Max-agreement as min-cost assignment.
    let cost: Vec<Vec<i64>> = counts
        .iter()
        .map(|row| row.iter().map(|&c| (max_entry - c) as i64).collect())
        .collect();
    let row_of_col = assignment_min_cost(&cost);
    let mut matched = 0u64;
    for (col, &row) in row_of_col.iter().enumerate() {
        matched += counts[row][col];
    }
    Ok((row_of_col, matched))
}

/// Min-cost perfect assignment on a square cost matrix (Jonker–Volgenant
/// style shortest augmenting paths with potentials, O(k^3)).
/// Returns for each column the assigned row.
fn assignment_min_cost(cost: &[Vec<i64>]) -> Vec<usize> {
    let k = cost.len();
    const INF: i64 = i64::MAX / 4;
    // 1-based with a virtual column 0.
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut p = vec![0usize; k + 1]; // row assigned to column (1-based)
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=k).map(|j| p[j] - 1).collect()
}

fn remap(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut distinct: Vec<usize> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let index = |v: usize| distinct.binary_search(&v).expect("present");
    (labels.iter().map(|&v| index(v)).collect(), distinct.len())
}

/// Normalized mutual information `I(a, b) / max(H(a), H(b))`.
///
/// Computed with natural logarithms (the ratio is base-invariant), with the
/// usual `0 log 0 = 0` convention. If both entropies vanish each side is the
/// single-block partition, so the result is 1; if exactly one vanishes
/// the result is 0 (the limit convention).
pub fn nmi(reference: &[usize], predicted: &[usize]) -> Result<f64> {
    if reference.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            actual: predicted.len(),
        });
    }
    if reference.is_empty() {
        return Err(Error::Input("empty label vectors".into()));
    }
    let n = reference.len() as f64;
    let (a, ka) = remap(reference);
    let (b, kb) = remap(predicted);
    let mut joint = vec![vec![0u64; kb]; ka];
    let mut ca = vec![0u64; ka];
    let mut cb = vec![0u64; kb];
    for (&x, &y) in a.iter().zip(&b) {
        joint[x][y] += 1;
        ca[x] += 1;
        cb[y] += 1;
    }
    let entropy = |c: &[u64]| -> f64 {
        c.iter()
            .filter(|&&v| v > 0)
            .map(|&v| {
                let p = v as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let ha = entropy(&ca);
    let hb = entropy(&cb);
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    let mut info = 0.0;
    for x in 0..ka {
        for y in 0..kb {
            let c = joint[x][y];
            if c == 0 {
                continue;
            }
            let p = c as f64 / n;
            info += p * (p * n * n / (ca[x] as f64 * cb[y] as f64)).ln();
        }
    }
    Ok((info / ha.max(hb)).clamp(0.0, 1.0))
}

/// Best-permutation clustering accuracy.
///
/// The contingency matrix is padded square with zeros when the two label
/// vectors use different numbers of classes. Returns the accuracy and the
/// permutation found by [`hungarian_match`].
pub fn acc(reference: &[usize], predicted: &[usize]) -> Result<(f64, Vec<usize>)> {
    if reference.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            actual: predicted.len(),
        });
    }
    if reference.is_empty() {
        return Err(Error::Input("empty label vectors".into()));
    }
    let (a, ka) = remap(reference);
    let (b, kb) = remap(predicted);
    let k = ka.max(kb);
    let mut counts = vec![vec![0u64; k]; k];
    for (&x, &y) in a.iter().zip(&b) {
        counts[x][y] += 1;
    }
    let (perm, matched) = hungarian_match(&counts)?;
    Ok((matched as f64 / reference.len() as f64, perm))
}

/// NMI and ACC against reference labels in one call.
pub fn evaluate(reference: &[usize], predicted: &[usize]) -> Result<MetricReport> {
    let nmi_v = nmi(reference, predicted)?;
    let (acc_v, permutation) = acc(reference, predicted)?;
    Ok(MetricReport {
        nmi: nmi_v,
        acc: acc_v,
        permutation,
    })
}
