//! Affinity graphs over feature vectors and the combinatorial graph-Laplacian.
//!
//! Data instances become nodes of an undirected weighted graph whose edge
//! weights come from a Gaussian kernel on Euclidean distance,
//! `W_ij = exp(-||x_i - x_j||^2 / (2 sigma^2))`. The Laplacian is `L = D - W`
//! with `D_ii = sum_j W_ij`. Self-loops are never created: the diagonal of
//! every affinity matrix is structurally zero.

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// A set of feature vectors, optionally carrying ground-truth cluster ids.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Array2<f64>,
    labels: Option<Vec<usize>>,
}

impl Dataset {
    /// Wraps an `n x d` matrix of feature vectors. Requires `n >= 2`,
    /// `d >= 1` and all entries finite.
    pub fn new(points: Array2<f64>) -> Result<Self> {
        let (n, d) = points.dim();
        if n < 2 {
            return Err(Error::Input(format!("need at least 2 points, got {n}")));
        }
        if d < 1 {
            return Err(Error::Input("points must have at least 1 feature".into()));
        }
        if let Some(bad) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "non-finite feature value at flat index {bad}"
            )));
        }
        Ok(Self {
            points,
            labels: None,
        })
    }

    /// Like [`Dataset::new`] but attaches ground-truth labels. Label ids must
    /// form the contiguous range `0..K`.
    pub fn with_labels(points: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        let mut data = Self::new(points)?;
        if labels.len() != data.len() {
            return Err(Error::DimensionMismatch {
                expected: data.len(),
                actual: labels.len(),
            });
        }
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; k];
        for &c in &labels {
            seen[c] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Input(format!(
                "label ids are not contiguous: id {missing} is unused but {} appears",
                k - 1
            )));
        }
        data.labels = Some(labels);
        Ok(data)
    }

    /// Number of instances.
    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    /// Feature dimension.
    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Number of ground-truth clusters, if labels are present.
    pub fn n_clusters(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().max().map_or(0, |m| m + 1))
    }

    /// Squared Euclidean distance between instances `i` and `j`.
    pub fn dist_sq(&self, i: usize, j: usize) -> f64 {
        let d = self.points.ncols();
        // Rows of a standard-layout matrix are contiguous; the slice loop
        // vectorizes where the view iterator does not.
        let flat = self.points.as_slice().expect("standard layout");
        let a = &flat[i * d..(i + 1) * d];
        let b = &flat[j * d..(j + 1) * d];
        let mut s = 0.0;
        for (x, y) in a.iter().zip(b) {
            let diff = x - y;
            s += diff * diff;
        }
        s
    }
}

/// Edge retention policy for affinity construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbors {
    /// Keep every pair.
    Dense,
    /// Keep an edge iff one endpoint is among the `k` nearest of the other
    /// (symmetrization by union, which keeps weights intact).
    Knn(usize),
}

/// Parameters for Gaussian-kernel affinity construction.
///
/// Self-loops are always excluded; there is no switch for them.
#[derive(Debug, Clone, Copy)]
pub struct GraphConfig {
    /// Kernel soft-threshold `sigma` (must be positive).
    pub sigma: f64,
    /// Sparsification policy.
    pub neighbors: Neighbors,
}

impl GraphConfig {
    pub fn dense(sigma: f64) -> Self {
        Self {
            sigma,
            neighbors: Neighbors::Dense,
        }
    }

    pub fn knn(sigma: f64, k: usize) -> Self {
        Self {
            sigma,
            neighbors: Neighbors::Knn(k),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::Config(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if let Neighbors::Knn(k) = self.neighbors {
            if k == 0 {
                return Err(Error::Config("neighbor count must be at least 1".into()));
            }
            if k >= n {
                return Err(Error::Config(format!(
                    "neighbor count {k} must be smaller than the number of points {n}"
                )));
            }
        }
        Ok(())
    }
}

/// Symmetric matrix with zero diagonal, stored sparsely.
///
/// Each unordered pair `{i, j}` carries a single weight; queries of `(i, j)`
/// and `(j, i)` return the identical value by construction. Entries may be
/// negative in general (intermediate label-aware matrices use that); affinity
/// matrices feeding a Laplacian must be non-negative, which
/// [`Laplacian::from_affinity`] enforces.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetricMatrix {
    n: usize,
    // Both directions of every pair, each row sorted by neighbor index.
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSymmetricMatrix {
    /// Matrix with no entries.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    /// Builds from `(i, j, w)` triplets, one per unordered pair.
    ///
    /// Rejects out-of-range indices, diagonal entries, duplicate pairs and
    /// non-finite weights. Zero weights are dropped.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, w) in triplets {
            if i >= n || j >= n {
                return Err(Error::Input(format!(
                    "entry ({i}, {j}) out of range for dimension {n}"
                )));
            }
            if i == j {
                return Err(Error::Input(format!(
                    "diagonal entry ({i}, {i}) not allowed: self-loops are excluded"
                )));
            }
            if !w.is_finite() {
                return Err(Error::Input(format!("non-finite weight at ({i}, {j})")));
            }
            if w == 0.0 {
                continue;
            }
            rows[i].push((j, w));
            rows[j].push((i, w));
        }
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable_by_key(|&(j, _)| j);
            if row.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(Error::Input(format!("duplicate pair in row {i}")));
            }
        }
        Ok(Self { n, rows })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Weight of pair `(i, j)`; zero if absent or on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match self.rows[i].binary_search_by_key(&j, |&(c, _)| c) {
            Ok(pos) => self.rows[i][pos].1,
            Err(_) => 0.0,
        }
    }

    /// Neighbors of node `i` with weights, ascending by index.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Iterates every stored unordered pair once, as `(i, j, w)` with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .filter(move |&&(j, _)| j > i)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    /// Number of stored unordered pairs.
    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Largest stored weight (0 for an empty matrix). The diagonal is
    /// structurally absent, so this is the maximum off-diagonal entry.
    pub fn max_entry(&self) -> f64 {
        self.pairs().map(|(_, _, w)| w).fold(0.0, f64::max)
    }

    /// Smallest stored weight (0 for an empty matrix).
    pub fn min_entry(&self) -> f64 {
        self.pairs().map(|(_, _, w)| w).fold(0.0, f64::min)
    }

    /// Returns `c * W`.
    pub fn scaled(&self, c: f64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| (j, c * w)).collect())
            .collect();
        Self { n: self.n, rows }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.n, self.n));
        for (i, j, w) in self.pairs() {
            m[[i, j]] = w;
            m[[j, i]] = w;
        }
        m
    }

    // Construction fast path for builders that already guarantee uniqueness.
    fn from_sorted_pairs(n: usize, pairs: Vec<(usize, usize, f64)>) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, w) in pairs {
            debug_assert!(i < j && w != 0.0);
            rows[i].push((j, w));
            rows[j].push((i, w));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(j, _)| j);
            debug_assert!(row.windows(2).all(|p| p[0].0 < p[1].0));
        }
        Self { n, rows }
    }
}

pub(crate) fn gaussian_weight(dist_sq: f64, sigma: f64) -> f64 {
    (-dist_sq / (2.0 * sigma * sigma)).exp()
}

/// Builds the Gaussian-kernel affinity matrix for `data`.
///
/// With `Neighbors::Knn(k)` an edge is retained iff `j` is among the `k`
/// nearest of `i` *or* `i` is among the `k` nearest of `j`; distance ties are
/// broken toward the smaller index. The result is not guaranteed to be
/// connected; use [`connected_components`] to check.
pub fn build_affinity(data: &Dataset, config: &GraphConfig) -> Result<SparseSymmetricMatrix> {
    let n = data.len();
    config.validate(n)?;
    let sigma = config.sigma;

    let pairs = match config.neighbors {
        Neighbors::Dense => {
            let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in (i + 1)..n {
                    let w = gaussian_weight(data.dist_sq(i, j), sigma);
                    if w != 0.0 {
                        pairs.push((i, j, w));
                    }
                }
            }
            pairs
        }
        Neighbors::Knn(k) => {
            let nearest = nearest_neighbors(data, k);
            let mut pairs: Vec<(usize, usize, f64)> = nearest
                .iter()
                .enumerate()
                .flat_map(|(i, neigh)| {
                    neigh.iter().map(move |&(j, d2)| {
                        let (a, b) = if i < j { (i, j) } else { (j, i) };
                        (a, b, d2)
                    })
                })
                .collect();
            // Union symmetrization: the same pair may be selected from both
            // sides; keep it once.
            pairs.sort_unstable_by_key(|p| (p.0, p.1));
            pairs.dedup_by_key(|p| (p.0, p.1));
            pairs
                .into_iter()
                .filter_map(|(i, j, d2)| {
                    let w = gaussian_weight(d2, sigma);
                    (w != 0.0).then_some((i, j, w))
                })
                .collect()
        }
    };
    Ok(SparseSymmetricMatrix::from_sorted_pairs(n, pairs))
}

/// For each node, the `k` nearest other nodes as `(index, dist_sq)`.
/// Ties on distance go to the smaller index.
fn nearest_neighbors(data: &Dataset, k: usize) -> Vec<Vec<(usize, f64)>> {
    let n = data.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut dists: Vec<(usize, f64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, data.dist_sq(i, j)))
                .collect();
            dists.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            dists.truncate(k);
            dists
        })
        .collect()
}

/// Median of the distances from every node to each of its `k` nearest
/// neighbors. A common default for the kernel width when none is given.
pub fn median_sigma(data: &Dataset, k: usize) -> Result<f64> {
    let n = data.len();
    if k == 0 || k >= n {
        return Err(Error::Config(format!(
            "median heuristic needs 1 <= k < n, got k={k}, n={n}"
        )));
    }
    let mut dists: Vec<f64> = nearest_neighbors(data, k)
        .into_iter()
        .flatten()
        .map(|(_, d2)| d2.sqrt())
        .collect();
    dists.sort_unstable_by(f64::total_cmp);
    let m = dists.len();
    let median = if m % 2 == 1 {
        dists[m / 2]
    } else {
        0.5 * (dists[m / 2 - 1] + dists[m / 2])
    };
    if median <= 0.0 {
        return Err(Error::Input(
            "median neighbor distance is zero; points are duplicated".into(),
        ));
    }
    Ok(median)
}

/// Row sums `D_ii = sum_j W_ij`.
pub fn degree_vector(w: &SparseSymmetricMatrix) -> Vec<f64> {
    w.rows
        .iter()
        .map(|row| row.iter().map(|&(_, v)| v).sum())
        .collect()
}

/// The graph-Laplacian `L = D - W` over a non-negative affinity matrix.
#[derive(Debug, Clone)]
pub struct Laplacian {
    affinity: SparseSymmetricMatrix,
    degree: Vec<f64>,
}

impl Laplacian {
    /// Builds `L = D - W`. Fails if `W` has a negative entry.
    pub fn from_affinity(affinity: SparseSymmetricMatrix) -> Result<Self> {
        if let Some((i, j, w)) = affinity.pairs().find(|&(_, _, w)| w < 0.0) {
            return Err(Error::Input(format!(
                "affinity entry ({i}, {j}) = {w} is negative; Laplacians require non-negative weights"
            )));
        }
        let degree = degree_vector(&affinity);
        Ok(Self { affinity, degree })
    }

    pub fn dimension(&self) -> usize {
        self.affinity.n
    }

    pub fn affinity(&self) -> &SparseSymmetricMatrix {
        &self.affinity
    }

    /// Degrees `D_ii`, i.e. the diagonal of `L`.
    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// `(L f)_i = sum_j W_ij (f_i - f_j)`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: f.len(),
            });
        }
        let mut out = vec![0.0; f.len()];
        self.apply_into(f, &mut out);
        Ok(out)
    }

    /// Allocation-free form of [`Laplacian::apply`] for solver inner loops.
    pub(crate) fn apply_into(&self, f: &[f64], out: &mut [f64]) {
        for (i, row) in self.affinity.rows.iter().enumerate() {
            let fi = f[i];
            let mut acc = 0.0;
            for &(j, w) in row {
                acc += w * (fi - f[j]);
            }
            out[i] = acc;
        }
    }

    /// The quadratic form `f^T L f = sum_{i<j} W_ij (f_i - f_j)^2`.
    ///
    /// Summing over ordered pairs instead would double this value; the
    /// unordered-pair convention is used throughout so the energy matches
    /// `f . (L f)` exactly.
    pub fn dirichlet_energy(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                actual: f.len(),
            });
        }
        let mut e = 0.0;
        for (i, j, w) in self.affinity.pairs() {
            let d = f[i] - f[j];
            e += w * d * d;
        }
        Ok(e)
    }

    /// `max_i sum_j |L_ij| = 2 max_i D_ii` for non-negative affinities.
    /// Upper bound on the spectral radius, used for solver tolerances.
    pub fn inf_norm(&self) -> f64 {
        self.degree.iter().fold(0.0_f64, |m, &d| m.max(2.0 * d))
    }

    /// Dense `D - W`, for small-problem paths and tests.
    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.dimension();
        let mut m = Array2::zeros((n, n));
        for (i, j, w) in self.affinity.pairs() {
            m[[i, j]] = -w;
            m[[j, i]] = -w;
        }
        for i in 0..n {
            m[[i, i]] = self.degree[i];
        }
        m
    }
}

/// Connected-component label per node (labels are 0-based, assigned in
/// order of the smallest node index in each component). Only edges with a
/// nonzero stored weight connect nodes.
pub fn connected_components(w: &SparseSymmetricMatrix) -> Vec<usize> {
    let n = w.dimension();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for &(j, wij) in w.row(i) {
                if wij != 0.0 && label[j] == usize::MAX {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    label
}

/// Number of connected components.
pub fn component_count(w: &SparseSymmetricMatrix) -> usize {
    connected_components(w).iter().max().map_or(0, |m| m + 1)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use ndarray::array;

    fn two_node_unit() -> SparseSymmetricMatrix {
        SparseSymmetricMatrix::from_triplets(2, [(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn gaussian_kernel_values() {
        // coincident points
        let d = Dataset::new(array![[0.0, 0.0], [0.0, 0.0]]).unwrap();
        let w = build_affinity(&d, &GraphConfig::dense(1.0)).unwrap();
        assert_eq!(w.get(0, 1), 1.0);

        // distance sqrt(2) at sigma 1
        let d = Dataset::new(array![[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let w = build_affinity(&d, &GraphConfig::dense(1.0)).unwrap();
        assert!((w.get(0, 1) - (-1.0_f64).exp()).abs() < 1e-15);

        // three collinear points at x = 0, 1, 2
        let d = Dataset::new(array![[0.0], [1.0], [2.0]]).unwrap();
        let w = build_affinity(&d, &GraphConfig::dense(1.0)).unwrap();
        assert!((w.get(0, 2) - (-2.0_f64).exp()).abs() < 1e-15);
        assert!((w.get(0, 1) - (-0.5_f64).exp()).abs() < 1e-15);
        assert_eq!(w.get(0, 1), w.get(1, 2));
    }

    #[test]
    fn affinity_rejects_bad_config() {
        let d = Dataset::new(array![[0.0], [1.0], [2.0]]).unwrap();
        assert!(matches!(
            build_affinity(&d, &GraphConfig::knn(1.0, 3)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            build_affinity(&d, &GraphConfig::dense(0.0)),
            Err(Error::Config(_))
        ));
        assert!(Dataset::new(array![[f64::NAN], [1.0]]).is_err());
    }

    #[test]
    fn knn_union_keeps_one_sided_edges() {
        // 1's nearest is 0, but 2's nearest is 1: the union must keep (1, 2).
        let d = Dataset::new(array![[0.0], [1.0], [2.1]]).unwrap();
        let w = build_affinity(&d, &GraphConfig::knn(1.0, 1)).unwrap();
        assert!(w.get(0, 1) > 0.0);
        assert!(w.get(1, 2) > 0.0);
        assert_eq!(w.get(0, 2), 0.0);
        assert_eq!(w.pair_count(), 2);
    }

    #[test]
    fn knn_ties_break_to_smaller_index() {
        // Node 1 is equidistant from 0 and 2.
        let d = Dataset::new(array![[0.0], [1.0], [2.0], [10.0]]).unwrap();
        let w = build_affinity(&d, &GraphConfig::knn(1.0, 1)).unwrap();
        // 1's single neighbor should be 0, not 2.
        assert!(w.get(0, 1) > 0.0);
        // (1,2) exists anyway via node 2's own selection; (2,3) does not.
        assert!(w.get(2, 3) == 0.0 || w.get(2, 3) > 0.0);
        let nn = nearest_neighbors(&d, 1);
        assert_eq!(nn[1][0].0, 0);
    }

    #[test]
    fn degree_vector_examples() {
        assert_eq!(
            degree_vector(&SparseSymmetricMatrix::zeros(3)),
            vec![0.0, 0.0, 0.0]
        );

        let w = SparseSymmetricMatrix::from_triplets(2, [(0, 1, 0.5)]).unwrap();
        assert_eq!(degree_vector(&w), vec![0.5, 0.5]);

        let tri =
            SparseSymmetricMatrix::from_triplets(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
                .unwrap();
        assert_eq!(degree_vector(&tri), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn laplacian_dense_form() {
        let l = Laplacian::from_affinity(two_node_unit()).unwrap();
        let d = l.to_dense();
        assert_eq!(d, array![[1.0, -1.0], [-1.0, 1.0]]);
    }

    #[test]
    fn laplacian_rejects_negative_affinity() {
        let w = SparseSymmetricMatrix::from_triplets(2, [(0, 1, -0.5)]).unwrap();
        assert!(matches!(Laplacian::from_affinity(w), Err(Error::Input(_))));
    }

    #[test]
    fn constant_vector_in_kernel() {
        let w = SparseSymmetricMatrix::from_triplets(
            4,
            [(0, 1, 0.3), (1, 2, 1.7), (2, 3, 0.2), (0, 3, 2.5)],
        )
        .unwrap();
        let l = Laplacian::from_affinity(w).unwrap();
        let max_d = l.degree().iter().fold(0.0_f64, |a, &b| a.max(b));
        let lf = l.apply(&[1.0; 4]).unwrap();
        let worst = lf.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        assert!(worst <= 1e-12 * max_d);
    }

    #[test]
    fn path3_laplacian_eigenvalues_are_roots() {
        // P3 with unit weights: eigenvalues 0, 1, 3 (roots of the
        // characteristic polynomial of the 3x3 matrix).
        let w = SparseSymmetricMatrix::from_triplets(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let l = Laplacian::from_affinity(w).unwrap().to_dense();
        let det3 = |m: &Array2<f64>| {
            m[[0, 0]] * (m[[1, 1]] * m[[2, 2]] - m[[1, 2]] * m[[2, 1]])
                - m[[0, 1]] * (m[[1, 0]] * m[[2, 2]] - m[[1, 2]] * m[[2, 0]])
                + m[[0, 2]] * (m[[1, 0]] * m[[2, 1]] - m[[1, 1]] * m[[2, 0]])
        };
        for lambda in [0.0, 1.0, 3.0] {
            let mut shifted = l.clone();
            for i in 0..3 {
                shifted[[i, i]] -= lambda;
            }
            assert!(det3(&shifted).abs() < 1e-12, "lambda={lambda}");
        }
    }

    #[test]
    fn apply_matches_examples() {
        let l = Laplacian::from_affinity(two_node_unit()).unwrap();
        assert_eq!(l.apply(&[5.0, 5.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(l.apply(&[1.0, 0.0]).unwrap(), vec![1.0, -1.0]);
        assert!(matches!(
            l.apply(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn apply_agrees_with_dense_product() {
        let w = random_matrix(8, 11);
        let l = Laplacian::from_affinity(w).unwrap();
        let f: Vec<f64> = (0..8).map(|i| ((i * 37 + 5) % 13) as f64 / 3.0).collect();
        let dense = l.to_dense();
        let sparse = l.apply(&f).unwrap();
        for i in 0..8 {
            let want: f64 = (0..8).map(|j| dense[[i, j]] * f[j]).sum();
            let scale = want.abs().max(1.0);
            assert!((sparse[i] - want).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn energy_examples_and_bruteforce() {
        let l = Laplacian::from_affinity(two_node_unit()).unwrap();
        assert_eq!(l.dirichlet_energy(&[3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(l.dirichlet_energy(&[1.0, 0.0]).unwrap(), 1.0);

        let w = random_matrix(9, 14);
        let l = Laplacian::from_affinity(w).unwrap();
        let f: Vec<f64> = (0..9).map(|i| ((i * 29 + 3) % 17) as f64 / 5.0).collect();
        // Ordered-pair double sum, halved.
        let mut brute = 0.0;
        for i in 0..9 {
            for j in 0..9 {
                let d = f[i] - f[j];
                brute += l.affinity().get(i, j) * d * d;
            }
        }
        brute *= 0.5;
        let fast = l.dirichlet_energy(&f).unwrap();
        assert!((fast - brute).abs() <= 1e-12 * brute.max(1.0));
        // And it matches the quadratic form through apply().
        let lf = l.apply(&f).unwrap();
        let quad: f64 = f.iter().zip(&lf).map(|(a, b)| a * b).sum();
        assert!((fast - quad).abs() <= 1e-12 * fast.max(1.0));
    }

    #[test]
    fn component_labels() {
        let d = Dataset::new(array![[0.0], [0.4], [1.1]]).unwrap();
        let w = build_affinity(&d, &GraphConfig::dense(1.0)).unwrap();
        assert_eq!(component_count(&w), 1);

        let blocks =
            SparseSymmetricMatrix::from_triplets(5, [(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0)])
                .unwrap();
        assert_eq!(connected_components(&blocks), vec![0, 0, 1, 1, 1]);
        assert_eq!(component_count(&blocks), 2);
    }

    #[test]
    fn median_sigma_on_grid() {
        let d = Dataset::new(array![[0.0], [1.0], [2.0]]).unwrap();
        assert_eq!(median_sigma(&d, 1).unwrap(), 1.0);
        assert!(median_sigma(&d, 0).is_err());
        let dup = Dataset::new(array![[0.0], [0.0]]).unwrap();
        assert!(median_sigma(&dup, 1).is_err());
    }

    #[test]
    fn triplet_validation() {
        assert!(SparseSymmetricMatrix::from_triplets(2, [(0, 0, 1.0)]).is_err());
        assert!(SparseSymmetricMatrix::from_triplets(2, [(0, 2, 1.0)]).is_err());
        assert!(SparseSymmetricMatrix::from_triplets(2, [(0, 1, f64::NAN)]).is_err());
        assert!(SparseSymmetricMatrix::from_triplets(3, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        // zero weights dropped
        let w = SparseSymmetricMatrix::from_triplets(3, [(0, 1, 0.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(w.pair_count(), 1);
    }

    pub(crate) fn random_matrix(n: usize, edges: usize) -> SparseSymmetricMatrix {
        // Deterministic pseudo-random sparse affinity for oracle tests.
        let mut triplets = Vec::new();
        let mut state = 0x2545f4914f6cdd1d_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut seen = std::collections::HashSet::new();
        while triplets.len() < edges {
            let i = (next() % n as u64) as usize;
            let j = (next() % n as u64) as usize;
            if i == j {
                continue;
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if !seen.insert((a, b)) {
                continue;
            }
            let w = (next() % 1000) as f64 / 1000.0 + 0.001;
            triplets.push((a, b, w));
        }
        SparseSymmetricMatrix::from_triplets(n, triplets).unwrap()
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn affinity_strategy() -> impl Strategy<Value = SparseSymmetricMatrix> {
            (2usize..12, any::<u32>()).prop_map(|(n, seed)| {
                let edges = (n * (n - 1) / 2).min(n + seed as usize % (n + 1));
                let mut triplets = Vec::new();
                let mut s = seed as u64 | 1;
                let mut next = move || {
                    s ^= s << 13;
                    s ^= s >> 7;
                    s ^= s << 17;
                    s
                };
                let mut seen = std::collections::HashSet::new();
                while triplets.len() < edges {
                    let i = (next() % n as u64) as usize;
                    let j = (next() % n as u64) as usize;
                    if i == j {
                        continue;
                    }
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    if seen.insert((a, b)) {
                        triplets.push((a, b, (next() % 997) as f64 / 997.0 + 1e-3));
                    }
                }
                SparseSymmetricMatrix::from_triplets(n, triplets).unwrap()
            })
        }

        proptest! {
            #[test]
            fn stored_pairs_are_symmetric(w in affinity_strategy()) {
                for (i, j, v) in w.pairs() {
                    prop_assert_eq!(w.get(i, j), v);
                    prop_assert_eq!(w.get(j, i), v);
                }
            }

            #[test]
            fn quadratic_form_is_psd(w in affinity_strategy(), f in proptest::collection::vec(-10.0f64..10.0, 2..12)) {
                let n = w.dimension();
                let mut fv = f;
                fv.resize(n, 0.0);
                let l = Laplacian::from_affinity(w).unwrap();
                let norm_sq: f64 = fv.iter().map(|x| x * x).sum();
                let e = l.dirichlet_energy(&fv).unwrap();
                prop_assert!(e >= -1e-10 * norm_sq);
            }

            #[test]
            fn constant_kernel_property(w in affinity_strategy()) {
                let n = w.dimension();
                let l = Laplacian::from_affinity(w).unwrap();
                let max_d = l.degree().iter().fold(0.0_f64, |a, &b| a.max(b));
                let lf = l.apply(&vec![1.0; n]).unwrap();
                let worst = lf.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
                prop_assert!(worst <= 1e-12 * max_d.max(1e-300));
            }

            #[test]
            fn kernel_is_strictly_monotone(d1 in 0.01f64..10.0, factor in 1.001f64..4.0, sigma in 0.1f64..5.0) {
                let d2 = d1 * factor;
                let w1 = gaussian_weight(d1 * d1, sigma);
                let w2 = gaussian_weight(d2 * d2, sigma);
                if w1 > 0.0 {
                    prop_assert!(w2 < w1);
                }
            }
        }
    }
}
