//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use lapssl::graph::{Laplacian, SparseSymmetricMatrix};

/// Deterministic xorshift stream for reproducible random fixtures.
pub struct Stream(pub u64);

impl Stream {
    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() % (1 << 53)) as f64 / (1u64 << 53) as f64
    }
}

pub fn random_affinity(n: usize, density: f64, stream: &mut Stream) -> SparseSymmetricMatrix {
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if stream.uniform() < density {
                triplets.push((i, j, stream.uniform() + 1e-3));
            }
        }
    }
    SparseSymmetricMatrix::from_triplets(n, triplets).unwrap()
}

/// Ring plus random chords: connected by construction.
pub fn random_connected_affinity(
    n: usize,
    chord_density: f64,
    stream: &mut Stream,
) -> SparseSymmetricMatrix {
    let mut triplets: Vec<(usize, usize, f64)> = (0..n)
        .map(|i| (i, (i + 1) % n, stream.uniform() + 0.05))
        .collect();
    for i in 0..n {
        for j in (i + 2)..n {
            if stream.uniform() < chord_density && !(i == 0 && j == n - 1) {
                triplets.push((i, j, stream.uniform() + 0.05));
            }
        }
    }
    SparseSymmetricMatrix::from_triplets(n, triplets).unwrap()
}

pub fn to_na(l: &Laplacian) -> DMatrix<f64> {
    let n = l.dimension();
    let dense = l.to_dense();
    DMatrix::from_fn(n, n, |i, j| dense[[i, j]])
}

/// Full dense spectrum via nalgebra, eigenvalues ascending.
pub fn sorted_dense_spectrum(l: &Laplacian) -> (Vec<f64>, DMatrix<f64>) {
    let eig = to_na(l).symmetric_eigen();
    let n = l.dimension();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Dense oracle for the constrained solve: labeled rows replaced by
/// identity rows, right-hand side carrying the constraints.
pub fn dense_masked_solve(l: &Laplacian, constraints: &[(usize, f64)]) -> Vec<f64> {
    let n = l.dimension();
    let mut m = to_na(l);
    let mut b = DVector::zeros(n);
    for &(i, g) in constraints {
        assert!(m[(i, i)] != 0.0, "oracle needs non-isolated labeled nodes");
        for j in 0..n {
            m[(i, j)] = if i == j { 1.0 } else { 0.0 };
        }
        b[i] = g;
    }
    let sol = m.lu().solve(&b).expect("masked system is nonsingular");
    sol.iter().copied().collect()
}

/// Best agreement over all permutations, by brute force (small k only).
pub fn brute_force_best_match(counts: &[Vec<u64>]) -> u64 {
    let k = counts.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let score = |p: &[usize]| -> u64 { (0..k).map(|j| counts[p[j]][j]).sum() };
    let mut best = score(&perm);
    let mut c = vec![0usize; k];
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(score(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}
