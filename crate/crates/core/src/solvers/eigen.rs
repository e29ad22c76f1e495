//! Smallest eigenpairs of a graph-Laplacian for spectral embeddings.
//!
//! Small problems go through the dense eigensolver; larger ones use Lanczos
//! with full reorthogonalization on the spectrally flipped operator
//! `B = c I - L` (с `c >= lambda_max` from the Gershgorin bound), whose top
//! eigenpairs are the bottom eigenpairs of `L`.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{connected_components, Laplacian, SparseSymmetricMatrix};
use crate::solvers::dense;

/// Tuning knobs for [`smallest_eigenpairs`]. The defaults are sensible for
/// graph Laplacians; tests force the iterative path by lowering
/// `dense_cutoff`.
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Problems up to this size are solved densely.
    pub dense_cutoff: usize,
    /// Residual requirement, relative to the infinity norm of `L`.
    pub residual_tol: f64,
    /// Total iteration budget (matrix applications) across restarts.
    pub max_steps: usize,
    /// Krylov window size before a thick restart; 0 picks one from the
    /// requested pair count.
    pub window: usize,
    /// Seed for the (deterministic) starting vector.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_cutoff: 500,
            residual_tol: 1e-9,
            max_steps: 1500,
            window: 0,
            seed: 0x5EED_1A9C,
        }
    }
}

/// Rows are per-node coordinates in the span of the returned eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    /// `n x count` matrix; column `r` is the eigenvector for `eigenvalues[r]`.
    pub coordinates: Array2<f64>,
    /// Ascending, one per returned column.
    pub eigenvalues: Vec<f64>,
    /// Whether the constant eigenvector (eigenvalue 0) was dropped.
    pub skip_trivial: bool,
}

impl SpectralEmbedding {
    pub fn len(&self) -> usize {
        self.coordinates.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.coordinates.ncols()
    }
}

/// Computes the `count` smallest-eigenvalue eigenpairs of `l`.
///
/// With `skip_trivial` the very smallest pair (the constant vector on a
/// connected graph) is computed and discarded, so the first returned column
/// is the Fiedler direction. Eigenvector signs are fixed deterministically:
/// the largest-magnitude entry of each column is made positive (ties to the
/// smallest index), so repeated runs return identical output.
pub fn smallest_eigenpairs(
    l: &Laplacian,
    count: usize,
    skip_trivial: bool,
    opts: &EigenOptions,
) -> Result<SpectralEmbedding> {
    let n = l.dimension();
    if count == 0 {
        return Err(Error::Config("eigenpair count must be at least 1".into()));
    }
    let ncomp = count + usize::from(skip_trivial);
    if ncomp > n {
        return Err(Error::Config(format!(
            "requested {count} eigenpairs (+{} skipped) from a {n}-node graph",
            usize::from(skip_trivial)
        )));
    }
    let component = connected_components(l.affinity());
    let comps = component.iter().max().map_or(0, |m| m + 1);
    if skip_trivial && comps > 1 {
        log::warn!(
            "graph has {comps} connected components; the kernel of L is {comps}-dimensional \
             and \"the\" trivial eigenvector is ambiguous (only the first kernel vector is skipped)"
        );
    }

    let (values, vectors) = if n <= opts.dense_cutoff {
        // The dense path resolves degenerate kernels exactly on its own.
        dense_smallest(l, ncomp)?
    } else if comps > 1 {
        // The spectrum of a disconnected graph is the union of the
        // component spectra; a Krylov iteration started from one vector
        // cannot leave a component's invariant subspace reliably, so each
        // component is solved on its own and the results merged.
        componentwise_smallest(l, &component, comps, ncomp, opts)?
    } else {
        lanczos_smallest(l, ncomp, opts)?
    };

    let start = usize::from(skip_trivial);
    let mut coordinates = Array2::zeros((n, count));
    let mut eigenvalues = Vec::with_capacity(count);
    for (out, r) in (start..ncomp).enumerate() {
        let mut col = vectors[r].clone();
        fix_sign(&mut col);
        for (i, v) in col.iter().enumerate() {
            coordinates[[i, out]] = *v;
        }
        eigenvalues.push(values[r]);
    }
    Ok(SpectralEmbedding {
        coordinates,
        eigenvalues,
        skip_trivial,
    })
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn dense_smallest(l: &Laplacian, ncomp: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = l.dimension();
    let mut a = vec![vec![0.0; n]; n];
    for (i, j, w) in l.affinity().pairs() {
        a[i][j] = -w;
        a[j][i] = -w;
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = l.degree()[i];
    }
    let (values, vectors) = dense::symmetric_eigen(a)?;
    Ok((values[..ncomp].to_vec(), vectors[..ncomp].to_vec()))
}

/// Solves the eigenproblem independently on every connected component and
/// merges the `ncomp` smallest pairs, embedding each component eigenvector
/// into the full node space (zero outside its component). Vectors from
/// different components are orthogonal by construction.
fn componentwise_smallest(
    l: &Laplacian,
    component: &[usize],
    comps: usize,
    ncomp: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = l.dimension();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); comps];
    for (i, &c) in component.iter().enumerate() {
        members[c].push(i);
    }

    // (eigenvalue, component, local rank, local vector)
    let mut candidates: Vec<(f64, usize, usize, Vec<f64>)> = Vec::new();
    for (c, nodes) in members.iter().enumerate() {
        let local_n = nodes.len();
        let want = ncomp.min(local_n);
        if want == 0 {
            continue;
        }
        let mut index_of = vec![usize::MAX; n];
        for (local, &global) in nodes.iter().enumerate() {
            index_of[global] = local;
        }
        let triplets: Vec<(usize, usize, f64)> = l
            .affinity()
            .pairs()
            .filter(|&(i, j, _)| component[i] == c && component[j] == c)
            .map(|(i, j, w)| (index_of[i], index_of[j], w))
            .collect();
        let sub = SparseSymmetricMatrix::from_triplets(local_n, triplets)?;
        let sub_l = Laplacian::from_affinity(sub)?;
        // Tiny components always go dense; the iterative path brings
        // nothing there.
        let (values, vectors) = if local_n <= opts.dense_cutoff.max(32) {
            dense_smallest(&sub_l, want)?
        } else {
            lanczos_smallest(&sub_l, want, opts)?
        };
        for (rank, (value, vector)) in values.into_iter().zip(vectors).enumerate() {
            candidates.push((value, c, rank, vector));
        }
    }

    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    candidates.truncate(ncomp);

    let mut values = Vec::with_capacity(ncomp);
    let mut vectors = Vec::with_capacity(ncomp);
    for (value, c, _, local_vec) in candidates {
        let mut full = vec![0.0; n];
        for (local, &global) in members[c].iter().enumerate() {
            full[global] = local_vec[local];
        }
        values.push(value);
        vectors.push(full);
    }
    Ok((values, vectors))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let s = norm(&v);
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Thick-restart Lanczos with full reorthogonalization on `B = c I - L`.
///
/// The projected matrix `T = V' B V` is kept explicitly (after a restart it
/// is diagonal-plus-arrowhead rather than tridiagonal) and diagonalized by
/// the dense solver. When the window fills, the best Ritz vectors are
/// compressed into a fresh basis and the recurrence continues from the last
/// residual direction. Breakdowns restart from a random direction
/// orthogonal to the basis.
fn lanczos_smallest(
    l: &Laplacian,
    ncomp: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = l.dimension();
    let shift = l.inf_norm().max(1e-300);
    let bound_tol = opts.residual_tol * shift;
    let accept_tol = 10.0 * bound_tol;
    let breakdown = 1e-13 * shift;
    let window = if opts.window > 0 {
        opts.window
    } else {
        (4 * ncomp + 40).clamp(80, 250)
    }
    .max(ncomp + 2)
    .min(n);
    let keep = (2 * ncomp + 10).min(window.saturating_sub(8)).max(ncomp);
    let budget = opts.max_steps.max(window + 1);
    let check_interval = 10;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<f64>> = vec![random_unit(n, &mut rng)];
    // Projected symmetric matrix, grown column by column.
    let mut tproj: Vec<Vec<f64>> = vec![vec![0.0; 1]];
    let mut scratch = vec![0.0; n];
    let mut steps = 0usize;

    // Ritz extraction: the `ncomp` largest eigenpairs of the projected B,
    // returned as eigenvalues of L (ascending) with full-space vectors.
    let extract =
        |theta: &[f64], svecs: &[Vec<f64>], basis: &[Vec<f64>]| -> (Vec<f64>, Vec<Vec<f64>>) {
            let m = theta.len();
            let top: Vec<usize> = ((m - ncomp.min(m))..m).rev().collect();
            let mut values = Vec::with_capacity(top.len());
            let mut vectors = Vec::with_capacity(top.len());
            for &r in &top {
                let mut u = vec![0.0; n];
                for (k, q) in basis.iter().enumerate() {
                    axpy(svecs[r][k], q, &mut u);
                }
                let un = norm(&u);
                for x in &mut u {
                    *x /= un;
                }
                values.push(shift - theta[r]);
                vectors.push(u);
            }
            (values, vectors)
        };

    loop {
        // Expand: w = B v_last, projected against the whole basis.
        let j = basis.len() - 1;
        l.apply_into(&basis[j], &mut scratch);
        let mut w: Vec<f64> = basis[j]
            .iter()
            .zip(&scratch)
            .map(|(v, lv)| shift * v - lv)
            .collect();
        steps += 1;
        while tproj.len() <= j {
            tproj.push(vec![0.0; j + 1]);
        }
        for i in 0..=j {
            let t = dot(&basis[i], &w);
            tproj[i].resize(j + 1, 0.0);
            tproj[j].resize(j + 1, 0.0);
            tproj[i][j] = t;
            tproj[j][i] = t;
        }
        let col: Vec<f64> = (0..=j).map(|i| tproj[i][j]).collect();
        for (i, q) in basis.iter().enumerate() {
            axpy(-col[i], q, &mut w);
        }
        for q in &basis {
            let c = dot(q, &w);
            if c != 0.0 {
                axpy(-c, q, &mut w);
            }
        }
        let beta = norm(&w);
        let mut last_beta = beta;

        let m = basis.len();
        let out_of_budget = steps >= budget;
        let window_full = m >= window;
        if m >= ncomp
            && (m % check_interval == 0 || window_full || out_of_budget || beta <= breakdown)
        {
            let (theta, svecs) = dense::symmetric_eigen(tproj.clone())?;
            // The only coupling out of span(V) is the current residual w,
            // so |beta * s[last]| bounds each Ritz residual.
            let top: Vec<usize> = ((theta.len() - ncomp.min(theta.len()))..theta.len()).collect();
            let bound_ok = theta.len() >= ncomp
                && top.iter().all(|&r| beta * svecs[r][m - 1].abs() <= bound_tol);
            if bound_ok || out_of_budget {
                let (values, vectors) = extract(&theta, &svecs, &basis);
                let mut worst = 0.0_f64;
                for (lambda, u) in values.iter().zip(&vectors) {
                    l.apply_into(u, &mut scratch);
                    let mut res = 0.0;
                    for (lu, ui) in scratch.iter().zip(u) {
                        let d = lu - lambda * ui;
                        res += d * d;
                    }
                    worst = worst.max(res.sqrt());
                }
                if values.len() == ncomp && worst <= accept_tol {
                    return Ok((values, vectors));
                }
                if out_of_budget {
                    return Err(Error::NonConvergence {
                        iterations: steps,
                        residual: worst,
                    });
                }
            }
            if window_full && !out_of_budget {
                // Thick restart: compress to the best `keep` Ritz vectors.
                let kept: Vec<usize> = ((theta.len() - keep.min(theta.len()))..theta.len()).collect();
                let mut new_basis = Vec::with_capacity(keep + 1);
                let mut new_t = vec![vec![0.0; kept.len()]; kept.len()];
                for (new_idx, &r) in kept.iter().enumerate() {
                    let mut y = vec![0.0; n];
                    for (k, q) in basis.iter().enumerate() {
                        axpy(svecs[r][k], q, &mut y);
                    }
                    let yn = norm(&y);
                    for x in &mut y {
                        *x /= yn;
                    }
                    new_basis.push(y);
                    new_t[new_idx][new_idx] = theta[r];
                }
                basis = new_basis;
                tproj = new_t;
                // Continue from the residual direction (re-orthogonalized).
                if beta > breakdown {
                    for x in &mut w {
                        *x /= beta;
                    }
                    for _ in 0..2 {
                        for q in &basis {
                            let c = dot(q, &w);
                            axpy(-c, q, &mut w);
                        }
                    }
                    let wn = norm(&w);
                    if wn > 1e-8 {
                        for x in &mut w {
                            *x /= wn;
                        }
                        basis.push(w);
                        continue;
                    }
                }
                // Residual vanished: expand with a random direction below.
                w = vec![0.0; n];
                last_beta = 0.0;
            }
        }

        if last_beta <= breakdown {
            // Invariant subspace exhausted (or a restart left no residual):
            // continue in a fresh random direction orthogonal to the basis.
            let mut v = random_unit(n, &mut rng);
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &v);
                    axpy(-c, q, &mut v);
                }
            }
            let s = norm(&v);
            if s < 1e-8 {
                return Err(Error::Internal(
                    "could not extend the Krylov basis orthogonally".into(),
                ));
            }
            for x in &mut v {
                *x /= s;
            }
            basis.push(v);
        } else {
            for x in &mut w {
                *x /= last_beta;
            }
            basis.push(w);
        }
    }
}
