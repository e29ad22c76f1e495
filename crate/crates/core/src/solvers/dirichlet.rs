//! Harmonic extension of labeled values: solve `(L f)_i = 0` on unlabeled
//! nodes subject to `f_i = g_i` on labeled nodes.
//!
//! The masked formulation replaces each labeled row of `L` with an identity
//! row (the textbook mask scales the row by `1 / L_ii`, which is the same
//! row operation and therefore has the same unique solution). Eliminating
//! the labeled unknowns leaves a symmetric positive-definite system over
//! the unlabeled nodes,
//!
//! `A x = b`, `A = L[U, U]`, `b_i = sum_{j in S} W_ij g_j`,
//!
//! which a Jacobi-preconditioned conjugate-gradient iteration solves.
//! Uniqueness requires every connected component to contain a labeled node.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::{connected_components, Laplacian};
use crate::ssl::LabeledSet;

#[derive(Debug, Clone, Copy)]
pub struct DirichletOptions {
    /// Relative residual target for the conjugate-gradient iteration.
    pub rel_tol: f64,
    /// Iteration cap, as a multiple of the full graph size.
    pub max_iter_factor: usize,
}

impl Default for DirichletOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter_factor: 10,
        }
    }
}

/// Harmonic interpolant with solver diagnostics.
#[derive(Debug, Clone)]
pub struct DirichletSolution {
    /// Per-node values; equals the constraint exactly on labeled nodes.
    pub values: Vec<f64>,
    /// Final relative residual of the reduced system.
    pub residual: f64,
    /// Conjugate-gradient iterations used.
    pub iterations: usize,
}

/// One-vs-rest indicator solutions for `K` clusters plus the argmax readout.
#[derive(Debug, Clone)]
pub struct MulticlassSolution {
    /// `n x K`; column `k` is the harmonic extension of the indicator of
    /// the `k`-th labeled class.
    pub scores: Array2<f64>,
    /// `argmax_k scores[i, k]`, ties to the smaller class.
    pub labels: Vec<usize>,
}

/// Solves the constrained interpolation problem for explicit
/// `(node, value)` constraints.
pub fn solve_dirichlet(
    l: &Laplacian,
    constraints: &[(usize, f64)],
    opts: &DirichletOptions,
) -> Result<DirichletSolution> {
    let n = l.dimension();
    if constraints.is_empty() {
        return Err(Error::Input(
            "at least one constrained node is required".into(),
        ));
    }
    let mut value = vec![f64::NAN; n];
    let mut labeled = vec![false; n];
    for &(i, g) in constraints {
        if i >= n {
            return Err(Error::Input(format!(
                "constrained node {i} out of range for {n} nodes"
            )));
        }
        if !g.is_finite() {
            return Err(Error::Input(format!(
                "constraint value at node {i} is not finite"
            )));
        }
        if labeled[i] {
            return Err(Error::Input(format!("node {i} constrained twice")));
        }
        labeled[i] = true;
        value[i] = g;
    }

    // The mask is undefined on a labeled node with zero degree, and a
    // component with no label makes the solution non-unique.
    for (i, &is_lab) in labeled.iter().enumerate() {
        if is_lab && l.degree()[i] == 0.0 {
            return Err(Error::Input(format!(
                "labeled node {i} is isolated (degree 0); the masked system is undefined there"
            )));
        }
    }
    let comp = connected_components(l.affinity());
    let n_comp = comp.iter().max().map_or(0, |m| m + 1);
    let mut comp_has_label = vec![false; n_comp];
    let mut comp_size = vec![0usize; n_comp];
    let mut comp_repr = vec![usize::MAX; n_comp];
    for i in 0..n {
        let c = comp[i];
        comp_size[c] += 1;
        if comp_repr[c] == usize::MAX {
            comp_repr[c] = i;
        }
        if labeled[i] {
            comp_has_label[c] = true;
        }
    }
    if let Some(c) = comp_has_label.iter().position(|&h| !h) {
        return Err(Error::ComponentWithoutLabel {
            component: c,
            node: comp_repr[c],
            size: comp_size[c],
        });
    }

    let unlabeled: Vec<usize> = (0..n).filter(|&i| !labeled[i]).collect();
    if unlabeled.is_empty() {
        return Ok(DirichletSolution {
            values: value,
            residual: 0.0,
            iterations: 0,
        });
    }

    // Reduced system over unlabeled nodes.
    let mut reduced_index = vec![usize::MAX; n];
    for (r, &i) in unlabeled.iter().enumerate() {
        reduced_index[i] = r;
    }
    let nu = unlabeled.len();
    let mut diag = vec![0.0; nu];
    let mut offdiag: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nu];
    let mut rhs = vec![0.0; nu];
    for (r, &i) in unlabeled.iter().enumerate() {
        diag[r] = l.degree()[i];
        for &(j, w) in l.affinity().row(i) {
            if labeled[j] {
                rhs[r] += w * value[j];
            } else {
                offdiag[r].push((reduced_index[j], w));
            }
        }
    }

    let apply = |x: &[f64], out: &mut [f64]| {
        for r in 0..nu {
            let mut acc = diag[r] * x[r];
            for &(c, w) in &offdiag[r] {
                acc -= w * x[c];
            }
            out[r] = acc;
        }
    };

    let cap = opts.max_iter_factor * n;
    let (x, residual, iterations) = conjugate_gradient(&apply, &diag, &rhs, opts.rel_tol, cap)?;
    for (r, &i) in unlabeled.iter().enumerate() {
        value[i] = x[r];
    }
    Ok(DirichletSolution {
        values: value,
        residual,
        iterations,
    })
}

/// Jacobi-preconditioned CG for SPD operators. Returns the solution, the
/// final relative residual and the iteration count.
fn conjugate_gradient(
    apply: &dyn Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, f64, usize)> {
    let n = b.len();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((x, 0.0, 0));
    }
    let precond = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            z[i] = if diag[i] > 0.0 { r[i] / diag[i] } else { r[i] };
        }
    };

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];

    for iter in 1..=max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Solver(format!(
                "reduced system is not positive definite (p'Ap = {pap:.3e})"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= rel_tol * b_norm {
            return Ok((x, r_norm / b_norm, iter));
        }
        precond(&r, &mut z);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: r_norm / b_norm,
    })
}

/// One-vs-rest interpolation: for each class `k` solve with value 1 on the
/// labeled nodes of class `k` and 0 on all other labeled nodes, then label
/// every node by the largest score.
pub fn solve_multiclass_dirichlet(
    l: &Laplacian,
    labels: &LabeledSet,
    opts: &DirichletOptions,
) -> Result<MulticlassSolution> {
    let n = l.dimension();
    if labels.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: labels.n(),
        });
    }
    let k = labels.class_count();
    if k < 2 {
        return Err(Error::Config(format!(
            "multiclass interpolation needs at least 2 classes, got {k}"
        )));
    }
    if let Some(empty) = labels.classes().iter().position(|c| c.is_empty()) {
        return Err(Error::Config(format!(
            "class {empty} has no labeled node; every class needs at least one constraint"
        )));
    }

    let mut scores = Array2::zeros((n, k));
    for class in 0..k {
        let constraints: Vec<(usize, f64)> = labels
            .classes()
            .iter()
            .enumerate()
            .flat_map(|(c, nodes)| {
                let v = if c == class { 1.0 } else { 0.0 };
                nodes.iter().map(move |&i| (i, v))
            })
            .collect();
        let sol = solve_dirichlet(l, &constraints, opts)?;
        for (i, v) in sol.values.iter().enumerate() {
            scores[[i, class]] = *v;
        }
    }

    let labels_out = (0..n)
        .map(|i| {
            let mut best = 0usize;
            for c in 1..k {
                if scores[[i, c]] > scores[[i, best]] {
                    best = c;
                }
            }
            best
        })
        .collect();
    Ok(MulticlassSolution {
        scores,
        labels: labels_out,
    })
}

/// Two-cluster interpolation with the +1/-1 encoding: value `+1` on the
/// first class, `-1` on the second, node labels from the sign of the
/// solution (0 maps to the first class).
pub fn solve_signed_dirichlet(
    l: &Laplacian,
    labels: &LabeledSet,
    opts: &DirichletOptions,
) -> Result<(DirichletSolution, Vec<usize>)> {
    if labels.class_count() != 2 {
        return Err(Error::Config(format!(
            "signed encoding needs exactly 2 classes, got {}",
            labels.class_count()
        )));
    }
    if labels.classes().iter().any(|c| c.is_empty()) {
        return Err(Error::Config("both classes need at least one label".into()));
    }
    let constraints: Vec<(usize, f64)> = labels.classes()[0]
        .iter()
        .map(|&i| (i, 1.0))
        .chain(labels.classes()[1].iter().map(|&i| (i, -1.0)))
        .collect();
    let sol = solve_dirichlet(l, &constraints, opts)?;
    let assignment = sol
        .values
        .iter()
        .map(|&v| usize::from(v < 0.0))
        .collect();
    Ok((sol, assignment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SparseSymmetricMatrix;

    fn path(n: usize) -> Laplacian {
        let triplets: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        Laplacian::from_affinity(SparseSymmetricMatrix::from_triplets(n, triplets).unwrap())
            .unwrap()
    }

    #[test]
    fn all_labeled_returns_constraints() {
        let l = path(3);
        let sol =
            solve_dirichlet(&l, &[(0, 1.0), (1, 2.0), (2, 3.0)], &Default::default()).unwrap();
        assert_eq!(sol.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn path_midpoint_is_average() {
        let l = path(3);
        let sol = solve_dirichlet(&l, &[(0, 0.0), (2, 1.0)], &Default::default()).unwrap();
        assert!((sol.values[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn constants_are_harmonic() {
        let w = crate::graph::tests::random_matrix(12, 26);
        let l = Laplacian::from_affinity(w).unwrap();
        // Pick labels in every component so the solve is well-posed.
        let comp = crate::graph::connected_components(l.affinity());
        let n_comp = comp.iter().max().unwrap() + 1;
        let mut constraints = Vec::new();
        for c in 0..n_comp {
            let node = comp.iter().position(|&x| x == c).unwrap();
            if l.degree()[node] > 0.0 {
                constraints.push((node, 4.2));
            }
        }
        if constraints.is_empty() {
            return;
        }
        match solve_dirichlet(&l, &constraints, &Default::default()) {
            Ok(sol) => {
                for v in &sol.values {
                    assert!((v - 4.2).abs() < 1e-8);
                }
            }
            Err(Error::Input(_)) | Err(Error::ComponentWithoutLabel { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn unlabeled_component_is_an_error() {
        let w = SparseSymmetricMatrix::from_triplets(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let l = Laplacian::from_affinity(w).unwrap();
        let err = solve_dirichlet(&l, &[(0, 1.0)], &Default::default()).unwrap_err();
        match err {
            Error::ComponentWithoutLabel {
                component, size, ..
            } => {
                assert_eq!(component, 1);
                assert_eq!(size, 2);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn isolated_labeled_node_is_an_error() {
        let w = SparseSymmetricMatrix::from_triplets(3, [(0, 1, 1.0)]).unwrap();
        let l = Laplacian::from_affinity(w).unwrap();
        let err = solve_dirichlet(&l, &[(0, 1.0), (2, 0.0)], &Default::default()).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn maximum_principle_on_path() {
        let l = path(9);
        let sol = solve_dirichlet(&l, &[(0, -2.0), (8, 5.0)], &Default::default()).unwrap();
        for v in &sol.values {
            assert!(*v >= -2.0 - 1e-9 && *v <= 5.0 + 1e-9);
        }
        // interior harmonicity
        let lf = l.apply(&sol.values).unwrap();
        for i in 1..8 {
            assert!(lf[i].abs() <= 1e-8 * l.inf_norm());
        }
    }

    #[test]
    fn multiclass_block_recovery() {
        // Two disconnected blocks, one label each: exact block indicators.
        let w = SparseSymmetricMatrix::from_triplets(
            6,
            [(0, 1, 1.0), (1, 2, 0.5), (3, 4, 1.0), (4, 5, 0.7)],
        )
        .unwrap();
        let l = Laplacian::from_affinity(w).unwrap();
        let s = LabeledSet::new(6, vec![vec![0], vec![5]]).unwrap();
        let sol = solve_multiclass_dirichlet(&l, &s, &Default::default()).unwrap();
        assert_eq!(sol.labels, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn multiclass_path_split() {
        let l = path(4);
        let s = LabeledSet::new(4, vec![vec![0], vec![3]]).unwrap();
        let sol = solve_multiclass_dirichlet(&l, &s, &Default::default()).unwrap();
        assert_eq!(sol.labels, vec![0, 0, 1, 1]);
        // Labeled nodes keep their own class.
        assert_eq!(sol.labels[0], 0);
        assert_eq!(sol.labels[3], 1);
    }

    #[test]
    fn multiclass_requires_every_class() {
        let l = path(4);
        let s = LabeledSet::new(4, vec![vec![0], vec![]]).unwrap();
        assert!(solve_multiclass_dirichlet(&l, &s, &Default::default()).is_err());
    }

    #[test]
    fn signed_agrees_with_one_vs_rest() {
        let w = crate::graph::tests::random_matrix(14, 40);
        let l = Laplacian::from_affinity(w).unwrap();
        if crate::graph::component_count(l.affinity()) != 1 {
            return;
        }
        let s = LabeledSet::new(14, vec![vec![0, 3], vec![10, 13]]).unwrap();
        let (_, signed) = solve_signed_dirichlet(&l, &s, &Default::default()).unwrap();
        let ovr = solve_multiclass_dirichlet(&l, &s, &Default::default()).unwrap();
        assert_eq!(signed, ovr.labels);
    }

    #[test]
    fn scores_partition_unity_on_connected_graph() {
        let w = crate::graph::tests::random_matrix(10, 30);
        let l = Laplacian::from_affinity(w).unwrap();
        if crate::graph::component_count(l.affinity()) != 1 {
            return;
        }
        let s = LabeledSet::new(10, vec![vec![0], vec![4], vec![9]]).unwrap();
        let sol = solve_multiclass_dirichlet(&l, &s, &Default::default()).unwrap();
        for i in 0..10 {
            let total: f64 = (0..3).map(|k| sol.scores[[i, k]]).sum();
            assert!((total - 1.0).abs() < 1e-8, "node {i}: {total}");
        }
    }
}
