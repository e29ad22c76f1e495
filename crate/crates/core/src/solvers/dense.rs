//! Dense symmetric eigendecomposition via Householder tridiagonalization
//! followed by the implicit-shift QL iteration. Used directly for small
//! problems and to diagonalize the projected matrices inside the iterative
//! eigensolver.

use crate::error::{Error, Result};

/// Full eigendecomposition of a symmetric matrix given in row-major form.
/// Returns eigenvalues ascending and the matching eigenvectors (each of
/// length `n`). The input is consumed as workspace.
pub(crate) fn symmetric_eigen(mut a: Vec<Vec<f64>>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    debug_assert!(a.iter().all(|row| row.len() == n));
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, &mut d, &mut e);
    ql_implicit(&mut d, &mut e, &mut a)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| a[row][col]).collect())
        .collect();
    Ok((values, vectors))
}

/// Householder reduction to tridiagonal form, accumulating the orthogonal
/// transformation in `a`. On exit `d` holds the diagonal and `e[1..]` the
/// subdiagonal (EISPACK tred2).
fn tridiagonalize(a: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = a.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = a[i][..=l].iter().map(|v| v.abs()).sum();
            if scale == 0.0 {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] /= scale;
                    h += a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i][l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    a[j][i] = a[i][j] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j][k] * a[i][k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k][j] * a[i][k];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a[i][j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j][k] -= f * e[k] + g * a[i][k];
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[i][k] * a[k][j];
                }
                for k in 0..i {
                    a[k][j] -= g * a[k][i];
                }
            }
        }
        d[i] = a[i][i];
        a[i][i] = 1.0;
        for j in 0..i {
            a[j][i] = 0.0;
            a[i][j] = 0.0;
        }
    }
}

/// Implicit-shift QL on a tridiagonal matrix (EISPACK tql2). `e` arrives
/// with the subdiagonal in positions `1..n` and is destroyed.
fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence {
                    iterations: iter,
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &[Vec<f64>], lambda: f64, v: &[f64]) -> f64 {
        let n = v.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            let av: f64 = (0..n).map(|j| a[i][j] * v[j]).sum();
            worst = worst.max((av - lambda * v[i]).abs());
        }
        worst
    }

    #[test]
    fn diagonal_matrix() {
        let a = vec![
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ];
        let (vals, _) = symmetric_eigen(a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
        assert!((vals[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn path_graph_laplacian() {
        // Path on 3 nodes: eigenvalues 0, 1, 3.
        let a = vec![
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ];
        let (vals, vecs) = symmetric_eigen(a.clone()).unwrap();
        for (want, got) in [0.0, 1.0, 3.0].iter().zip(&vals) {
            assert!((want - got).abs() < 1e-12);
        }
        for (lambda, v) in vals.iter().zip(&vecs) {
            assert!(residual(&a, *lambda, v) < 1e-12);
        }
    }

    #[test]
    fn random_symmetric_residuals_and_orthogonality() {
        let n = 40;
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 2000) as f64 / 1000.0 - 1.0
        };
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = next();
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let (vals, vecs) = symmetric_eigen(a.clone()).unwrap();
        let scale: f64 = a
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        for (lambda, v) in vals.iter().zip(&vecs) {
            assert!(residual(&a, *lambda, v) <= 1e-11 * scale);
        }
        for i in 0..n {
            for j in i..n {
                let dot: f64 = vecs[i].iter().zip(&vecs[j]).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "({i},{j}) dot={dot}");
            }
        }
        // ascending
        assert!(vals.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn tridiagonal_matrix_spectrum() {
        // Known case: tridiagonal with weak couplings stays near its
        // diagonal; eigenvectors must still satisfy the residual check.
        let diag = [2.0, 3.0, 1.0, 5.0, 4.0];
        let sub = [0.6, -0.2, 0.9, 0.1];
        let n = diag.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = diag[i];
        }
        for i in 0..n - 1 {
            a[i][i + 1] = sub[i];
            a[i + 1][i] = sub[i];
        }
        let (dv, dvecs) = symmetric_eigen(a.clone()).unwrap();
        assert!(dv.windows(2).all(|p| p[0] <= p[1]));
        let trace: f64 = diag.iter().sum();
        assert!((dv.iter().sum::<f64>() - trace).abs() < 1e-12);
        for (lambda, v) in dv.iter().zip(&dvecs) {
            assert!(residual(&a, *lambda, v) < 1e-11);
        }
    }
}
