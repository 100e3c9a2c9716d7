//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts).
//!
//! Operates on the small projected matrices produced by Lanczos iterations;
//! dimensions stay in the low hundreds, so a dense accumulation of the
//! rotations is cheap.

use alloc::{format, vec, vec::Vec};
use num_traits::Float;

use crate::error::{Error, Result};

/// Eigendecomposition of a symmetric tridiagonal matrix.
pub(crate) struct TridiagEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Row-major eigenvector matrix; column `k` pairs with `values[k]`.
    pub vectors: Vec<f64>,
}

/// Diagonalizes the matrix with diagonal `diag` and off-diagonal `off`
/// (`off.len() == diag.len() - 1`).
pub(crate) fn eigen_tridiagonal(diag: &[f64], off: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    assert!(n >= 1 && off.len() + 1 == n, "inconsistent tridiagonal shape");
    let mut d = diag.to_vec();
    // e is padded so e[i] couples rows i and i+1.
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a decoupled block [l..=m].
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
            if iter > 64 {
                return Err(Error::Numerical(format!(
                    "tridiagonal QL failed to converge at row {l} after {iter} sweeps"
                )));
            }
            // Wilkinson-style shift.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // Accumulate the rotation into the eigenvector matrix.
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
                if i == l {
                    break;
                }
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Sort ascending, carrying columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = z[row * n + old_col];
        }
    }
    Ok(TridiagEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_by_two_closed_form() {
        // [[1, 2], [2, 3]]: eigenvalues 2 +- sqrt(5).
        let eig = eigen_tridiagonal(&[1.0, 3.0], &[2.0]).unwrap();
        assert_abs_diff_eq!(eig.values[0], 2.0 - 5.0f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[1], 2.0 + 5.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn reconstructs_matrix() {
        let diag = [0.3, -1.2, 2.5, 0.0, 1.1, -0.4];
        let off = [1.0, 0.2, -0.7, 0.5, 0.9];
        let n = diag.len();
        let eig = eigen_tridiagonal(&diag, &off).unwrap();
        // A = Q diag(values) Q^T, compared entry-wise.
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += eig.vectors[r * n + k] * eig.values[k] * eig.vectors[c * n + k];
                }
                let expect = if r == c {
                    diag[r]
                } else if r + 1 == c {
                    off[r]
                } else if c + 1 == r {
                    off[c]
                } else {
                    0.0
                };
                assert_abs_diff_eq!(acc, expect, epsilon = 1e-10);
            }
        }
        // Orthonormal columns.
        for a in 0..n {
            for b in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += eig.vectors[k * n + a] * eig.vectors[k * n + b];
                }
                let expect = if a == b { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(acc, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn handles_decoupled_blocks() {
        let eig = eigen_tridiagonal(&[2.0, 2.0, 7.0], &[0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(eig.values[0], 2.0);
        assert_abs_diff_eq!(eig.values[1], 2.0);
        assert_abs_diff_eq!(eig.values[2], 7.0);
    }
}
