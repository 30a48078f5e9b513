//! Small dense singular values and matrix norms.

use super::{dot, RealMatrix};
use crate::error::{Error, Result};

/// Largest `min(rows, cols)` accepted by [`singular_values`].
pub const SVD_DIM_CAP: usize = 64;

/// Singular values in nonincreasing order, by one-sided Jacobi rotations on
/// the columns of the taller orientation.
pub fn singular_values(a: &RealMatrix) -> Result<Vec<f64>> {
    let k = a.rows().min(a.cols());
    if k > SVD_DIM_CAP {
        return Err(Error::TooLargeForSvd { got: k, cap: SVD_DIM_CAP });
    }
    // Work on columns of length m >= n.
    let t = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    let (m, n) = (t.rows(), t.cols());
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| t.column(j)).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                let (cp, cq) = (&mut lo[p], &mut hi[0]);
                for i in 0..m {
                    let (x, y) = (cp[i], cq[i]);
                    cp[i] = c * x - s * y;
                    cq[i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Square root of the sum of squared entries.
pub fn hs_norm(a: &RealMatrix) -> f64 {
    // scaled to avoid overflow for huge entries
    let scale = a.data().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * a.data().iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

const OP_NORM_MAX_ITERS: usize = 20_000;

/// Largest singular value by power iteration on the smaller Gram matrix.
///
/// The start vector is fixed (all ones plus a small index ramp) and the
/// iteration stops once successive eigenvalue estimates agree to relative
/// `tol`, or after a fixed iteration cap.
pub fn op_norm(a: &RealMatrix, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("op_norm tolerance must be positive, got {tol}")));
    }
    let tall = a.rows() >= a.cols();
    let n = if tall { a.cols() } else { a.rows() };
    // Gram matrix G = A^T A (tall) or A A^T (wide), n x n.
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = if tall {
                (0..a.rows()).map(|r| a.get(r, i) * a.get(r, j)).sum()
            } else {
                dot(a.row(i), a.row(j))
            };
            g[i * n + j] = v;
            g[j * n + i] = v;
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / (4.0 * n as f64)).collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    for _ in 0..OP_NORM_MAX_ITERS {
        let w: Vec<f64> = (0..n).map(|i| dot(&g[i * n..(i + 1) * n], &v)).collect();
        let next = dot(&w, &w).sqrt();
        if next == 0.0 {
            return Ok(0.0);
        }
        v = w;
        normalize(&mut v);
        let done = (next - lambda).abs() <= tol * next;
        lambda = next;
        if done {
            break;
        }
    }
    Ok(lambda.sqrt())
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn diagonal() {
        let a = RealMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = singular_values(&a).unwrap();
        assert!(close(s[0], 3.0, 1e-14) && close(s[1], 1.0, 1e-14));
    }

    #[test]
    fn skewed_pair() {
        // columns e1 and (1,1)/sqrt2: Gram eigenvalues 1 +- 1/sqrt2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = RealMatrix::from_columns(&[vec![1.0, 0.0], vec![r, r]]).unwrap();
        let s = singular_values(&a).unwrap();
        assert!(close(s[0], (1.0 + r).sqrt(), 1e-13), "{s:?}");
        assert!(close(s[1], (1.0 - r).sqrt(), 1e-13), "{s:?}");
        assert!(close(s[0], 1.3066, 1e-4) && close(s[1], 0.5412, 1e-4));
    }

    #[test]
    fn orthonormal_columns() {
        let a = RealMatrix::from_columns(&[
            vec![0.6, 0.8, 0.0],
            vec![-0.8, 0.6, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        for s in singular_values(&a).unwrap() {
            assert!(close(s, 1.0, 1e-14));
        }
    }

    #[test]
    fn cap_enforced() {
        let a = RealMatrix::zeros(65, 65);
        assert_eq!(singular_values(&a), Err(Error::TooLargeForSvd { got: 65, cap: 64 }));
        assert!(singular_values(&RealMatrix::zeros(1000, 3)).is_ok());
    }

    #[test]
    fn norms_of_simple_matrices() {
        let id = RealMatrix::identity(5);
        assert!(close(hs_norm(&id), 5f64.sqrt(), 1e-15));
        assert!(close(op_norm(&id, 1e-12).unwrap(), 1.0, 1e-12));
        let r = RealMatrix::from_rows(&[vec![3.0, 4.0]]).unwrap();
        assert!(close(hs_norm(&r), 5.0, 1e-15));
        assert!(close(op_norm(&r, 1e-12).unwrap(), 5.0, 1e-12));
        assert_eq!(op_norm(&RealMatrix::zeros(2, 3), 1e-9).unwrap(), 0.0);
        assert!(op_norm(&id, 0.0).is_err());
    }

    #[test]
    fn wide_and_tall_agree() {
        let a = RealMatrix::from_rows(&[vec![1.0, 2.0, 0.5], vec![-1.0, 0.0, 3.0]]).unwrap();
        let s = singular_values(&a).unwrap();
        let st = singular_values(&a.transpose()).unwrap();
        for (x, y) in s.iter().zip(&st) {
            assert!(close(*x, *y, 1e-13));
        }
        assert!(close(op_norm(&a, 1e-13).unwrap(), s[0], 1e-6));
    }
}
