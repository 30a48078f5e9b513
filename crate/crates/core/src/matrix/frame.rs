use super::{axpy, dot, norm2};

/// Incrementally built orthonormal frame.
///
/// Residuals use modified Gram–Schmidt with a second pass whenever the first
/// pass removes more than half of the norm.
#[derive(Clone, Debug, Default)]
pub struct Frame {
    dim: usize,
    basis: Vec<Vec<f64>>,
}

impl Frame {
    pub fn new(dim: usize) -> Self {
        Self { dim, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<Vec<f64>> {
        self.basis
    }

    /// Component of `v` orthogonal to the frame.
    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut r = v.to_vec();
        let before = norm2(&r);
        self.mgs_pass(&mut r);
        if norm2(&r) < 0.5 * before {
            self.mgs_pass(&mut r);
        }
        r
    }

    fn mgs_pass(&self, r: &mut [f64]) {
        for b in &self.basis {
            let c = dot(b, r);
            axpy(-c, b, r);
        }
    }

    /// Norm of the orthogonal projection of `v` onto the span of the frame.
    pub fn projection_norm(&self, v: &[f64]) -> f64 {
        let total = dot(v, v);
        let res = self.residual(v);
        // The coefficient form is accurate for small projections, the
        // residual form for projections close to the full norm.
        let coeff: f64 = self.basis.iter().map(|b| dot(b, v).powi(2)).sum::<f64>().sqrt();
        if coeff * coeff < 0.5 * total {
            coeff
        } else {
            (total - dot(&res, &res)).max(0.0).sqrt()
        }
    }

    /// Adds the normalized residual of `v` unless it is below `rel_tol * |v|`.
    pub fn push(&mut self, v: &[f64], rel_tol: f64) -> bool {
        let n = norm2(v);
        if n == 0.0 || self.basis.len() == self.dim {
            return false;
        }
        let mut r = self.residual(v);
        let rn = norm2(&r);
        if rn <= rel_tol * n {
            return false;
        }
        r.iter_mut().for_each(|x| *x /= rn);
        self.basis.push(r);
        true
    }
}

/// Orthonormal basis of the orthogonal complement of `span(vectors)` in R^dim,
/// together with the numerical rank of `vectors`.
pub fn orthonormal_complement(vectors: &[Vec<f64>], dim: usize, rel_tol: f64) -> (usize, Vec<Vec<f64>>) {
    let mut frame = Frame::new(dim);
    for v in vectors {
        frame.push(v, rel_tol);
    }
    let rank = frame.len();
    for i in 0..dim {
        if frame.len() == dim {
            break;
        }
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        frame.push(&e, rel_tol);
    }
    let basis = frame.into_basis();
    (rank, basis[rank..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_a_line() {
        let (rank, comp) = orthonormal_complement(&[vec![1.0, 1.0, 1.0]], 3, 1e-10);
        assert_eq!(rank, 1);
        assert_eq!(comp.len(), 2);
        for c in &comp {
            assert!(dot(c, &[1.0, 1.0, 1.0]).abs() < 1e-14);
            assert!((norm2(c) - 1.0).abs() < 1e-14);
        }
        assert!(dot(&comp[0], &comp[1]).abs() < 1e-14);
    }

    #[test]
    fn dependent_vectors_are_skipped() {
        let mut f = Frame::new(3);
        assert!(f.push(&[1.0, 0.0, 0.0], 1e-12));
        assert!(!f.push(&[2.0, 0.0, 0.0], 1e-12));
        assert!(f.push(&[1.0, 1e-3, 0.0], 1e-12));
        assert_eq!(f.len(), 2);
        assert!((f.projection_norm(&[3.0, 4.0, 12.0]) - 5.0).abs() < 1e-13);
    }
}
