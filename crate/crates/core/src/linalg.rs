//! Small dense vector and matrix helpers.
//!
//! Vectors are plain `Vec<f64>` / `&[f64]`; matrices are row-major [`Matrix`]
//! values. Anything heavier (determinants, solves) goes through `nalgebra`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn unit(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(scale(a, 1.0 / n))
    } else {
        None
    }
}

/// The `i`-th standard basis vector of `R^n`.
pub fn unit_vector(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Orthonormalize `v` against the (orthonormal) vectors in `basis`.
/// Returns `None` when the residual is below `tol`.
pub fn gram_schmidt_step(basis: &[Vec<f64>], v: &[f64], tol: f64) -> Option<Vec<f64>> {
    let mut r = v.to_vec();
    // two passes for stability
    for _ in 0..2 {
        for b in basis {
            let c = dot(&r, b);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
    }
    let n = norm(&r);
    if n <= tol {
        None
    } else {
        Some(scale(&r, 1.0 / n))
    }
}

/// Dense row-major square or rectangular matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        Matrix::from_rows(cols).transpose()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matrix/vector shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Mᵀ x`
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len(), "matrix/vector shape mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j] += self.get(i, j) * x[i];
            }
        }
        out
    }

    pub fn determinant(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        if self.rows == 0 {
            return 1.0;
        }
        self.to_nalgebra().determinant()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Deviation of `MᵀM` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        self.transpose().mul(self).max_abs_diff(&Matrix::identity(self.cols))
    }
}

/// Least-squares coefficients `c` with `Σ c_k basis_k ≈ v`, together with the
/// residual norm. Basis vectors must be linearly independent.
pub fn coefficients_in_basis(basis: &[Vec<f64>], v: &[f64]) -> Option<(Vec<f64>, f64)> {
    let k = basis.len();
    if k == 0 {
        return Some((Vec::new(), norm(v)));
    }
    let gram = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &basis[j]));
    let rhs = nalgebra::DVector::from_iterator(k, basis.iter().map(|b| dot(b, v)));
    let sol = gram.lu().solve(&rhs)?;
    let coeffs: Vec<f64> = sol.iter().copied().collect();
    let mut recon = vec![0.0; v.len()];
    for (c, b) in coeffs.iter().zip(basis) {
        for (r, bi) in recon.iter_mut().zip(b) {
            *r += c * bi;
        }
    }
    let resid = norm(&sub(v, &recon));
    Some((coeffs, resid))
}

/// Rank of a set of vectors (Gram-Schmidt with absolute tolerance).
pub fn rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        if let Some(u) = gram_schmidt_step(&basis, v, tol) {
            basis.push(u);
        }
    }
    basis.len()
}

/// Orthonormal basis (as columns) of the subspace `{x : Σ x_i = 0}` of `R^n`.
pub fn sum_zero_basis(n: usize) -> Matrix {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 1..n {
        // (1,...,1,-k,0,...) with k ones
        let mut v = vec![0.0; n];
        for vi in v.iter_mut().take(k) {
            *vi = 1.0;
        }
        v[k] = -(k as f64);
        basis.push(unit(&v).expect("nonzero"));
    }
    // put e1 - e2 direction first for readability: already the k=1 vector
    Matrix::from_columns(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_zero_basis_is_orthonormal() {
        for n in 2..6 {
            let b = sum_zero_basis(n);
            assert_eq!(b.rows, n);
            assert_eq!(b.cols, n - 1);
            assert!(b.orthogonality_defect() < 1e-12);
            for j in 0..b.cols {
                let s: f64 = b.column(j).iter().sum();
                assert!(s.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn determinant_of_permutation() {
        let p = Matrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert!((p.determinant() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_coefficients() {
        let basis = vec![vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0]];
        let (c, r) = coefficients_in_basis(&basis, &[1.0, 0.0, -1.0]).unwrap();
        assert!(r < 1e-12);
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
    }
}
