//! Small dense matrices.
//!
//! Boundary algebra works on matrices of size at most 5x5 and the 1D SBP
//! operators are at most a few hundred rows, so a row-major `Vec` is enough.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::scalar::{Real, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Builds from row vectors; panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        crate::scalar::max_magnitude(&self.data)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Matrix<T> {
    pub fn symmetric_part(&self) -> Self {
        let half = T::lit(0.5);
        self.add(&self.transpose()).scale(&half)
    }

    fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v.to_f64_lossy()),
        )
    }

    fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = T::lit(m[(i, j)]);
            }
        }
        out
    }

    /// `None` when the matrix is numerically singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        if self.rows == 0 {
            return Some(self.clone());
        }
        let lu = self.to_dmatrix().lu();
        let scale = self.max_abs().to_f64_lossy().max(f64::MIN_POSITIVE);
        let u = lu.u();
        let tiny = (0..self.rows).any(|i| u[(i, i)].abs() <= 1e-14 * scale);
        if tiny {
            return None;
        }
        lu.try_inverse().map(|m| Self::from_dmatrix(&m))
    }

    /// Eigen-decomposition of the symmetric part, eigenvalues ascending.
    ///
    /// Column `k` of the returned matrix is the unit eigenvector of
    /// eigenvalue `k`. Computed in double precision.
    pub fn symmetric_eigen(&self) -> (Vec<T>, Self) {
        assert_eq!(self.rows, self.cols, "eigen of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return (Vec::new(), Self::zeros(0, 0));
        }
        let eig = self.symmetric_part().to_dmatrix().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| T::lit(eig.eigenvalues[i])).collect();
        let mut vectors = Self::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            for k in 0..n {
                vectors[(k, new)] = T::lit(eig.eigenvectors[(k, old)]);
            }
        }
        (values, vectors)
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        let (vals, _) = self.transpose().matmul(self).symmetric_eigen();
        vals.last().copied().unwrap_or_else(T::zero).max(T::zero()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a = Matrix::from_rows(vec![
            vec![4.0, 1.0, 0.5],
            vec![0.0, 3.0, -1.0],
            vec![2.0, 0.0, 1.0],
        ]);
        let inv = a.inverse().unwrap();
        let id = a.matmul(&inv);
        assert!(id.sub(&Matrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(a.inverse().is_none());
    }

    #[test]
    fn eigen_reconstructs() {
        let a = Matrix::from_rows(vec![
            vec![2.0, -1.0, 0.3],
            vec![-1.0, 0.5, 0.7],
            vec![0.3, 0.7, -1.2],
        ]);
        let (vals, vecs) = a.symmetric_eigen();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let rebuilt = vecs.matmul(&Matrix::from_diag(&vals)).matmul(&vecs.transpose());
        assert!(rebuilt.sub(&a).max_abs() < 1e-13);
    }

    #[test]
    fn spectral_norm_of_rank_one() {
        let a = Matrix::from_rows(vec![vec![3.0f64, 4.0]]);
        assert!((a.spectral_norm() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_on_diagonal_and_empty() {
        let (vals, _) = Matrix::from_diag(&[3.0, -1.0]).symmetric_eigen();
        assert_eq!(vals, vec![-1.0, 3.0]);
        let (vals, _) = Matrix::<f64>::zeros(0, 0).symmetric_eigen();
        assert!(vals.is_empty());
    }
}
