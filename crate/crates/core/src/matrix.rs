//! Dense row-major matrices.
//!
//! Demand data (`m × n`) and center configurations (`k × n`) both live in a
//! [`Matrix`]. The Frobenius inner product and norm are the metric used by
//! every solver stopping rule.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// A `k × n` matrix whose rows are candidate centers.
pub type CenterMatrix = Matrix;

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::ShapeMismatch {
                    expected: format!("{cols} columns"),
                    found: format!("{} columns in row {i}", r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
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

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics; an n = 0 matrix has no meaningful rows anyway
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.row_iter().map(<[f64]>::to_vec).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Frobenius inner product `trace(A Bᵀ)`.
    pub fn dot(&self, other: &Matrix) -> f64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `‖self − other‖_F`
    pub fn fro_dist(&self, other: &Matrix) -> f64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.shape(), other.shape());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `self + t · dir`
    pub fn add_scaled(&self, t: f64, dir: &Matrix) -> Matrix {
        debug_assert_eq!(self.shape(), dir.shape());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&dir.data)
                .map(|(a, d)| a + t * d)
                .collect(),
        }
    }

    pub fn scale(&mut self, t: f64) {
        self.data.iter_mut().for_each(|v| *v *= t);
    }

    pub fn add_assign(&mut self, other: &Matrix) {
        debug_assert_eq!(self.shape(), other.shape());
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += b);
    }

    /// Column sums, i.e. `Σ_i row_i`.
    pub fn column_sum(&self) -> Vec<f64> {
        let mut sum = vec![0.0; self.cols];
        for r in self.row_iter() {
            sum.iter_mut().zip(r).for_each(|(s, v)| *s += v);
        }
        sum
    }

    /// Per-column `(min, max)`; `None` for an empty matrix.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let first = self.row_iter().next()?;
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for r in self.row_iter() {
            for d in 0..self.cols {
                lo[d] = lo[d].min(r[d]);
                hi[d] = hi[d].max(r[d]);
            }
        }
        Some((lo, hi))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_rows_rejected() {
        let err = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn frobenius() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let b = Matrix::zeros(2, 2);
        assert_eq!(a.dot(&a), 30.0);
        assert_eq!(a.fro_dist(&b), 30f64.sqrt());
        assert_eq!(a.column_sum(), vec![4.0, 6.0]);
        let (lo, hi) = a.bounding_box().unwrap();
        assert_eq!((lo, hi), (vec![1.0, 2.0], vec![3.0, 4.0]));
    }
}
