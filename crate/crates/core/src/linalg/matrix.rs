use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense square matrix of order `n`, stored row-major.
///
/// Sized for tangent-space work on low-dimensional maps; nothing here is
/// tuned for large orders.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(order: usize) -> Self {
        assert!(order >= 1, "matrix order must be at least 1");
        SquareMatrix {
            order,
            entries: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major entries. The entry count must be a
    /// perfect square and every entry finite.
    pub fn from_row_major(order: usize, entries: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("matrix order must be at least 1"));
        }
        if entries.len() != order * order {
            return Err(Error::Dimension {
                expected: order * order,
                found: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(SquareMatrix { order, entries })
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        assert!(N >= 1, "matrix order must be at least 1");
        SquareMatrix {
            order: N,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.order;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, rhs: &SquareMatrix) -> SquareMatrix {
        let mut out = SquareMatrix::zeros(self.order);
        self.mul_into(rhs, &mut out);
        out
    }

    /// `out = self * rhs`. `out` must not alias either operand.
    pub fn mul_into(&self, rhs: &SquareMatrix, out: &mut SquareMatrix) {
        let n = self.order;
        assert_eq!(rhs.order, n, "order mismatch in matrix product");
        assert_eq!(out.order, n, "order mismatch in matrix product output");
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.entries[i * n + k] * rhs.entries[k * n + j];
                }
                out.entries[i * n + j] = acc;
            }
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.order];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn mul_vec_into(&self, v: &[f64], out: &mut [f64]) {
        let n = self.order;
        assert_eq!(v.len(), n, "vector length must equal matrix order");
        assert_eq!(out.len(), n, "output length must equal matrix order");
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    pub fn scale_in_place(&mut self, factor: f64) {
        self.entries.iter_mut().for_each(|e| *e *= factor);
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        assert_eq!(self.order, other.order);
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// True when every entry strictly below the diagonal is exactly zero.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.order).all(|i| (0..i).all(|j| self[(i, j)] == 0.0))
    }

    /// Determinant. Closed form up to order 3, partial-pivot elimination above.
    pub fn determinant(&self) -> f64 {
        let m = &self.entries;
        match self.order {
            1 => m[0],
            2 => m[0] * m[3] - m[1] * m[2],
            3 => {
                m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                    + m[2] * (m[3] * m[7] - m[4] * m[6])
            }
            n => {
                let mut a = m.clone();
                let mut det = 1.0;
                for k in 0..n {
                    let pivot = (k..n)
                        .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
                        .unwrap_or(k);
                    if a[pivot * n + k] == 0.0 {
                        return 0.0;
                    }
                    if pivot != k {
                        for j in 0..n {
                            a.swap(k * n + j, pivot * n + j);
                        }
                        det = -det;
                    }
                    let p = a[k * n + k];
                    det *= p;
                    for i in (k + 1)..n {
                        let f = a[i * n + k] / p;
                        for j in k..n {
                            a[i * n + j] -= f * a[k * n + j];
                        }
                    }
                }
                det
            }
        }
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.order + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.order + j]
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.order).map(|i| self.row(i)).collect();
        f.debug_struct("SquareMatrix")
            .field("order", &self.order)
            .field("rows", &rows)
            .finish()
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = SquareMatrix::from_rows([[1.0, 2.0], [3.0, 4.0]]);
        let b = SquareMatrix::from_rows([[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(a.mul(&b), SquareMatrix::from_rows([[2.0, 1.0], [4.0, 3.0]]));
        assert_eq!(
            a.transpose(),
            SquareMatrix::from_rows([[1.0, 3.0], [2.0, 4.0]])
        );
        assert_eq!(a.mul_vec(&[1.0, -1.0]), vec![-1.0, -1.0]);
    }

    #[test]
    fn determinants_by_order() {
        assert_eq!(
            SquareMatrix::from_rows([[-0.2, 1.0], [0.3, 0.0]]).determinant(),
            -0.3
        );
        let m3 = SquareMatrix::from_rows([[2.0, 0.0, 1.0], [1.0, 3.0, 2.0], [1.0, 1.0, 2.0]]);
        assert!((m3.determinant() - 6.0).abs() < 1e-14);
        let m4 = SquareMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m4.determinant(), 24.0);
        let mut p4 = SquareMatrix::zeros(4);
        p4[(0, 1)] = 1.0;
        p4[(1, 0)] = 1.0;
        p4[(2, 2)] = 1.0;
        p4[(3, 3)] = 1.0;
        assert_eq!(p4.determinant(), -1.0);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            SquareMatrix::from_row_major(2, vec![1.0; 3]),
            Err(Error::Dimension {
                expected: 4,
                found: 3
            })
        ));
        assert!(SquareMatrix::from_row_major(1, vec![f64::NAN]).is_err());
        assert!(SquareMatrix::from_row_major(0, vec![]).is_err());
    }
}
