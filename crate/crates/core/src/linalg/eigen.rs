use std::f64::consts::PI;

use super::matrix::SquareMatrix;
use crate::error::{Error, Result};

/// Eigenvalues of a real symmetric matrix of order 1, 2 or 3, in descending
/// order, from the closed-form roots of the characteristic polynomial.
///
/// Only the upper triangle is read.
pub fn symmetric_eigenvalues(m: &SquareMatrix) -> Result<Vec<f64>> {
    match m.order() {
        1 => Ok(vec![m[(0, 0)]]),
        2 => {
            let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
            let mean = 0.5 * (a + d);
            let radius = (0.5 * (a - d)).hypot(b);
            Ok(vec![mean + radius, mean - radius])
        }
        3 => Ok(symmetric_3x3(m)),
        n => Err(Error::invalid(format!(
            "closed-form symmetric eigenvalues support orders 1 to 3, got {n}"
        ))),
    }
}

fn symmetric_3x3(m: &SquareMatrix) -> Vec<f64> {
    let off = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
    let diag = [m[(0, 0)], m[(1, 1)], m[(2, 2)]];
    if off == 0.0 {
        let mut d = diag.to_vec();
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    let q = (diag[0] + diag[1] + diag[2]) / 3.0;
    let p2 = diag.iter().map(|d| (d - q).powi(2)).sum::<f64>() + 2.0 * off;
    let p = (p2 / 6.0).sqrt();

    // B = (A - qI) / p, half its determinant is the cosine of 3*phi
    let mut b = SquareMatrix::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            let (r, c) = if i <= j { (i, j) } else { (j, i) };
            b[(i, j)] = (m[(r, c)] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let half_det = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = half_det.acos() / 3.0;

    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    vec![largest, middle, smallest]
}
