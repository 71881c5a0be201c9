//! Householder QR factorization with a non-negative diagonal convention.

use super::matrix::SquareMatrix;
use crate::error::{Error, Result};

/// Diagonal magnitudes of `r` below this are treated as rank deficiency.
pub const RANK_FLOOR: f64 = 1e-300;

/// Result of [`qr_factorize`]: `a = q * r` with `q` orthogonal and `r`
/// upper triangular with a non-negative diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct QrPair {
    pub q: SquareMatrix,
    pub r: SquareMatrix,
}

/// Factors `a` with Householder reflections.
///
/// Entries of `r` below the diagonal are exact zeros. Negative diagonal
/// entries are flipped, with the matching column of `q` negated, so the
/// factorization of a full-rank matrix is unique.
pub fn qr_factorize(a: &SquareMatrix) -> Result<QrPair> {
    let n = a.order();
    let mut r = a.clone();
    let mut q = SquareMatrix::identity(n);
    let mut v = vec![0.0; n];

    for k in 0..n.saturating_sub(1) {
        let col_norm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if col_norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] >= 0.0 {
            -col_norm
        } else {
            col_norm
        };
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let v_sq: f64 = (k..n).map(|i| v[i] * v[i]).sum();
        if v_sq == 0.0 {
            continue;
        }

        // R <- H R on rows k.., columns k+1.. (column k is set explicitly)
        for j in (k + 1)..n {
            let dot: f64 = (k..n).map(|i| v[i] * r[(i, j)]).sum();
            let f = 2.0 * dot / v_sq;
            for i in k..n {
                r[(i, j)] -= f * v[i];
            }
        }
        r[(k, k)] = alpha;
        for i in (k + 1)..n {
            r[(i, k)] = 0.0;
        }

        // Q <- Q H
        for i in 0..n {
            let dot: f64 = (k..n).map(|l| q[(i, l)] * v[l]).sum();
            let f = 2.0 * dot / v_sq;
            for l in k..n {
                q[(i, l)] -= f * v[l];
            }
        }
    }

    for i in 0..n {
        if r[(i, i)] < 0.0 {
            for j in i..n {
                r[(i, j)] = -r[(i, j)];
            }
            for row in 0..n {
                q[(row, i)] = -q[(row, i)];
            }
        }
    }

    if let Some(index) = (0..n).find(|&i| !(r[(i, i)].abs() >= RANK_FLOOR)) {
        return Err(Error::RankDeficiency { index, step: None });
    }

    Ok(QrPair { q, r })
}
