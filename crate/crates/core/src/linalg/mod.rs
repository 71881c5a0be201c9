//! Small dense linear algebra: matrices, Householder QR and closed-form
//! symmetric eigenvalues.

mod eigen;
mod matrix;
mod qr;

pub use eigen::symmetric_eigenvalues;
pub use matrix::{norm, SquareMatrix};
pub use qr::{qr_factorize, QrPair, RANK_FLOOR};
