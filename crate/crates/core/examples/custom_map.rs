//! Plugging in a map of your own: Arnold's cat map on the unit torus.
//! Its exponents are ±ln((3+√5)/2).

use chaoscope::linalg::SquareMatrix;
use chaoscope::spectrum::spectrum_qr;
use chaoscope::{DiscreteMap, JacobianMode};

struct CatMap;

impl DiscreteMap for CatMap {
    fn name(&self) -> &str {
        "cat"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn parameters(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }

    fn apply(&self, s: &[f64], next: &mut [f64]) {
        next[0] = (2.0 * s[0] + s[1]).rem_euclid(1.0);
        next[1] = (s[0] + s[1]).rem_euclid(1.0);
    }

    fn jacobian_into(&self, _s: &[f64], _mode: JacobianMode, out: &mut SquareMatrix) {
        *out = SquareMatrix::from_rows([[2.0, 1.0], [1.0, 1.0]]);
    }
}

fn main() -> chaoscope::Result<()> {
    let est = spectrum_qr(&CatMap, &[0.3, 0.7], 100_000, JacobianMode::Corrected)?;
    let exact = ((3.0 + 5f64.sqrt()) / 2.0).ln();
    println!(
        "estimated ({:.6}, {:.6})",
        est.exponents[0], est.exponents[1]
    );
    println!("exact     ({exact:.6}, {:.6})", -exact);
    Ok(())
}
