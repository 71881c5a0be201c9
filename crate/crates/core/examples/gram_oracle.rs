//! Finite-time exponents from the eigenvalues of (J^t)^T J^t, compared with
//! the QR estimate over the same horizon.

use chaoscope::spectrum::spectrum_qr;
use chaoscope::tangent::gram_matrix_spectrum_oracle;
use chaoscope::{Henon, JacobianMode};

fn main() -> chaoscope::Result<()> {
    let henon = Henon::default();
    println!("{:>4} {:>22} {:>22}", "t", "gram", "qr");
    for t in [10, 25, 50, 100, 200] {
        let gram = gram_matrix_spectrum_oracle(&henon, &[0.1, 0.1], t, JacobianMode::Corrected)?;
        let qr = spectrum_qr(&henon, &[0.1, 0.1], t, JacobianMode::Corrected)?;
        println!(
            "{t:>4} {:>10.5} {:>11.5} {:>10.5} {:>11.5}",
            gram.exponents[0], gram.exponents[1], qr.exponents[0], qr.exponents[1]
        );
    }
    Ok(())
}
