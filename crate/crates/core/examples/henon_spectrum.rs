//! Lyapunov spectrum of the Hénon map at (a, b) = (1.4, 0.3).
//!
//! Both Jacobian conventions are shown: the corrected one and the
//! `-2x` variant that drops the factor `a`.

use chaoscope::spectrum::{max_exponent_benettin, second_exponent_from_determinant, spectrum_qr};
use chaoscope::{Henon, JacobianMode};

fn main() -> chaoscope::Result<()> {
    let henon = Henon::new(1.4, 0.3);
    let x0 = [0.1, 0.1];

    for mode in [JacobianMode::Corrected, JacobianMode::Compat] {
        let ben = max_exponent_benettin(&henon, &x0, &[1.0, 0.0], 50, 20_000, mode)?;
        let l2 = second_exponent_from_determinant(ben.exponents[0], henon.b)?;
        let qr = spectrum_qr(&henon, &x0, 100_000, mode)?;
        println!("{mode}");
        println!("  benettin  ({:.6}, {:.6})", ben.exponents[0], l2);
        println!(
            "  qr        ({:.6}, {:.6})",
            qr.exponents[0], qr.exponents[1]
        );
        println!("  sum - ln b = {:.2e}", qr.sum() - henon.b.ln());
    }
    Ok(())
}
