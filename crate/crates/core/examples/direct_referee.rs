//! Jacobian-free estimate of the leading exponent: follow two nearby
//! orbits and renormalize their separation. Useful to decide which
//! Jacobian convention is right.

use chaoscope::spectrum::{max_exponent_benettin, max_exponent_direct};
use chaoscope::{Henon, JacobianMode};

fn main() -> chaoscope::Result<()> {
    let henon = Henon::default();
    let x0 = [0.1, 0.1];
    let direct = max_exponent_direct(&henon, &x0, 1e-8, 1_000_000, 1)?;
    println!("direct (two orbits)    {:.5}", direct.exponents[0]);
    for mode in [JacobianMode::Corrected, JacobianMode::Compat] {
        let est = max_exponent_benettin(&henon, &x0, &[1.0, 0.0], 50, 20_000, mode)?;
        let gap = (est.exponents[0] - direct.exponents[0]).abs();
        println!(
            "benettin {mode:<13} {:.5}  (off by {gap:.4})",
            est.exponents[0]
        );
    }
    Ok(())
}
