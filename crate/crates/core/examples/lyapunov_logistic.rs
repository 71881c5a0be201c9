//! Scalar Lyapunov exponent of the logistic map by both 1-D methods,
//! next to the known closed forms.

use chaoscope::scalar::ScalarEstimator;
use chaoscope::Logistic;

fn main() -> chaoscope::Result<()> {
    let cases = [
        (0.9, Some(0.9f64.ln())),
        (2.5, Some(0.5f64.ln())),
        (3.2, None),
        (3.7, None),
        (4.0, Some(2f64.ln())),
    ];
    println!(
        "{:>5} {:>12} {:>12} {:>12}",
        "r", "derivative", "finite-diff", "exact"
    );
    for (r, exact) in cases {
        let map = Logistic::new(r);
        let d = ScalarEstimator::derivative_sum()
            .with_burn_in(100)
            .estimate(&map, 0.1)?;
        let f = ScalarEstimator::finite_difference()
            .with_burn_in(100)
            .estimate(&map, 0.1)?;
        let exact = exact.map_or("-".to_string(), |v| format!("{v:.6}"));
        println!("{r:>5} {:>12.6} {:>12.6} {exact:>12}", d.value, f.value);
    }
    Ok(())
}
