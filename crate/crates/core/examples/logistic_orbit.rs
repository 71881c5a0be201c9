//! Iterate the logistic map and print the orbit.
//!
//! cargo run --example logistic_orbit -- 3.7 0.2 20

use chaoscope::maps::iterate_map;
use chaoscope::Logistic;

fn main() -> chaoscope::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<f64>().expect("numeric argument"));
    let r = args.next().unwrap_or(3.7);
    let x0 = args.next().unwrap_or(0.2);
    let steps = args.next().unwrap_or(20.0) as usize;

    let orbit = iterate_map(&Logistic::new(r), &[x0], steps, true)?;
    println!("r = {r}, x0 = {x0}");
    for (k, x) in orbit.states().enumerate() {
        let bar = "#".repeat((x[0] * 60.0).round() as usize);
        println!("{:>4} {:.6} {bar}", k + 1, x[0]);
    }
    if let Some(step) = orbit.diverged_at {
        println!("diverged at step {step}");
    }
    Ok(())
}
