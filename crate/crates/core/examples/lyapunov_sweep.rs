//! Exponent across the logistic family, computed in parallel, written as
//! CSV to stdout.
//!
//! cargo run --release --example lyapunov_sweep > sweep.csv

use std::io::Write;

use chaoscope::scalar::{lyapunov_sweep, ParameterGrid, ScalarEstimator};
use chaoscope::Logistic;

fn main() -> chaoscope::Result<()> {
    let grid = ParameterGrid::new(2.5, 4.0, 0.001)?;
    let estimator = ScalarEstimator::finite_difference().with_steps(10_000);
    let records = lyapunov_sweep(Logistic::new, &grid, &estimator, 0.1, None)?;

    let mut out = std::io::stdout().lock();
    writeln!(out, "r,lyapunov").unwrap();
    for rec in &records {
        writeln!(out, "{:.3},{:.6}", rec.parameter_value, rec.estimate.value).unwrap();
    }

    let onset = records
        .windows(2)
        .find(|w| {
            w[0].parameter_value > 3.5 && w[0].estimate.value < 0.0 && w[1].estimate.value > 0.0
        })
        .map(|w| w[1].parameter_value);
    if let Some(r) = onset {
        eprintln!("first positive exponent after r=3.5 at r={r:.3}");
    }
    Ok(())
}
