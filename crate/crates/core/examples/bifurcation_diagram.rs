//! Orbit diagram of the logistic map, rendered as text.

use chaoscope::bifurcation::{bifurcation_diagram, count_attractor_points};
use chaoscope::scalar::ParameterGrid;
use chaoscope::Logistic;

const WIDTH: usize = 100;

fn main() -> chaoscope::Result<()> {
    let rs = ParameterGrid::new(2.8, 4.0, 0.02)?.values();
    let records = bifurcation_diagram(Logistic::new, &rs, 0.1, 1000, 200, None)?;

    for rec in &records {
        let mut row = vec![b' '; WIDTH];
        for &x in &rec.samples {
            row[((x * WIDTH as f64) as usize).min(WIDTH - 1)] = b'*';
        }
        let points = count_attractor_points(&rec.samples, 1e-3);
        let label = if points > 16 {
            "chaos".to_string()
        } else {
            points.to_string()
        };
        println!(
            "{:.2} |{}| {label}",
            rec.parameter_value,
            String::from_utf8(row).unwrap()
        );
    }
    Ok(())
}
