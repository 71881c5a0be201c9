//! Orbit (bifurcation) diagrams for one-dimensional map families.

use crate::error::{Error, Result};
use crate::maps::{is_divergent, DiscreteMap};
use crate::parallel::map_ordered;

pub const DEFAULT_TRANSIENT: usize = 100;
pub const DEFAULT_ITERATIONS: usize = 100;
pub const DEFAULT_CLUSTER_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationRecord {
    pub parameter_value: f64,
    /// Post-transient states, `num_iterations` of them, or empty if the
    /// orbit diverged.
    pub samples: Vec<f64>,
    pub diverged: bool,
}

fn orbit_samples<M: DiscreteMap + ?Sized>(
    map: &M,
    x0: f64,
    num_transient: usize,
    num_iterations: usize,
) -> Option<Vec<f64>> {
    let mut x = [x0];
    let mut next = [0.0];
    for _ in 0..num_transient {
        map.apply(&x, &mut next);
        x = next;
        if is_divergent(&x) {
            return None;
        }
    }
    let mut samples = Vec::with_capacity(num_iterations);
    for _ in 0..num_iterations {
        map.apply(&x, &mut next);
        x = next;
        if is_divergent(&x) {
            return None;
        }
        samples.push(x[0]);
    }
    Some(samples)
}

/// For each parameter value: iterate `num_transient` steps from `x0`
/// discarding them, then record the next `num_iterations` states.
///
/// Output order follows `r_values` regardless of `threads`.
pub fn bifurcation_diagram<M, F>(
    family: F,
    r_values: &[f64],
    x0: f64,
    num_transient: usize,
    num_iterations: usize,
    threads: Option<usize>,
) -> Result<Vec<BifurcationRecord>>
where
    M: DiscreteMap,
    F: Fn(f64) -> M + Sync + Send,
{
    if num_iterations == 0 {
        return Err(Error::invalid("num_iterations must be at least 1"));
    }
    if let Some(&r) = r_values.first() {
        let dim = family(r).dimension();
        if dim != 1 {
            return Err(Error::Dimension {
                expected: 1,
                found: dim,
            });
        }
    }
    map_ordered(r_values, threads, |&r| {
        let map = family(r);
        match orbit_samples(&map, x0, num_transient, num_iterations) {
            Some(samples) => BifurcationRecord {
                parameter_value: r,
                samples,
                diverged: false,
            },
            None => BifurcationRecord {
                parameter_value: r,
                samples: Vec::new(),
                diverged: true,
            },
        }
    })
}

/// Number of clusters in `samples`: sort, then split wherever two adjacent
/// values differ by more than `tolerance`. Empty input gives 0.
pub fn count_attractor_points(samples: &[f64], tolerance: f64) -> usize {
    assert!(tolerance > 0.0, "tolerance must be positive");
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    match sorted.first() {
        None => 0,
        Some(_) => {
            1 + sorted
                .windows(2)
                .filter(|w| w[1] - w[0] > tolerance)
                .count()
        }
    }
}
