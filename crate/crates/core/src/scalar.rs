//! Lyapunov exponents of one-dimensional maps.
//!
//! Two estimators run on the same orbit `x_0, x_1, ...`:
//!
//! - derivative sum: `(1/n) Σ ln|f'(x_i)|` for `i = 0..n-1`;
//! - finite difference: `f'(x_i)` replaced by `(f(x_i + ε) - x_{i+1}) / ε`,
//!   re-seeding the perturbation from the true orbit at every step.
//!
//! Both clamp the magnitude inside the logarithm at a floor (default
//! `1e-300`), so a superstable orbit passing through a critical point yields
//! a large negative but finite value and a non-zero `floor_hits` count.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::maps::{is_divergent, DiscreteMap, JacobianMode};
use crate::parallel::map_ordered;

pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_LOG_FLOOR: f64 = 1e-300;
pub const DEFAULT_STEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateMethod {
    DerivativeSum,
    FiniteDifference,
    Benettin,
    Qr,
    DirectPerturbation,
}

impl EstimateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateMethod::DerivativeSum => "derivative_sum",
            EstimateMethod::FiniteDifference => "finite_difference",
            EstimateMethod::Benettin => "benettin",
            EstimateMethod::Qr => "qr",
            EstimateMethod::DirectPerturbation => "direct_perturbation",
        }
    }
}

impl fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One exponent, in nats per iteration, with the settings that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub value: f64,
    pub method: EstimateMethod,
    pub steps: usize,
    /// Perturbation size; 0 when the method does not use one.
    pub epsilon: f64,
    pub burn_in: usize,
    pub floor_hits: usize,
    /// Index (into the summed orbit) of the first clamped term.
    pub first_floor_step: Option<usize>,
    pub diverged: bool,
}

impl LyapunovEstimate {
    fn flagged(method: EstimateMethod, steps: usize, epsilon: f64, burn_in: usize) -> Self {
        LyapunovEstimate {
            value: f64::NAN,
            method,
            steps,
            epsilon,
            burn_in,
            floor_hits: 0,
            first_floor_step: None,
            diverged: true,
        }
    }
}

/// Scalar wrapper around a one-dimensional [`DiscreteMap`].
struct Scalar<'a, M: ?Sized> {
    map: &'a M,
    jac: SquareMatrix,
}

impl<'a, M: DiscreteMap + ?Sized> Scalar<'a, M> {
    fn new(map: &'a M) -> Result<Self> {
        if map.dimension() != 1 {
            return Err(Error::Dimension {
                expected: 1,
                found: map.dimension(),
            });
        }
        Ok(Scalar {
            map,
            jac: SquareMatrix::zeros(1),
        })
    }

    #[inline]
    fn apply(&self, x: f64) -> f64 {
        let mut out = [0.0];
        self.map.apply(&[x], &mut out);
        out[0]
    }

    #[inline]
    fn derivative(&mut self, x: f64) -> f64 {
        self.map
            .jacobian_into(&[x], JacobianMode::Corrected, &mut self.jac);
        self.jac[(0, 0)]
    }

    fn burn(&self, mut x: f64, burn_in: usize) -> Result<f64> {
        if is_divergent(&[x]) {
            return Err(Error::Divergence { step: 0 });
        }
        for step in 1..=burn_in {
            x = self.apply(x);
            if is_divergent(&[x]) {
                return Err(Error::Divergence { step });
            }
        }
        Ok(x)
    }
}

#[derive(Default)]
struct FloorTracker {
    hits: usize,
    first: Option<usize>,
}

impl FloorTracker {
    #[inline]
    fn ln_clamped(&mut self, magnitude: f64, floor: f64, index: usize) -> f64 {
        if magnitude < floor {
            self.hits += 1;
            self.first.get_or_insert(index);
            floor.ln()
        } else {
            magnitude.ln()
        }
    }
}

fn check_common(n: usize, log_floor: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("step count n must be at least 1"));
    }
    if !(log_floor > 0.0) {
        return Err(Error::invalid("log floor must be positive"));
    }
    Ok(())
}

/// `(1/n) Σ_{i=0}^{n-1} ln max(|f'(x_i)|, log_floor)` over the orbit of `x0`
/// after `burn_in` discarded steps.
pub fn lyapunov_derivative_sum<M: DiscreteMap + ?Sized>(
    map: &M,
    x0: f64,
    n: usize,
    burn_in: usize,
    log_floor: f64,
) -> Result<LyapunovEstimate> {
    check_common(n, log_floor)?;
    let mut f = Scalar::new(map)?;
    let mut x = f.burn(x0, burn_in)?;
    let mut floor = FloorTracker::default();
    let mut sum = 0.0;

    for i in 0..n {
        sum += floor.ln_clamped(f.derivative(x).abs(), log_floor, i);
        if i + 1 < n {
            x = f.apply(x);
            if is_divergent(&[x]) {
                return Err(Error::Divergence {
                    step: burn_in + i + 1,
                });
            }
        }
    }

    Ok(LyapunovEstimate {
        value: sum / n as f64,
        method: EstimateMethod::DerivativeSum,
        steps: n,
        epsilon: 0.0,
        burn_in,
        floor_hits: floor.hits,
        first_floor_step: floor.first,
        diverged: false,
    })
}

/// Finite-difference estimate with no burn-in and the default log floor.
///
/// The first term uses `x_0`, then one term per step, `n` terms in total,
/// each `ln(|f(x_i + ε) - x_{i+1}| / ε)`. A zero separation is clamped at the
/// log floor and counted in `floor_hits` (`first_floor_step` holds its index).
pub fn lyapunov_finite_difference<M: DiscreteMap + ?Sized>(
    map: &M,
    x0: f64,
    n: usize,
    epsilon: f64,
) -> Result<LyapunovEstimate> {
    finite_difference(map, x0, n, epsilon, 0, DEFAULT_LOG_FLOOR)
}

fn finite_difference<M: DiscreteMap + ?Sized>(
    map: &M,
    x0: f64,
    n: usize,
    epsilon: f64,
    burn_in: usize,
    log_floor: f64,
) -> Result<LyapunovEstimate> {
    check_common(n, log_floor)?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let f = Scalar::new(map)?;
    let mut x = f.burn(x0, burn_in)?;
    let mut floor = FloorTracker::default();
    let mut sum = 0.0;

    for i in 0..n {
        let next = f.apply(x);
        let separation = (f.apply(x + epsilon) - next).abs();
        sum += floor.ln_clamped(separation / epsilon, log_floor, i);
        x = next;
        if i + 1 < n && is_divergent(&[x]) {
            return Err(Error::Divergence {
                step: burn_in + i + 1,
            });
        }
    }

    Ok(LyapunovEstimate {
        value: sum / n as f64,
        method: EstimateMethod::FiniteDifference,
        steps: n,
        epsilon,
        burn_in,
        floor_hits: floor.hits,
        first_floor_step: floor.first,
        diverged: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ScalarMethod {
    DerivativeSum,
    #[default]
    FiniteDifference,
}

impl FromStr for ScalarMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derivative" | "derivative-sum" | "derivative_sum" => Ok(ScalarMethod::DerivativeSum),
            "finite-diff" | "finite-difference" | "finite_difference" => {
                Ok(ScalarMethod::FiniteDifference)
            }
            other => Err(Error::invalid(format!(
                "unknown 1D method '{other}' (expected derivative or finite-diff)"
            ))),
        }
    }
}

/// Estimator settings shared by single runs and sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarEstimator {
    pub method: ScalarMethod,
    pub steps: usize,
    pub burn_in: usize,
    pub epsilon: f64,
    pub log_floor: f64,
}

impl Default for ScalarEstimator {
    fn default() -> Self {
        ScalarEstimator {
            method: ScalarMethod::FiniteDifference,
            steps: DEFAULT_STEPS,
            burn_in: 0,
            epsilon: DEFAULT_EPSILON,
            log_floor: DEFAULT_LOG_FLOOR,
        }
    }
}

impl ScalarEstimator {
    pub fn derivative_sum() -> Self {
        ScalarEstimator {
            method: ScalarMethod::DerivativeSum,
            ..Self::default()
        }
    }

    pub fn finite_difference() -> Self {
        Self::default()
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn estimate<M: DiscreteMap + ?Sized>(&self, map: &M, x0: f64) -> Result<LyapunovEstimate> {
        match self.method {
            ScalarMethod::DerivativeSum => {
                lyapunov_derivative_sum(map, x0, self.steps, self.burn_in, self.log_floor)
            }
            ScalarMethod::FiniteDifference => finite_difference(
                map,
                x0,
                self.steps,
                self.epsilon,
                self.burn_in,
                self.log_floor,
            ),
        }
    }

    fn estimate_method(&self) -> EstimateMethod {
        match self.method {
            ScalarMethod::DerivativeSum => EstimateMethod::DerivativeSum,
            ScalarMethod::FiniteDifference => EstimateMethod::FiniteDifference,
        }
    }
}

/// Inclusive parameter grid `min, min + step, ...` up to `max` (the last
/// point may overshoot `max` by less than half a step). Points are computed
/// as `min + k * step`, never by accumulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl ParameterGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(Error::invalid("grid bounds and step must be finite"));
        }
        if min > max {
            return Err(Error::invalid(format!("grid min {min} exceeds max {max}")));
        }
        if !(step > 0.0) {
            return Err(Error::invalid("grid step must be positive"));
        }
        Ok(ParameterGrid { min, max, step })
    }

    /// A grid holding the single value `value`.
    pub fn single(value: f64) -> Self {
        ParameterGrid {
            min: value,
            max: value,
            step: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 0.5).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.min + k as f64 * self.step)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub parameter_value: f64,
    pub estimate: LyapunovEstimate,
    /// Set when this grid point failed; `estimate` is then flagged diverged.
    pub error: Option<Error>,
}

/// Evaluates `estimator` at every grid point, building the map for each
/// parameter value with `family`. Records are in ascending parameter order
/// and do not depend on `threads`. Per-point failures become flagged records.
pub fn lyapunov_sweep<M, F>(
    family: F,
    grid: &ParameterGrid,
    estimator: &ScalarEstimator,
    x0: f64,
    threads: Option<usize>,
) -> Result<Vec<SweepRecord>>
where
    M: DiscreteMap,
    F: Fn(f64) -> M + Sync + Send,
{
    let values = grid.values();
    map_ordered(&values, threads, |&r| {
        let map = family(r);
        match estimator.estimate(&map, x0) {
            Ok(estimate) => SweepRecord {
                parameter_value: r,
                estimate,
                error: None,
            },
            Err(e) => SweepRecord {
                parameter_value: r,
                estimate: LyapunovEstimate::flagged(
                    estimator.estimate_method(),
                    estimator.steps,
                    match estimator.method {
                        ScalarMethod::DerivativeSum => 0.0,
                        ScalarMethod::FiniteDifference => estimator.epsilon,
                    },
                    estimator.burn_in,
                ),
                error: Some(e),
            },
        }
    })
}
