//! Discrete-time maps, their Jacobians, and orbit iteration.
//!
//! Two maps ship built in: the logistic map `x -> r x (1 - x)` and the
//! Hénon map `(x, y) -> (1 + y - a x², b x)`. Anything else implements
//! [`DiscreteMap`] in code.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// Any state component with magnitude above this marks the orbit as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e10;

/// Which Hénon Jacobian to use.
///
/// `Corrected` is the analytic derivative, `∂x'/∂x = -2ax`. `Compat`
/// reproduces the widely circulated variant that drops the factor `a`
/// (`∂x'/∂x = -2x`), so published exponents computed with it can be
/// matched. The two agree for every map other than Hénon, and the
/// determinant (`-b`) is the same in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum JacobianMode {
    #[default]
    Corrected,
    Compat,
}

impl JacobianMode {
    pub fn as_str(self) -> &'static str {
        match self {
            JacobianMode::Corrected => "corrected",
            JacobianMode::Compat => "paper-compat",
        }
    }
}

impl fmt::Display for JacobianMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for JacobianMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(JacobianMode::Corrected),
            "paper-compat" | "paper_compat" | "compat" => Ok(JacobianMode::Compat),
            other => Err(Error::invalid(format!(
                "unknown jacobian mode '{other}' (expected corrected or paper-compat)"
            ))),
        }
    }
}

/// A point in state space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(components: Vec<f64>) -> Self {
        StateVector(components)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for StateVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        StateVector(v)
    }
}

impl From<&[f64]> for StateVector {
    fn from(v: &[f64]) -> Self {
        StateVector(v.to_vec())
    }
}

impl From<f64> for StateVector {
    fn from(x: f64) -> Self {
        StateVector(vec![x])
    }
}

impl<const N: usize> From<[f64; N]> for StateVector {
    fn from(v: [f64; N]) -> Self {
        StateVector(v.to_vec())
    }
}

/// A discrete-time map with fixed parameters.
///
/// Implementations must be pure: the same state (and mode) always gives the
/// same image and the same Jacobian.
pub trait DiscreteMap: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    /// Parameter values, in schema order.
    fn parameters(&self) -> Vec<(&'static str, f64)>;

    /// Writes `f(state)` into `next`.
    fn apply(&self, state: &[f64], next: &mut [f64]);

    /// Writes the Jacobian at `state` into `out` (order = dimension).
    fn jacobian_into(&self, state: &[f64], mode: JacobianMode, out: &mut SquareMatrix);

    fn jacobian(&self, state: &[f64], mode: JacobianMode) -> SquareMatrix {
        let mut out = SquareMatrix::zeros(self.dimension());
        self.jacobian_into(state, mode, &mut out);
        out
    }
}

impl<M: DiscreteMap + ?Sized> DiscreteMap for Box<M> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn parameters(&self) -> Vec<(&'static str, f64)> {
        (**self).parameters()
    }
    fn apply(&self, state: &[f64], next: &mut [f64]) {
        (**self).apply(state, next)
    }
    fn jacobian_into(&self, state: &[f64], mode: JacobianMode, out: &mut SquareMatrix) {
        (**self).jacobian_into(state, mode, out)
    }
}

#[inline]
pub fn logistic_apply(x: f64, r: f64) -> f64 {
    r * x * (1.0 - x)
}

#[inline]
pub fn logistic_derivative(x: f64, r: f64) -> f64 {
    r * (1.0 - 2.0 * x)
}

#[inline]
pub fn henon_apply([x, y]: [f64; 2], a: f64, b: f64) -> [f64; 2] {
    [1.0 + y - a * (x * x), b * x]
}

/// Hénon Jacobian `[[∂x'/∂x, 1], [b, 0]]`; the `y` coordinate does not enter.
#[inline]
pub fn henon_jacobian([x, _y]: [f64; 2], a: f64, b: f64, mode: JacobianMode) -> [[f64; 2]; 2] {
    let dxdx = match mode {
        JacobianMode::Corrected => -2.0 * a * x,
        JacobianMode::Compat => -2.0 * x,
    };
    [[dxdx, 1.0], [b, 0.0]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Logistic {
    pub r: f64,
}

impl Logistic {
    pub fn new(r: f64) -> Self {
        if !(0.0..=4.0).contains(&r) {
            log::warn!("logistic parameter r = {r} is outside [0, 4]; orbits may leave [0, 1]");
        }
        Logistic { r }
    }
}

impl DiscreteMap for Logistic {
    fn name(&self) -> &str {
        "logistic"
    }
    fn dimension(&self) -> usize {
        1
    }
    fn parameters(&self) -> Vec<(&'static str, f64)> {
        vec![("r", self.r)]
    }
    fn apply(&self, state: &[f64], next: &mut [f64]) {
        next[0] = logistic_apply(state[0], self.r);
    }
    fn jacobian_into(&self, state: &[f64], _mode: JacobianMode, out: &mut SquareMatrix) {
        out[(0, 0)] = logistic_derivative(state[0], self.r);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Henon {
    pub a: f64,
    pub b: f64,
}

impl Henon {
    pub fn new(a: f64, b: f64) -> Self {
        Henon { a, b }
    }
}

impl Default for Henon {
    fn default() -> Self {
        Henon { a: 1.4, b: 0.3 }
    }
}

impl DiscreteMap for Henon {
    fn name(&self) -> &str {
        "henon"
    }
    fn dimension(&self) -> usize {
        2
    }
    fn parameters(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.a), ("b", self.b)]
    }
    fn apply(&self, state: &[f64], next: &mut [f64]) {
        let [x, y] = henon_apply([state[0], state[1]], self.a, self.b);
        next[0] = x;
        next[1] = y;
    }
    fn jacobian_into(&self, state: &[f64], mode: JacobianMode, out: &mut SquareMatrix) {
        let j = henon_jacobian([state[0], state[1]], self.a, self.b, mode);
        out[(0, 0)] = j[0][0];
        out[(0, 1)] = j[0][1];
        out[(1, 0)] = j[1][0];
        out[(1, 1)] = j[1][1];
    }
}

/// The linear map `x -> A x`. Its Jacobian is `A` everywhere, which makes
/// it the reference case for every exponent estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: SquareMatrix,
}

impl LinearMap {
    pub fn new(matrix: SquareMatrix) -> Self {
        LinearMap { matrix }
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }
}

impl DiscreteMap for LinearMap {
    fn name(&self) -> &str {
        "linear"
    }
    fn dimension(&self) -> usize {
        self.matrix.order()
    }
    fn parameters(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }
    fn apply(&self, state: &[f64], next: &mut [f64]) {
        self.matrix.mul_vec_into(state, next);
    }
    fn jacobian_into(&self, _state: &[f64], _mode: JacobianMode, out: &mut SquareMatrix) {
        out.clone_from(&self.matrix);
    }
}

/// One named parameter slot of a built-in map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    /// Inclusive legal range. Values outside it are accepted with a warning.
    pub range: (f64, f64),
}

/// A built-in map: name, dimension, parameter schema and default initial state.
#[derive(Debug, Clone, Copy)]
pub struct MapDefinition {
    pub name: &'static str,
    pub dimension: usize,
    pub parameters: &'static [ParamSpec],
    pub default_initial_state: &'static [f64],
    build: fn(&[f64]) -> Box<dyn DiscreteMap>,
}

pub const LOGISTIC: MapDefinition = MapDefinition {
    name: "logistic",
    dimension: 1,
    parameters: &[ParamSpec {
        name: "r",
        default: 4.0,
        range: (0.0, 4.0),
    }],
    default_initial_state: &[0.1],
    build: |p| Box::new(Logistic::new(p[0])),
};

pub const HENON: MapDefinition = MapDefinition {
    name: "henon",
    dimension: 2,
    parameters: &[
        ParamSpec {
            name: "a",
            default: 1.4,
            range: (f64::NEG_INFINITY, f64::INFINITY),
        },
        ParamSpec {
            name: "b",
            default: 0.3,
            range: (f64::NEG_INFINITY, f64::INFINITY),
        },
    ],
    default_initial_state: &[0.1, 0.1],
    build: |p| Box::new(Henon::new(p[0], p[1])),
};

pub const BUILTIN_MAPS: &[MapDefinition] = &[LOGISTIC, HENON];

pub fn lookup(name: &str) -> Option<&'static MapDefinition> {
    BUILTIN_MAPS.iter().find(|d| d.name == name)
}

impl MapDefinition {
    /// Resolves parameter values: schema defaults, overridden by `overrides`.
    /// Unknown names and non-finite values are rejected.
    pub fn resolve(&self, overrides: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
        if let Some(unknown) = overrides
            .keys()
            .find(|k| !self.parameters.iter().any(|p| p.name == k.as_str()))
        {
            let known: Vec<&str> = self.parameters.iter().map(|p| p.name).collect();
            return Err(Error::invalid(format!(
                "map '{}' has no parameter '{unknown}' (known: {})",
                self.name,
                known.join(", ")
            )));
        }
        self.parameters
            .iter()
            .map(|spec| {
                let v = overrides.get(spec.name).copied().unwrap_or(spec.default);
                if !v.is_finite() {
                    return Err(Error::invalid(format!(
                        "parameter {} must be finite",
                        spec.name
                    )));
                }
                if v < spec.range.0 || v > spec.range.1 {
                    log::warn!(
                        "{} parameter {} = {v} is outside [{}, {}]",
                        self.name,
                        spec.name,
                        spec.range.0,
                        spec.range.1
                    );
                }
                Ok(v)
            })
            .collect()
    }

    pub fn instantiate(&self, overrides: &BTreeMap<String, f64>) -> Result<Box<dyn DiscreteMap>> {
        let values = self.resolve(overrides)?;
        Ok(self.build_with(&values))
    }

    /// Builds the map from parameter values given in schema order.
    pub fn build_with(&self, values: &[f64]) -> Box<dyn DiscreteMap> {
        assert_eq!(values.len(), self.parameters.len());
        (self.build)(values)
    }
}

/// Recorded orbit of a map.
///
/// `state(k)` is `f^k(x0)` for `k >= 1`; the initial state is kept apart.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub map_name: String,
    pub parameters: Vec<(String, f64)>,
    pub initial_state: StateVector,
    pub final_state: StateVector,
    /// Number of map applications performed.
    pub steps_taken: usize,
    /// First step at which the divergence threshold was exceeded.
    pub diverged_at: Option<usize>,
    dimension: usize,
    states: Vec<f64>,
}

impl Trajectory {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of recorded states (0 when recording was off).
    pub fn len(&self) -> usize {
        self.states.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Recorded state at `step` (1-based: `state(1) = f(x0)`).
    pub fn state(&self, step: usize) -> &[f64] {
        assert!(step >= 1 && step <= self.len(), "step {step} not recorded");
        let start = (step - 1) * self.dimension;
        &self.states[start..start + self.dimension]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.states.chunks_exact(self.dimension)
    }
}

#[inline]
pub(crate) fn is_divergent(state: &[f64]) -> bool {
    state.iter().any(|c| !(c.abs() <= DIVERGENCE_THRESHOLD))
}

pub(crate) fn check_dimension(map: &(impl DiscreteMap + ?Sized), len: usize) -> Result<()> {
    if len != map.dimension() {
        return Err(Error::Dimension {
            expected: map.dimension(),
            found: len,
        });
    }
    Ok(())
}

/// Iterates `map` for `steps` steps from `x0`.
///
/// Divergence does not fail the call: iteration stops at the first state
/// with a component beyond [`DIVERGENCE_THRESHOLD`], that state is kept,
/// and `diverged_at` records the step.
pub fn iterate_map<M: DiscreteMap + ?Sized>(
    map: &M,
    x0: &[f64],
    steps: usize,
    record: bool,
) -> Result<Trajectory> {
    check_dimension(map, x0.len())?;
    let n = map.dimension();
    let mut states = Vec::with_capacity(if record { steps * n } else { 0 });
    let mut current = x0.to_vec();
    let mut next = vec![0.0; n];
    let mut diverged_at = None;
    let mut steps_taken = 0;

    for step in 1..=steps {
        map.apply(&current, &mut next);
        std::mem::swap(&mut current, &mut next);
        steps_taken = step;
        if record {
            states.extend_from_slice(&current);
        }
        if is_divergent(&current) {
            diverged_at = Some(step);
            break;
        }
    }

    Ok(Trajectory {
        map_name: map.name().to_string(),
        parameters: map
            .parameters()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        initial_state: StateVector::from(x0),
        final_state: StateVector::new(current),
        steps_taken,
        diverged_at,
        dimension: n,
        states,
    })
}
