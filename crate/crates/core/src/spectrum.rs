//! Lyapunov spectra of n-dimensional maps.
//!
//! - [`max_exponent_benettin`]: propagate one tangent vector, renormalize it
//!   every `tau` steps, average the logs of the normalization factors.
//! - [`spectrum_qr`]: re-orthonormalize the whole tangent frame each step
//!   (`Q_{k+1} R_{k+1} = J_k Q_k`) and time-average `ln r_ii`.
//! - [`max_exponent_direct`]: Jacobian-free; follows a companion orbit at
//!   distance ε. Independent of any Jacobian choice, so it arbitrates when
//!   two Jacobians disagree.
//! - [`second_exponent_from_determinant`]: for the Hénon map,
//!   `λ₁ + λ₂ = ln b`, so one exponent gives the other.
//!
//! All estimators stream along the orbit and keep O(1) memory in `t`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{norm, qr_factorize, SquareMatrix};
use crate::maps::{check_dimension, is_divergent, DiscreteMap, JacobianMode};
use crate::scalar::{EstimateMethod, LyapunovEstimate};
use crate::tangent::TANGENT_OVERFLOW;

pub const DEFAULT_TAU: usize = 50;
pub const DEFAULT_SEED: u64 = 1;

/// Exponents closer than this keep their diagonal-index order when sorted.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumMethod {
    Benettin,
    Qr,
    DeterminantPair,
    Direct,
}

impl SpectrumMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumMethod::Benettin => "benettin",
            SpectrumMethod::Qr => "qr",
            SpectrumMethod::DeterminantPair => "determinant_pair",
            SpectrumMethod::Direct => "direct",
        }
    }
}

impl fmt::Display for SpectrumMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpectrumMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "benettin" => Ok(SpectrumMethod::Benettin),
            "qr" => Ok(SpectrumMethod::Qr),
            "direct" => Ok(SpectrumMethod::Direct),
            "determinant_pair" | "determinant-pair" => Ok(SpectrumMethod::DeterminantPair),
            other => Err(Error::invalid(format!(
                "unknown spectrum method '{other}' (expected benettin, qr or direct)"
            ))),
        }
    }
}

/// Exponents in descending order (nats per iteration) with run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub exponents: Vec<f64>,
    pub method: SpectrumMethod,
    pub steps: usize,
    pub renorm_interval: Option<usize>,
    pub renorm_count: Option<usize>,
    pub jacobian_mode: Option<JacobianMode>,
    /// Orbit average of `ln|det J|` (Jacobian-based methods only).
    pub mean_log_abs_det: Option<f64>,
    /// `Σλ_i - mean ln|det J|`; present only when every exponent is known.
    pub det_sum_check: Option<f64>,
    pub seed: Option<u64>,
    /// Times the companion direction was re-drawn after a zero separation.
    pub direction_resets: usize,
}

impl SpectrumEstimate {
    pub fn leading_exponent(&self) -> f64 {
        self.exponents[0]
    }

    pub fn sum(&self) -> f64 {
        self.exponents.iter().sum()
    }

    /// Appends a second exponent obtained from the determinant identity,
    /// turning a single-exponent Benettin run on a 2-D map into a pair.
    pub fn with_second_exponent(mut self, lambda2: f64) -> Self {
        self.exponents.push(lambda2);
        sort_descending(&mut self.exponents);
        self.method = SpectrumMethod::DeterminantPair;
        self.det_sum_check = self.mean_log_abs_det.map(|d| self.sum() - d);
        self
    }

    /// Completes a 2-D Benettin run using the orbit-averaged `ln|det J|`.
    pub fn complete_with_determinant(self) -> Result<Self> {
        if self.exponents.len() != 1 {
            return Err(Error::invalid("expected exactly one exponent to complete"));
        }
        let mean = self
            .mean_log_abs_det
            .ok_or_else(|| Error::invalid("no determinant average recorded for this run"))?;
        let lambda2 = mean - self.exponents[0];
        Ok(self.with_second_exponent(lambda2))
    }

    /// The leading exponent as a [`LyapunovEstimate`].
    pub fn leading(&self) -> LyapunovEstimate {
        let method = match self.method {
            SpectrumMethod::Benettin | SpectrumMethod::DeterminantPair => EstimateMethod::Benettin,
            SpectrumMethod::Qr => EstimateMethod::Qr,
            SpectrumMethod::Direct => EstimateMethod::DirectPerturbation,
        };
        LyapunovEstimate {
            value: self.exponents[0],
            method,
            steps: self.steps,
            epsilon: 0.0,
            burn_in: 0,
            floor_hits: 0,
            first_floor_step: None,
            diverged: false,
        }
    }
}

/// Sorts descending; values within [`TIE_TOLERANCE`] keep their input order.
pub fn sort_descending(values: &mut [f64]) {
    for i in 1..values.len() {
        let mut j = i;
        while j > 0 && values[j] > values[j - 1] + TIE_TOLERANCE {
            values.swap(j, j - 1);
            j -= 1;
        }
    }
}

/// Tangent vector between renormalizations.
#[derive(Debug, Clone)]
pub struct BenettinState {
    current_vector: Vec<f64>,
    scratch: Vec<f64>,
    log_norm_accumulator: f64,
    steps_since_renorm: usize,
    renorm_count: usize,
}

impl BenettinState {
    pub fn new(u0: &[f64]) -> Self {
        BenettinState {
            current_vector: u0.to_vec(),
            scratch: vec![0.0; u0.len()],
            log_norm_accumulator: 0.0,
            steps_since_renorm: 0,
            renorm_count: 0,
        }
    }

    /// `a <- J a`. Returns false once any component passes the overflow bound.
    pub fn advance(&mut self, jacobian: &SquareMatrix) -> bool {
        jacobian.mul_vec_into(&self.current_vector, &mut self.scratch);
        std::mem::swap(&mut self.current_vector, &mut self.scratch);
        self.steps_since_renorm += 1;
        self.current_vector
            .iter()
            .all(|c| c.abs() <= TANGENT_OVERFLOW)
    }

    /// Divides the vector by its Euclidean norm `α` and adds `ln α` to the
    /// accumulator. Returns `α`, or `None` if the vector has collapsed.
    pub fn renormalize(&mut self) -> Option<f64> {
        let alpha = norm(&self.current_vector);
        if !(alpha > 0.0) || !alpha.is_finite() {
            return None;
        }
        self.current_vector.iter_mut().for_each(|c| *c /= alpha);
        self.log_norm_accumulator += alpha.ln();
        self.steps_since_renorm = 0;
        self.renorm_count += 1;
        Some(alpha)
    }

    pub fn vector(&self) -> &[f64] {
        &self.current_vector
    }

    pub fn log_norm_sum(&self) -> f64 {
        self.log_norm_accumulator
    }

    pub fn steps_since_renorm(&self) -> usize {
        self.steps_since_renorm
    }

    pub fn renorm_count(&self) -> usize {
        self.renorm_count
    }
}

/// Walks an orbit one Jacobian at a time, with divergence checks and a
/// running `ln|det J|` sum.
struct OrbitWalker<'a, M: ?Sized> {
    map: &'a M,
    mode: JacobianMode,
    state: Vec<f64>,
    next: Vec<f64>,
    jacobian: SquareMatrix,
    log_abs_det_sum: f64,
}

impl<'a, M: DiscreteMap + ?Sized> OrbitWalker<'a, M> {
    fn new(map: &'a M, x0: &[f64], mode: JacobianMode) -> Result<Self> {
        check_dimension(map, x0.len())?;
        if is_divergent(x0) {
            return Err(Error::Divergence { step: 0 });
        }
        let n = map.dimension();
        Ok(OrbitWalker {
            map,
            mode,
            state: x0.to_vec(),
            next: vec![0.0; n],
            jacobian: SquareMatrix::zeros(n),
            log_abs_det_sum: 0.0,
        })
    }

    /// Loads `J(x_k)` for the current state.
    fn load_jacobian(&mut self) -> &SquareMatrix {
        self.map
            .jacobian_into(&self.state, self.mode, &mut self.jacobian);
        self.log_abs_det_sum += self.jacobian.determinant().abs().ln();
        &self.jacobian
    }

    /// Moves to `x_{k+1}`; `step` is `k + 1`.
    fn advance(&mut self, step: usize) -> Result<()> {
        self.map.apply(&self.state, &mut self.next);
        std::mem::swap(&mut self.state, &mut self.next);
        if is_divergent(&self.state) {
            return Err(Error::Divergence { step });
        }
        Ok(())
    }
}

/// Largest exponent by periodic renormalization:
/// `λ₁ = (1/(sτ)) Σ_{i=1}^{s} ln α_i`, `α_i` the tangent norm after each block
/// of `tau` steps. Uses `t = s·τ` Jacobians `J(x_0) ... J(x_{t-1})`.
pub fn max_exponent_benettin<M: DiscreteMap + ?Sized>(
    map: &M,
    x0: &[f64],
    u0: &[f64],
    tau: usize,
    renorms: usize,
    mode: JacobianMode,
) -> Result<SpectrumEstimate> {
    check_dimension(map, u0.len())?;
    if (norm(u0) - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("u0 must be a unit vector"));
    }
    if tau == 0 || renorms == 0 {
        return Err(Error::invalid(
            "tau and the renormalization count must be at least 1",
        ));
    }
    let t = tau
        .checked_mul(renorms)
        .ok_or_else(|| Error::invalid("tau * renorms overflows"))?;

    let mut walker = OrbitWalker::new(map, x0, mode)?;
    let mut tangent = BenettinState::new(u0);
    for k in 0..t {
        let step = k + 1;
        if !tangent.advance(walker.load_jacobian()) {
            return Err(Error::Overflow { step });
        }
        if step % tau == 0 && tangent.renormalize().is_none() {
            return Err(Error::ZeroSeparation { step });
        }
        if step < t {
            walker.advance(step)?;
        }
    }

    let lambda = tangent.log_norm_sum() / t as f64;
    let mean_log_abs_det = walker.log_abs_det_sum / t as f64;
    Ok(SpectrumEstimate {
        exponents: vec![lambda],
        method: SpectrumMethod::Benettin,
        steps: t,
        renorm_interval: Some(tau),
        renorm_count: Some(tangent.renorm_count()),
        jacobian_mode: Some(mode),
        mean_log_abs_det: Some(mean_log_abs_det),
        det_sum_check: (map.dimension() == 1).then_some(lambda - mean_log_abs_det),
        seed: None,
        direction_resets: 0,
    })
}

/// `ln b - λ₁`: the Hénon map contracts area by `b` per step, so
/// `λ₁ + λ₂ = ln b`.
pub fn second_exponent_from_determinant(lambda1: f64, b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!(
            "the determinant identity needs b > 0, got {b}"
        )));
    }
    Ok(b.ln() - lambda1)
}

/// Full spectrum from the QR recursion `Q_{k+1} R_{k+1} = J_k Q_k`, with
/// `Q_0 = I` so the first factorization is of `J_0 = J(x_0)` itself.
/// `λ_i = (1/t) Σ_k ln r_{k,ii}`.
pub fn spectrum_qr<M: DiscreteMap + ?Sized>(
    map: &M,
    x0: &[f64],
    t: usize,
    mode: JacobianMode,
) -> Result<SpectrumEstimate> {
    if t == 0 {
        return Err(Error::invalid("t must be at least 1"));
    }
    let n = map.dimension();
    let mut walker = OrbitWalker::new(map, x0, mode)?;
    let mut frame = SquareMatrix::identity(n);
    let mut product = SquareMatrix::zeros(n);
    let mut log_diag = vec![0.0; n];

    for k in 0..t {
        let step = k + 1;
        walker.load_jacobian().mul_into(&frame, &mut product);
        let qr = qr_factorize(&product).map_err(|e| match e {
            Error::RankDeficiency { index, .. } => Error::RankDeficiency {
                index,
                step: Some(step),
            },
            other => other,
        })?;
        for (acc, i) in log_diag.iter_mut().zip(0..n) {
            *acc += qr.r[(i, i)].ln();
        }
        frame = qr.q;
        if step < t {
            walker.advance(step)?;
        }
    }

    let mut exponents: Vec<f64> = log_diag.iter().map(|s| s / t as f64).collect();
    sort_descending(&mut exponents);
    let mean_log_abs_det = walker.log_abs_det_sum / t as f64;
    let det_sum_check = exponents.iter().sum::<f64>() - mean_log_abs_det;
    Ok(SpectrumEstimate {
        exponents,
        method: SpectrumMethod::Qr,
        steps: t,
        renorm_interval: None,
        renorm_count: None,
        jacobian_mode: Some(mode),
        mean_log_abs_det: Some(mean_log_abs_det),
        det_sum_check: Some(det_sum_check),
        seed: None,
        direction_resets: 0,
    })
}

fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let len = norm(&v);
        if len > 1e-3 && len <= 1.0 {
            return v.into_iter().map(|c| c / len).collect();
        }
    }
}

/// Jacobian-free largest exponent.
///
/// A companion orbit starts `epsilon` away from `x0` along a random unit
/// direction drawn from `seed`. Each step both orbits advance, the
/// separation `d` is measured, `ln(d/ε)` is accumulated, and the companion is
/// pulled back to distance `ε` along the current separation. If `d` collapses
/// to zero the direction is re-drawn and the step contributes no term.
pub fn max_exponent_direct<M: DiscreteMap + ?Sized>(
    map: &M,
    x0: &[f64],
    epsilon: f64,
    t: usize,
    seed: u64,
) -> Result<SpectrumEstimate> {
    check_dimension(map, x0.len())?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if t == 0 {
        return Err(Error::invalid("t must be at least 1"));
    }
    if is_divergent(x0) {
        return Err(Error::Divergence { step: 0 });
    }
    let n = map.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut base = x0.to_vec();
    let mut base_next = vec![0.0; n];
    let mut companion: Vec<f64> = random_unit_vector(&mut rng, n)
        .iter()
        .zip(&base)
        .map(|(d, x)| x + epsilon * d)
        .collect();
    let mut companion_next = vec![0.0; n];
    let mut separation = vec![0.0; n];

    let mut sum = 0.0;
    let mut terms = 0usize;
    let mut resets = 0usize;

    for step in 1..=t {
        map.apply(&base, &mut base_next);
        map.apply(&companion, &mut companion_next);
        std::mem::swap(&mut base, &mut base_next);
        if is_divergent(&base) {
            return Err(Error::Divergence { step });
        }
        for ((s, c), b) in separation.iter_mut().zip(&companion_next).zip(&base) {
            *s = c - b;
        }
        let d = norm(&separation);
        if d > 0.0 && d.is_finite() {
            sum += (d / epsilon).ln();
            terms += 1;
            let pull = epsilon / d;
            for ((c, b), s) in companion.iter_mut().zip(&base).zip(&separation) {
                *c = b + s * pull;
            }
        } else {
            resets += 1;
            let dir = random_unit_vector(&mut rng, n);
            for ((c, b), u) in companion.iter_mut().zip(&base).zip(&dir) {
                *c = b + epsilon * u;
            }
        }
    }

    if terms == 0 {
        return Err(Error::ZeroSeparation { step: t });
    }
    if resets > 0 {
        log::warn!("direct estimator re-drew its direction {resets} times");
    }

    Ok(SpectrumEstimate {
        exponents: vec![sum / terms as f64],
        method: SpectrumMethod::Direct,
        steps: t,
        renorm_interval: None,
        renorm_count: None,
        jacobian_mode: None,
        mean_log_abs_det: None,
        det_sum_check: None,
        seed: Some(seed),
        direction_resets: resets,
    })
}
