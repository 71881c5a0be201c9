//! Tangent-space propagation along orbits and a finite-time Gram-matrix
//! spectrum used to cross-check the production estimators.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, SquareMatrix};
use crate::maps::{check_dimension, is_divergent, DiscreteMap, JacobianMode, Trajectory};

/// Tangent components beyond this magnitude are reported as overflow.
pub const TANGENT_OVERFLOW: f64 = 1e300;

/// Largest horizon accepted by [`gram_matrix_spectrum_oracle`].
pub const GRAM_MAX_STEPS: usize = 200;

/// Pushes `v0` through the Jacobians along `trajectory`:
/// `J(x_{t-1}) ... J(x_1) J(x_0) v0`, where `t` is the number of recorded
/// states. Matrix-vector products only; the product matrix is never formed.
pub fn propagate_tangent<M: DiscreteMap + ?Sized>(
    map: &M,
    trajectory: &Trajectory,
    v0: &[f64],
    mode: JacobianMode,
) -> Result<Vec<f64>> {
    check_dimension(map, v0.len())?;
    check_dimension(map, trajectory.dimension())?;
    if let Some(step) = trajectory.diverged_at {
        return Err(Error::Divergence { step });
    }

    let mut jac = SquareMatrix::zeros(map.dimension());
    let mut v = v0.to_vec();
    let mut next = vec![0.0; v.len()];
    let base_points = std::iter::once(&trajectory.initial_state[..])
        .chain(trajectory.states())
        .take(trajectory.len());

    for (step, point) in base_points.enumerate() {
        map.jacobian_into(point, mode, &mut jac);
        jac.mul_vec_into(&v, &mut next);
        std::mem::swap(&mut v, &mut next);
        if v.iter().any(|c| !(c.abs() <= TANGENT_OVERFLOW)) {
            return Err(Error::Overflow { step: step + 1 });
        }
    }
    Ok(v)
}

/// Finite-time exponents from the eigenvalues of `H_t = (J^t)ᵀ J^t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSpectrumResult {
    pub t: usize,
    /// `ln(mu_i) / (2t)`, descending.
    pub exponents: Vec<f64>,
    /// `ln(mu_i)`, descending.
    pub eigenvalues_log: Vec<f64>,
}

/// Forms `J^t` along the orbit of `x0`, then returns `ln(mu_i)/(2t)` for the
/// eigenvalues `mu_i` of `H_t`.
///
/// `J^t` is kept as a scaled matrix times `exp(log_scale)` so the product
/// cannot overflow. The smallest eigenvalue comes from
/// `det(H_t) = det(J^t)^2 = prod det(J_k)^2` rather than from the
/// cancellation-prone closed form. Limited to `t <= 200` and dimension `<= 3`.
pub fn gram_matrix_spectrum_oracle<M: DiscreteMap + ?Sized>(
    map: &M,
    x0: &[f64],
    t: usize,
    mode: JacobianMode,
) -> Result<GramSpectrumResult> {
    check_dimension(map, x0.len())?;
    let n = map.dimension();
    if n > 3 {
        return Err(Error::invalid(format!(
            "gram oracle supports dimensions up to 3, got {n}"
        )));
    }
    if t == 0 || t > GRAM_MAX_STEPS {
        return Err(Error::invalid(format!(
            "gram oracle horizon must be in 1..={GRAM_MAX_STEPS}, got {t}"
        )));
    }

    let mut product = SquareMatrix::identity(n);
    let mut scratch = SquareMatrix::zeros(n);
    let mut jac = SquareMatrix::zeros(n);
    let mut log_scale = 0.0;
    let mut log_abs_det = 0.0;
    let mut state = x0.to_vec();
    let mut next = vec![0.0; n];

    for step in 1..=t {
        map.jacobian_into(&state, mode, &mut jac);
        log_abs_det += jac.determinant().abs().ln();
        jac.mul_into(&product, &mut scratch);
        std::mem::swap(&mut product, &mut scratch);
        let scale = product.max_abs();
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::Overflow { step });
        }
        product.scale_in_place(1.0 / scale);
        log_scale += scale.ln();

        map.apply(&state, &mut next);
        std::mem::swap(&mut state, &mut next);
        if step < t && is_divergent(&state) {
            return Err(Error::Divergence { step });
        }
    }

    // Eigenvalues of the scaled H are exp(-2 log_scale) times the true ones.
    let gram = product.transpose().mul(&product);
    let scaled = symmetric_eigenvalues(&gram)?;
    let mut eigenvalues_log: Vec<f64> = scaled.iter().map(|m| m.ln() + 2.0 * log_scale).collect();
    if n > 1 {
        let others: f64 = eigenvalues_log[..n - 1].iter().sum();
        eigenvalues_log[n - 1] = 2.0 * log_abs_det - others;
    }
    if eigenvalues_log.iter().any(|l| !l.is_finite()) {
        return Err(Error::RankDeficiency {
            index: n - 1,
            step: None,
        });
    }
    eigenvalues_log.sort_by(|a, b| b.total_cmp(a));
    let exponents = eigenvalues_log
        .iter()
        .map(|l| l / (2.0 * t as f64))
        .collect();

    Ok(GramSpectrumResult {
        t,
        exponents,
        eigenvalues_log,
    })
}
