use approx::assert_abs_diff_eq;
use chaoscope::bifurcation::{bifurcation_diagram, count_attractor_points};
use chaoscope::linalg::{norm, qr_factorize, SquareMatrix};
use chaoscope::maps::{iterate_map, logistic_apply, DiscreteMap};
use chaoscope::scalar::{lyapunov_derivative_sum, lyapunov_sweep, ParameterGrid, ScalarEstimator};
use chaoscope::spectrum::{max_exponent_benettin, max_exponent_direct, spectrum_qr};
use chaoscope::tangent::gram_matrix_spectrum_oracle;
use chaoscope::{Henon, JacobianMode, Logistic};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix(order: usize) -> impl Strategy<Value = SquareMatrix> {
    prop::collection::vec(-10.0..10.0f64, order * order)
        .prop_map(move |e| SquareMatrix::from_row_major(order, e).unwrap())
}

fn upper_triangular(order: usize) -> impl Strategy<Value = SquareMatrix> {
    matrix(order).prop_map(move |mut m| {
        for i in 0..order {
            for j in 0..i {
                m[(i, j)] = 0.0;
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn qr_factors_are_orthogonal_and_reconstruct(a in (2usize..=3).prop_flat_map(matrix)) {
        let n = a.order();
        let qr = qr_factorize(&a).unwrap();
        prop_assert!(qr.q.transpose().mul(&qr.q).max_abs_diff(&SquareMatrix::identity(n)) < 1e-12);
        prop_assert!(qr.q.mul(&qr.r).max_abs_diff(&a) < 1e-12);
        prop_assert!(qr.r.is_upper_triangular());
        prop_assert!(qr.r.diagonal().iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn orthogonal_factor_preserves_norms(
        a in matrix(3),
        v in prop::collection::vec(-100.0..100.0f64, 3),
    ) {
        let q = qr_factorize(&a).unwrap().q;
        let n = norm(&v);
        prop_assert!((norm(&q.mul_vec(&v)) - n).abs() <= 1e-12 * n.max(1.0));
    }

    #[test]
    fn triangular_product_stays_triangular(
        a in (2usize..=3).prop_flat_map(upper_triangular),
        seed in any::<u64>(),
    ) {
        let n = a.order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                b[(i, j)] = rng.gen_range(-10.0..10.0);
            }
        }
        let product = a.mul(&b);
        prop_assert!(product.is_upper_triangular());
        for i in 0..n {
            prop_assert_eq!(product[(i, i)], a[(i, i)] * b[(i, i)]);
        }
    }

    #[test]
    fn qr_is_unique_and_recovers_factors(
        r in (2usize..=3).prop_flat_map(upper_triangular),
        a in matrix(3),
    ) {
        // Any orthogonal q times an upper triangular r with positive
        // diagonal factors back into exactly that pair.
        let n = r.order();
        let mut r = r;
        for i in 0..n {
            r[(i, i)] = r[(i, i)].abs() + 0.5;
        }
        let q_full = qr_factorize(&a).unwrap().q;
        let q = if n == 3 {
            q_full
        } else {
            let theta = a[(0, 0)];
            SquareMatrix::from_rows([[theta.cos(), -theta.sin()], [theta.sin(), theta.cos()]])
        };
        let product = q.mul(&r);
        let back = qr_factorize(&product).unwrap();
        prop_assert!(back.q.max_abs_diff(&q) < 1e-10);
        prop_assert!(back.r.max_abs_diff(&r) < 1e-10 * r.max_abs().max(1.0));
    }

    #[test]
    fn logistic_orbits_stay_in_unit_interval(r in 0.0..=4.0f64, x0 in 0.0..=1.0f64) {
        let traj = iterate_map(&Logistic::new(r), &[x0], 200, true).unwrap();
        prop_assert!(traj.diverged_at.is_none());
        prop_assert!(traj.states().all(|s| (0.0..=1.0).contains(&s[0])));
    }

    #[test]
    fn henon_jacobian_determinant_is_minus_b(
        a in 0.5..2.0f64, b in 0.05..0.9f64, x in -2.0..2.0f64, y in -2.0..2.0f64,
    ) {
        let map = Henon::new(a, b);
        for mode in [JacobianMode::Corrected, JacobianMode::Compat] {
            prop_assert_eq!(map.jacobian(&[x, y], mode).determinant(), -b);
        }
    }

    #[test]
    fn fixed_point_regime_law(r in 1.05..2.95f64) {
        prop_assume!((r - 2.0).abs() > 0.05);
        let est = ScalarEstimator::derivative_sum().with_burn_in(100);
        let v = est.estimate(&Logistic::new(r), 0.1).unwrap().value;
        prop_assert!((v - (2.0 - r).abs().ln()).abs() < 0.01, "r={} λ={}", r, v);
    }

    #[test]
    fn decay_regime_law(r in 0.05..0.95f64) {
        let est = ScalarEstimator::finite_difference().with_burn_in(100);
        let v = est.estimate(&Logistic::new(r), 0.1).unwrap().value;
        prop_assert!((v - r.ln()).abs() < 0.01, "r={} λ={}", r, v);
    }

    #[test]
    fn recorded_orbit_is_reproducible(r in 0.0..=4.0f64, x0 in 0.0..=1.0f64) {
        let map = Logistic::new(r);
        let a = iterate_map(&map, &[x0], 100, true).unwrap();
        prop_assert_eq!(&a, &iterate_map(&map, &[x0], 100, true).unwrap());
        let mut prev = vec![x0];
        for state in a.states() {
            let mut next = [0.0];
            map.apply(&prev, &mut next);
            prop_assert_eq!(&next[..], state);
            prev = state.to_vec();
        }
    }
}

#[test]
fn logistic_confinement_over_many_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let r = rng.gen_range(0.0..=4.0);
        let mut x: f64 = rng.gen_range(0.0..=1.0);
        for _ in 0..50 {
            x = logistic_apply(x, r);
            assert!((0.0..=1.0).contains(&x), "r={r} escaped to {x}");
        }
    }
}

#[test]
fn estimators_are_pure() {
    let map = Henon::default();
    let a = spectrum_qr(&map, &[0.1, 0.1], 5_000, JacobianMode::Corrected).unwrap();
    let b = spectrum_qr(&map, &[0.1, 0.1], 5_000, JacobianMode::Corrected).unwrap();
    assert_eq!(a, b);
    let d1 = max_exponent_direct(&map, &[0.1, 0.1], 1e-8, 5_000, 9).unwrap();
    let d2 = max_exponent_direct(&map, &[0.1, 0.1], 1e-8, 5_000, 9).unwrap();
    assert_eq!(d1.exponents, d2.exponents);
    let grid = ParameterGrid::new(3.5, 4.0, 0.01).unwrap();
    let est = ScalarEstimator::finite_difference().with_steps(1_000);
    let s1 = lyapunov_sweep(Logistic::new, &grid, &est, 0.1, Some(1)).unwrap();
    let s3 = lyapunov_sweep(Logistic::new, &grid, &est, 0.1, Some(3)).unwrap();
    assert_eq!(s1, s3);
}

#[test]
fn derivative_and_finite_difference_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..100 {
        let r = rng.gen_range(3.5..=4.0);
        let map = Logistic::new(r);
        let d = ScalarEstimator::derivative_sum()
            .estimate(&map, 0.1)
            .unwrap();
        let f = ScalarEstimator::finite_difference()
            .estimate(&map, 0.1)
            .unwrap();
        if d.floor_hits > 0 || f.floor_hits > 0 {
            continue;
        }
        assert!(
            (d.value - f.value).abs() < 0.01,
            "r={r}: {} vs {}",
            d.value,
            f.value
        );
        checked += 1;
    }
    assert!(checked >= 90, "only {checked} points without floor hits");
}

#[test]
fn fully_chaotic_exponent_is_independent_of_initial_condition() {
    let map = Logistic::new(4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let values: Vec<f64> = (0..10)
        .map(|_| {
            let x0 = rng.gen_range(0.01..0.99);
            lyapunov_derivative_sum(&map, x0, 100_000, 0, 1e-300)
                .unwrap()
                .value
        })
        .collect();
    let spread = values.iter().cloned().fold(f64::MIN, f64::max)
        - values.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.01, "spread {spread}: {values:?}");
}

#[test]
fn generic_tangent_directions_converge() {
    let map = Henon::default();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let values: Vec<f64> = (0..20)
        .map(|_| {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let u0 = [theta.cos(), theta.sin()];
            max_exponent_benettin(&map, &[0.1, 0.1], &u0, 50, 2_000, JacobianMode::Corrected)
                .unwrap()
                .exponents[0]
        })
        .collect();
    let spread = values.iter().cloned().fold(f64::MIN, f64::max)
        - values.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.005, "spread {spread}");
}

#[test]
fn renormalization_interval_does_not_matter() {
    let map = Henon::default();
    let t = 1_000_000;
    let values: Vec<f64> = [1usize, 10, 50, 200]
        .iter()
        .map(|&tau| {
            max_exponent_benettin(
                &map,
                &[0.1, 0.1],
                &[1.0, 0.0],
                tau,
                t / tau,
                JacobianMode::Corrected,
            )
            .unwrap()
            .exponents[0]
        })
        .collect();
    for v in &values {
        assert_abs_diff_eq!(*v, values[0], epsilon = 0.005);
    }
}

#[test]
fn benettin_matches_qr_and_gram() {
    let map = Henon::default();
    for mode in [JacobianMode::Corrected, JacobianMode::Compat] {
        let ben = max_exponent_benettin(&map, &[0.1, 0.1], &[1.0, 0.0], 50, 2_000, mode).unwrap();
        let qr = spectrum_qr(&map, &[0.1, 0.1], 100_000, mode).unwrap();
        assert_abs_diff_eq!(ben.exponents[0], qr.exponents[0], epsilon = 0.005);

        let short = spectrum_qr(&map, &[0.1, 0.1], 200, mode).unwrap();
        let gram = gram_matrix_spectrum_oracle(&map, &[0.1, 0.1], 200, mode).unwrap();
        for (g, q) in gram.exponents.iter().zip(&short.exponents) {
            assert_abs_diff_eq!(*g, *q, epsilon = 0.05);
        }
    }
}

#[test]
fn henon_determinant_telescopes_for_any_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..10 {
        let b = rng.gen_range(0.1..0.35);
        let map = Henon::new(1.4, b);
        if let Ok(est) = spectrum_qr(&map, &[0.1, 0.1], 2_000, JacobianMode::Corrected) {
            assert_abs_diff_eq!(est.sum(), b.ln(), epsilon = 1e-9);
        }
    }
}

#[test]
fn period_doubling_coincides_with_exponent_near_zero() {
    // Where the attractor doubles, the exponent touches zero from below.
    let grid = ParameterGrid::new(2.9, 3.56, 0.002).unwrap();
    let rs = grid.values();
    let diagram = bifurcation_diagram(Logistic::new, &rs, 0.1, 2000, 64, None).unwrap();
    let counts: Vec<usize> = diagram
        .iter()
        .map(|r| count_attractor_points(&r.samples, 1e-3))
        .collect();
    let est = ScalarEstimator::derivative_sum().with_burn_in(2000);
    let lyap = lyapunov_sweep(Logistic::new, &grid, &est, 0.1, None).unwrap();
    let clean: Vec<usize> = (0..rs.len())
        .filter(|&k| counts[k] <= 16 && counts[k].is_power_of_two())
        .collect();
    let mut doublings = 0;
    for w in clean.windows(2) {
        let (i, j) = (w[0], w[1]);
        if counts[j] == 2 * counts[i] {
            doublings += 1;
            let near = lyap[i..=j]
                .iter()
                .map(|l| l.estimate.value)
                .fold(f64::MIN, f64::max);
            assert!(near > -0.1, "r={}: exponent {near}", rs[j]);
        }
    }
    assert!(doublings >= 3, "found {doublings} doublings");
}

#[test]
fn henon_is_chaotic_in_both_modes() {
    let map = Henon::default();
    for mode in [JacobianMode::Corrected, JacobianMode::Compat] {
        let ben = max_exponent_benettin(&map, &[0.1, 0.1], &[1.0, 0.0], 50, 2_000, mode)
            .unwrap()
            .complete_with_determinant()
            .unwrap();
        assert!(ben.exponents[0] > 0.0, "{mode}");
        assert_abs_diff_eq!(ben.sum(), 0.3f64.ln(), epsilon = 0.01);
    }
}

#[test]
fn henon_log_determinants_sum_to_t_ln_b() {
    let map = Henon::default();
    let t = 10_000;
    let traj = iterate_map(&map, &[0.1, 0.1], t, true).unwrap();
    let mut sum = 0.0;
    let mut prev = vec![0.1, 0.1];
    for state in traj.states() {
        sum += map
            .jacobian(&prev, JacobianMode::Corrected)
            .determinant()
            .abs()
            .ln();
        prev = state.to_vec();
    }
    assert!((sum - t as f64 * 0.3f64.ln()).abs() <= 1e-9 * t as f64);
}

#[test]
fn gram_matrix_has_two_real_nonnegative_eigenvalues() {
    let map = Henon::default();
    for t in [1, 10, 100, 200] {
        let g = gram_matrix_spectrum_oracle(&map, &[0.1, 0.1], t, JacobianMode::Compat).unwrap();
        assert_eq!(g.eigenvalues_log.len(), 2);
        assert!(g.eigenvalues_log.iter().all(|l| l.is_finite()));
        assert!(g.eigenvalues_log[0] >= g.eigenvalues_log[1]);
    }
}
