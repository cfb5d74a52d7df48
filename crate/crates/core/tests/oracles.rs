//! Library results checked against independent formulas.

mod common;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};

use lti_mbam::lti::{balance, gramians, solve_lyapunov, StateSpace};
use lti_mbam::manifold::{mmr_model, DEFAULT_TIMES};
use lti_mbam::mbam::{fim, geodesic_acceleration, jacobian, ParamModel};
use lti_mbam::random::{random_minimal_system, random_stable_system, seeded};

use common::{kronecker_lyapunov, ExpSum};

#[test]
fn lyapunov_matches_kronecker_oracle() {
    let mut rng = seeded(1);
    for n in 1..=8 {
        let sys = random_stable_system(&mut rng, n, 2, 2).unwrap();
        let q = sys.b() * sys.b().transpose();
        let x = solve_lyapunov(sys.a(), &q).unwrap();
        let oracle = kronecker_lyapunov(sys.a(), &q);
        assert!((&x - &oracle).norm() <= 1e-10 * oracle.norm());
    }
}

#[test]
fn diagonal_lyapunov_closed_form() {
    // A = diag(λ), Q = bbᵀ  =>  X_ij = −b_i b_j / (λ_i + λ_j)
    let lambda = [-0.3, -1.0, -4.0];
    let b = [1.0, -2.0, 0.5];
    let a = DMatrix::from_diagonal(&DVector::from_column_slice(&lambda));
    let bv = DVector::from_column_slice(&b);
    let x = solve_lyapunov(&a, &(&bv * bv.transpose())).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_relative_eq!(x[(i, j)], -b[i] * b[j] / (lambda[i] + lambda[j]), max_relative = 1e-13);
        }
    }
}

#[test]
fn hankel_values_are_roots_of_gramian_product() {
    let mut rng = seeded(2);
    for n in [2, 4, 6] {
        let sys = random_minimal_system(&mut rng, n, 1, 2).unwrap();
        let g = gramians(&sys).unwrap();
        let mut eig: Vec<f64> = (&g.controllability * &g.observability)
            .complex_eigenvalues()
            .iter()
            .map(|l| l.re.sqrt())
            .collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        let bal = balance(&sys).unwrap();
        for (h, e) in bal.hsv().iter().zip(&eig) {
            assert_relative_eq!(*h, *e, max_relative = 1e-8);
        }
    }
}

#[test]
fn first_order_system_closed_form() {
    // ẋ = −a x + b u, y = c x: P = b²/2a, Q = c²/2a, so θ = |bc|/2a
    let sys = StateSpace::from_rows(1, 1, 1, &[-2.0], &[3.0], &[3.0], &[0.0]).unwrap();
    let bal = balance(&sys).unwrap();
    assert_relative_eq!(bal.hsv()[0], 9.0 / 4.0, max_relative = 1e-14);
}

/// Sensitivities of the Michaelis–Menten solution from its implicit form
/// `ρ₂ ln(x/x₀) + x − x₀ = −ρ₁ t`.
#[test]
fn mmr_jacobian_matches_implicit_differentiation() {
    let model = mmr_model(1.0, &DEFAULT_TIMES).unwrap();
    for p in [[1.0, 1.0], [0.4, 2.5], [3.0, 0.2]] {
        let y = model.predict(&p).unwrap();
        let j = jacobian(&model, &p).unwrap();
        for (i, &t) in DEFAULT_TIMES.iter().enumerate() {
            let x = y[i];
            let denom = p[1] / x + 1.0;
            let d1 = -t / denom;
            let d2 = -(x / model.x0()).ln() / denom;
            assert_relative_eq!(j[(i, 0)], d1, max_relative = 1e-7);
            assert_relative_eq!(j[(i, 1)], d2, max_relative = 1e-7, epsilon = 1e-12);
        }
    }
}

#[test]
fn contracted_acceleration_matches_full_christoffel() {
    let cases = [
        (vec![1.0, 2.0, 3.0], vec![1.0], vec![0.8], vec![1.0]),
        (vec![0.5, 1.0, 2.0, 4.0], vec![1.0, 1.0], vec![0.3, 1.7], vec![0.6, -0.8]),
        (
            vec![0.25, 0.5, 1.0, 2.0, 4.0],
            vec![1.0, 0.5, 2.0],
            vec![0.2, 1.0, 3.0],
            vec![0.2, 0.9, -0.3],
        ),
    ];
    for (times, coeffs, p, v) in cases {
        let es = ExpSum { times, coeffs };
        let model = es.model();
        let a = geodesic_acceleration(&model, &p, &v).unwrap();
        let oracle = es.christoffel_acceleration(&p, &v);
        assert!(
            (&a - &oracle).norm() <= 1e-6 * oracle.norm(),
            "N = {}: {a} vs {oracle}",
            p.len()
        );
    }
}

#[test]
fn analytic_jacobian_and_metric_agree() {
    let es = ExpSum {
        times: vec![0.5, 1.0, 2.0, 4.0],
        coeffs: vec![1.0, 1.0],
    };
    let p = [0.3, 1.7];
    let j = jacobian(&es.model(), &p).unwrap();
    let exact = es.jac(&p);
    assert!((&j - &exact).norm() <= 1e-8 * exact.norm());
    let g = fim(&j);
    assert!((&g - exact.transpose() * &exact).norm() <= 1e-8 * g.norm());
}
