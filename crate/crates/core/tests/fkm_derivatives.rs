//! Finite-difference oracles for the FKM polynomial derivatives.

use fkm_core::clifford::build_clifford_system;
use fkm_core::fkm::FkmPolynomial;
use fkm_core::rng::{gaussian_vector, rng_from_seed};
use nalgebra::DVector;
use proptest::prelude::*;

const H: f64 = 1e-5;

fn poly(m: usize, k: usize) -> FkmPolynomial {
    FkmPolynomial::new(build_clifford_system(m, k).unwrap())
}

fn basis(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

// central differences of F itself; independent of the analytic gradient
fn fd_gradient(p: &FkmPolynomial, x: &DVector<f64>) -> DVector<f64> {
    let n = x.len();
    DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let e = basis(n, i) * H;
            (p.eval(&(x + &e)).unwrap() - p.eval(&(x - &e)).unwrap()) / (2.0 * H)
        }),
    )
}

fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax() / (1.0 + b.amax())
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = rng_from_seed(2024);
    for &(m, k) in &[(1, 3), (2, 2), (3, 2), (5, 1)] {
        let p = poly(m, k);
        for _ in 0..100 {
            let x = gaussian_vector(&mut rng, p.n_ambient());
            let err = rel_err(&p.gradient(&x).unwrap(), &fd_gradient(&p, &x));
            assert!(err < 1e-6, "({m},{k}) rel err {err:e}");
        }
    }
}

#[test]
fn hessian_matches_finite_differences_of_gradient() {
    let mut rng = rng_from_seed(77);
    for &(m, k) in &[(1, 3), (2, 2), (4, 2)] {
        let p = poly(m, k);
        for _ in 0..100 {
            let x = gaussian_vector(&mut rng, p.n_ambient());
            let v = gaussian_vector(&mut rng, p.n_ambient());
            let fd = (p.gradient(&(&x + &v * H)).unwrap() - p.gradient(&(&x - &v * H)).unwrap()) / (2.0 * H);
            let err = rel_err(&p.hessian_apply(&x, &v).unwrap(), &fd);
            assert!(err < 1e-6, "({m},{k}) rel err {err:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn homogeneous_of_degree_four(seed in any::<u64>(), t in 0.1f64..10.0) {
        let p = poly(2, 2);
        let x = gaussian_vector(&mut rng_from_seed(seed), 8);
        let scaled = p.eval(&(&x * t)).unwrap();
        let expected = t.powi(4) * p.eval(&x).unwrap();
        prop_assert!((scaled - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
    }

    #[test]
    fn hessian_is_symmetric(seed in any::<u64>()) {
        let p = poly(3, 2);
        let mut rng = rng_from_seed(seed);
        let x = gaussian_vector(&mut rng, 16);
        let v = gaussian_vector(&mut rng, 16);
        let w = gaussian_vector(&mut rng, 16);
        let lhs = p.hessian_apply(&x, &v).unwrap().dot(&w);
        let rhs = v.dot(&p.hessian_apply(&x, &w).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn euler_identity_on_gradient(seed in any::<u64>()) {
        let p = poly(1, 4);
        let x = gaussian_vector(&mut rng_from_seed(seed), 8);
        let f = p.eval(&x).unwrap();
        let radial = p.gradient(&x).unwrap().dot(&x);
        prop_assert!((radial - 4.0 * f).abs() <= 1e-10 * (1.0 + f.abs()));
    }
}
