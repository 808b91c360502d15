//! Certified points on the focal submanifold
//! `M_+ = { x in S^{2l-1} : <P_a x, x> = 0 for all a }`.
//!
//! A [`FocalPoint`] can only be obtained through certification, so every
//! point leaving this module satisfies the residual thresholds below.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::clifford::CliffordSystem;
use crate::error::{Error, Result};
use crate::fkm::FkmPolynomial;
use crate::rng::{gaussian_vector, rng_from_seed, sub_seed};

/// Certification threshold on `max_a |<P_a x, x>|`.
pub const CERT_CONSTRAINTS: f64 = 1e-10;
/// Certification threshold on `| |x|^2 - 1 |`.
pub const CERT_SPHERE: f64 = 1e-12;
/// `F(x)` must equal 1 within this on `M_+`.
pub const CERT_LEVEL: f64 = 1e-9;
/// `J J^T` condition estimates above this abort the projection.
pub const MAX_CONDITION: f64 = 1e12;
/// Singular values above this count toward the Jacobian rank.
pub const RANK_THRESHOLD: f64 = 1e-8;

pub const DEFAULT_PROJECTION_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 50;
pub const MAX_RETRIES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct FocalPoint {
    x: DVector<f64>,
    residual_constraints: f64,
    residual_sphere: f64,
}

impl FocalPoint {
    /// Checks `x` against the certification thresholds.
    pub fn certify(sys: &CliffordSystem, x: DVector<f64>) -> Result<Self> {
        if x.len() != sys.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.ambient_dim(),
                got: x.len(),
            });
        }
        let poly = FkmPolynomial::new(sys.clone());
        let g = poly.constraint_values(&x)?;
        let residual_constraints = g.amax();
        let residual_sphere = (x.norm_squared() - 1.0).abs();
        let level = (poly.eval(&x)? - 1.0).abs();
        // written so that NaN residuals fail
        let ok = residual_constraints <= CERT_CONSTRAINTS
            && residual_sphere <= CERT_SPHERE
            && level <= CERT_LEVEL;
        if !ok {
            return Err(Error::Uncertified {
                constraints: residual_constraints,
                sphere: residual_sphere,
            });
        }
        Ok(Self {
            x,
            residual_constraints,
            residual_sphere,
        })
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn residual_constraints(&self) -> f64 {
        self.residual_constraints
    }

    pub fn residual_sphere(&self) -> f64 {
        self.residual_sphere
    }
}

/// A certified point together with the number of Gauss–Newton updates taken.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: FocalPoint,
    pub iterations: usize,
}

/// Constraint map `c(x) = (|x|^2 - 1, g_0(x), ..., g_m(x))`.
pub fn constraint_map(sys: &CliffordSystem, x: &DVector<f64>) -> DVector<f64> {
    let mut c = DVector::zeros(sys.m() + 2);
    c[0] = x.norm_squared() - 1.0;
    for (a, p) in sys.matrices().iter().enumerate() {
        c[a + 1] = (p * x).dot(x);
    }
    c
}

/// Jacobian of [`constraint_map`]: rows `2x, 2 P_0 x, ..., 2 P_m x`.
pub fn constraint_jacobian(sys: &CliffordSystem, x: &DVector<f64>) -> DMatrix<f64> {
    let n = sys.ambient_dim();
    let mut jac = DMatrix::zeros(sys.m() + 2, n);
    jac.row_mut(0).copy_from(&(x * 2.0).transpose());
    for (a, p) in sys.matrices().iter().enumerate() {
        jac.row_mut(a + 1).copy_from(&((p * x) * 2.0).transpose());
    }
    jac
}

/// `J J^T`; equals `4 I` on `M_+`.
pub fn constraint_gram(sys: &CliffordSystem, x: &DVector<f64>) -> DMatrix<f64> {
    let jac = constraint_jacobian(sys, x);
    &jac * jac.transpose()
}

/// Deterministic point of `M_+` for block-construction systems:
/// `x = (u + y) / sqrt(2)` with `y` the first basis vector of the second
/// block and `u` a unit vector of the first block orthogonal to the first
/// block parts of `P_a y`, `a >= 1`. For other systems this candidate is
/// handed to [`project_to_focal`].
pub fn deterministic_seed(sys: &CliffordSystem) -> Result<FocalPoint> {
    let l = sys.l();
    let n = sys.ambient_dim();
    let mut y = DVector::zeros(n);
    y[l] = 1.0;

    let mut basis: Vec<DVector<f64>> = Vec::new();
    for p in sys.matrices().iter().skip(1) {
        let mut w: DVector<f64> = (p * &y).rows(0, l).into_owned();
        for b in &basis {
            let proj = w.dot(b);
            w.axpy(-proj, b, 1.0);
        }
        let wn = w.norm();
        if wn > 1e-12 {
            basis.push(w / wn);
        }
    }
    let mut u = None;
    for j in 0..l {
        let mut r = DVector::<f64>::zeros(l);
        r[j] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let proj = r.dot(b);
                r.axpy(-proj, b, 1.0);
            }
        }
        let rn = r.norm();
        if rn > 0.5 {
            u = Some(r / rn);
            break;
        }
    }
    let u = u.ok_or_else(|| {
        Error::Numerical("no first-block direction orthogonal to the generator images".into())
    })?;

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut x = DVector::zeros(n);
    x.rows_mut(0, l).copy_from(&(u * s));
    x[l] = s;
    match FocalPoint::certify(sys, x.clone()) {
        Ok(pt) => Ok(pt),
        Err(_) => Ok(project_to_focal(sys, &x, DEFAULT_PROJECTION_TOL, DEFAULT_MAX_ITER)?.point),
    }
}

/// Gauss–Newton projection onto `M_+`: `x <- x - J^T (J J^T)^{-1} c(x)`
/// until `max |c(x)| < tol`, followed by normalization and certification.
pub fn project_to_focal(
    sys: &CliffordSystem,
    x0: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Projection> {
    if x0.len() != sys.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.ambient_dim(),
            got: x0.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if x0.norm() == 0.0 {
        return Err(Error::Domain("projection needs a nonzero start".into()));
    }

    let mut x = x0.clone();
    for iteration in 0..=max_iter {
        let c = constraint_map(sys, &x);
        let residual = c.amax();
        if !residual.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite constraint residual after {iteration} iterations"
            )));
        }
        if residual < tol {
            let norm = x.norm();
            let point = FocalPoint::certify(sys, x / norm)?;
            return Ok(Projection {
                point,
                iterations: iteration,
            });
        }
        if iteration == max_iter {
            return Err(Error::Convergence {
                iterations: max_iter,
                residual,
            });
        }

        let jac = constraint_jacobian(sys, &x);
        let gram = &jac * jac.transpose();
        let eig = gram.clone().symmetric_eigen();
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.max();
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::Singular { condition });
        }
        let chol = gram
            .cholesky()
            .ok_or(Error::Singular { condition })?;
        let y = chol.solve(&c);
        x -= jac.transpose() * y;
    }
    unreachable!("loop returns on its last iteration")
}

/// `n` certified points from independent Gaussian starts. Point `i` uses the
/// sub-seed stream `(seed, i)`; a failed projection is retried with a fresh
/// sub-seed up to [`MAX_RETRIES`] times. Output order is the index order.
pub fn sample_focal_points(sys: &CliffordSystem, n: usize, seed: u64) -> Result<Vec<FocalPoint>> {
    if n == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let results: Vec<Option<FocalPoint>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let point_seed = sub_seed(seed, i as u64);
            (0..=MAX_RETRIES).find_map(|attempt| {
                let mut rng = rng_from_seed(sub_seed(point_seed, attempt as u64));
                let x0 = gaussian_vector(&mut rng, sys.ambient_dim());
                project_to_focal(sys, &x0, DEFAULT_PROJECTION_TOL, DEFAULT_MAX_ITER)
                    .ok()
                    .map(|p| p.point)
            })
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_none()).count();
    if failures > 0 {
        return Err(Error::Sampling {
            failures,
            requested: n,
        });
    }
    Ok(results.into_iter().flatten().collect())
}

/// Rank of the matrix with rows `x, P_0 x, ..., P_m x`; `m + 2` certifies
/// codimension `m + 1` in the sphere.
pub fn tangent_jacobian_rank(sys: &CliffordSystem, pt: &FocalPoint) -> usize {
    let x = pt.x();
    let mut rows = DMatrix::zeros(sys.m() + 2, sys.ambient_dim());
    rows.row_mut(0).copy_from(&x.transpose());
    for (a, px) in sys.apply_all(x).iter().enumerate() {
        rows.row_mut(a + 1).copy_from(&px.transpose());
    }
    rows.singular_values()
        .iter()
        .filter(|&&s| s > RANK_THRESHOLD)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{build_clifford_system, rotate_system};

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn seed_m1_l3_by_hand() {
        let sys = build_clifford_system(1, 3).unwrap();
        let pt = deterministic_seed(&sys).unwrap();
        let expected = DVector::from_row_slice(&[0.0, S, 0.0, S, 0.0, 0.0]);
        assert_eq!(pt.x(), &expected);
        assert_eq!(pt.residual_constraints(), 0.0);
    }

    #[test]
    fn seeds_certified_across_grid() {
        for &(m, k) in &[(1, 3), (1, 4), (2, 2), (3, 2), (4, 2), (5, 1), (6, 1), (7, 2), (8, 2), (9, 1)] {
            let sys = build_clifford_system(m, k).unwrap();
            let pt = deterministic_seed(&sys).unwrap();
            assert!(pt.residual_constraints() < 1e-15, "({m},{k})");
            let f = FkmPolynomial::new(sys.clone()).eval(pt.x()).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seed_for_rotated_system_falls_back_to_projection() {
        let sys = build_clifford_system(2, 2).unwrap();
        let c = DVector::from_row_slice(&[0.6, 0.0, 0.8]);
        let rot = rotate_system(&sys, &c).unwrap();
        let pt = deterministic_seed(&rot).unwrap();
        assert!(pt.residual_constraints() <= CERT_CONSTRAINTS);
    }

    #[test]
    fn projection_fixed_point() {
        let sys = build_clifford_system(2, 2).unwrap();
        let seed = deterministic_seed(&sys).unwrap();
        let proj = project_to_focal(&sys, seed.x(), 1e-12, 50).unwrap();
        assert!(proj.iterations <= 1);
        assert!((proj.point.x() - seed.x()).amax() < 1e-14);
    }

    #[test]
    fn projection_from_minus_level_never_uncertified() {
        let sys = build_clifford_system(1, 3).unwrap();
        let mut e1 = DVector::zeros(6);
        e1[0] = 1.0;
        match project_to_focal(&sys, &e1, 1e-12, 50) {
            Ok(p) => assert!(p.point.residual_constraints() <= CERT_CONSTRAINTS),
            Err(e) => assert!(matches!(e, Error::Singular { .. } | Error::Convergence { .. })),
        }
    }

    #[test]
    fn projection_rejects_bad_input() {
        let sys = build_clifford_system(1, 3).unwrap();
        assert!(matches!(project_to_focal(&sys, &DVector::zeros(6), 1e-12, 10), Err(Error::Domain(_))));
        assert!(matches!(
            project_to_focal(&sys, &DVector::from_element(6, 1.0), 0.0, 10),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            project_to_focal(&sys, &DVector::from_element(4, 1.0), 1e-12, 10),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn iteration_budget_exhaustion() {
        let sys = build_clifford_system(1, 3).unwrap();
        let x0 = DVector::from_row_slice(&[1.0, 0.3, -0.2, 0.1, 0.5, 0.7]);
        assert!(matches!(
            project_to_focal(&sys, &x0, 1e-12, 0),
            Err(Error::Convergence { iterations: 0, .. })
        ));
    }

    #[test]
    fn certify_rejects_off_manifold() {
        let sys = build_clifford_system(1, 3).unwrap();
        let mut e1 = DVector::zeros(6);
        e1[0] = 1.0;
        assert!(matches!(FocalPoint::certify(&sys, e1), Err(Error::Uncertified { .. })));
        let nan = DVector::from_element(6, f64::NAN);
        assert!(FocalPoint::certify(&sys, nan).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let sys = build_clifford_system(2, 2).unwrap();
        let a = sample_focal_points(&sys, 1, 99).unwrap();
        let b = sample_focal_points(&sys, 1, 99).unwrap();
        let c = sample_focal_points(&sys, 1, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].x(), c[0].x());
        assert!(sample_focal_points(&sys, 0, 1).is_err());
    }

    #[test]
    fn rank_certifies_dimension() {
        for &(m, k, rank, dim) in &[(1, 3, 3, 3), (2, 2, 4, 4), (5, 1, 7, 9)] {
            let sys = build_clifford_system(m, k).unwrap();
            for pt in sample_focal_points(&sys, 5, 7).unwrap() {
                assert_eq!(tangent_jacobian_rank(&sys, &pt), rank);
            }
            assert_eq!(sys.focal_dim(), dim);
        }
    }
}
