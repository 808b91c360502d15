//! The FKM polynomial `F(x) = |x|^4 - 2 sum_a <P_a x, x>^2` and its
//! derivatives, Euclidean and restricted to the unit sphere.
//!
//! # Spherical derivatives from homogeneity
//!
//! `F` is homogeneous of degree `g = 4`. Write `F(r y) = r^g f(y)` for
//! `|y| = 1`, `r > 0`. Then:
//!
//! * Radial derivative: `<grad F(x), x> = g F(x)` (Euler). The spherical
//!   gradient is the tangential part of the Euclidean one,
//!   `grad_s f = grad F - <grad F, x> x`.
//! * In polar coordinates on `R^n`, `Lap F = d_rr F + (n-1)/r d_r F + r^-2 Lap_s f`.
//!   With `F = r^g f` at `r = 1` this is
//!   `Lap F = g(g-1) f + (n-1) g f + Lap_s f`, so
//!   `Lap_s f = Lap F - g(g + n - 2) f`.
//!
//! Tracing the Hessian below gives
//! `Lap F = 8|x|^2 + 4n|x|^2 - 16 sum_a |P_a x|^2 - 8 sum_a g_a tr P_a`.
//! For a Clifford system `|P_a x| = |x|` and `tr P_a = 0`, so with `n = 2l`
//! this is `8(l - 2m - 1)|x|^2 = 8(m2 - m1)|x|^2`, and the spherical
//! Laplacian becomes `8(m2 - m1) - 4(2l + 2) f`. The code evaluates the
//! trace term by term and does not assume the Clifford identities, so a
//! corrupted system shows up as a residual.

use nalgebra::DVector;

use crate::clifford::CliffordSystem;
use crate::error::{Error, Result};
use crate::record::{worst, VerificationRecord};
use crate::rng::{rng_from_seed, unit_vector};

/// Degree of homogeneity of `F`.
pub const DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FkmPolynomial {
    sys: CliffordSystem,
}

/// Value, gradient and Laplacian of `f = F|_{S^{2l-1}}` at a unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalDerivatives {
    pub f: f64,
    pub grad_s: DVector<f64>,
    pub lap_s: f64,
}

impl FkmPolynomial {
    pub fn new(sys: CliffordSystem) -> Self {
        Self { sys }
    }

    pub fn system(&self) -> &CliffordSystem {
        &self.sys
    }

    pub fn n_ambient(&self) -> usize {
        self.sys.ambient_dim()
    }

    pub fn m1(&self) -> usize {
        self.sys.multiplicities().0
    }

    pub fn m2(&self) -> usize {
        self.sys.multiplicities().1
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.n_ambient() {
            return Err(Error::DimensionMismatch {
                expected: self.n_ambient(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `g_a(x) = <P_a x, x>` for `a = 0..=m`.
    pub fn constraint_values(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        Ok(DVector::from_iterator(
            self.sys.m() + 1,
            self.sys.matrices().iter().map(|p| (p * x).dot(x)),
        ))
    }

    pub fn eval(&self, x: &DVector<f64>) -> Result<f64> {
        let g = self.constraint_values(x)?;
        let r2 = x.norm_squared();
        Ok(r2 * r2 - 2.0 * g.norm_squared())
    }

    /// `4|x|^2 x - 8 sum_a g_a(x) P_a x`.
    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        let mut grad = x * (4.0 * x.norm_squared());
        for p in self.sys.matrices() {
            let px = p * x;
            let g = px.dot(x);
            grad.axpy(-8.0 * g, &px, 1.0);
        }
        Ok(grad)
    }

    /// Directional derivative of the gradient at `x` along `v`:
    /// `8<x,v>x + 4|x|^2 v - 16 sum_a <P_a x, v> P_a x - 8 sum_a g_a(x) P_a v`.
    pub fn hessian_apply(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        self.check_dim(v)?;
        let mut out = x * (8.0 * x.dot(v));
        out.axpy(4.0 * x.norm_squared(), v, 1.0);
        for p in self.sys.matrices() {
            let px = p * x;
            let g = px.dot(x);
            out.axpy(-16.0 * px.dot(v), &px, 1.0);
            out.axpy(-8.0 * g, &(p * v), 1.0);
        }
        Ok(out)
    }

    /// Euclidean Laplacian (trace of the Hessian), summed term by term.
    pub fn euclidean_laplacian(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_dim(x)?;
        let n = self.n_ambient() as f64;
        let r2 = x.norm_squared();
        let mut lap = 8.0 * r2 + 4.0 * n * r2;
        for p in self.sys.matrices() {
            let px = p * x;
            lap -= 16.0 * px.norm_squared();
            lap -= 8.0 * px.dot(x) * p.trace();
        }
        Ok(lap)
    }

    pub fn spherical_derivatives(&self, x: &DVector<f64>) -> Result<SphericalDerivatives> {
        self.check_dim(x)?;
        let norm = x.norm();
        if (norm - 1.0).abs() >= 1e-12 {
            return Err(Error::Domain(format!(
                "spherical derivatives need a unit vector, |x| = {norm}"
            )));
        }
        let f = self.eval(x)?;
        let grad = self.gradient(x)?;
        let radial = grad.dot(x);
        let grad_s = grad - x * radial;
        let g = DEGREE as f64;
        let n = self.n_ambient() as f64;
        let lap_s = self.euclidean_laplacian(x)? - g * (g + n - 2.0) * f;
        Ok(SphericalDerivatives { f, grad_s, lap_s })
    }

    /// Right-hand sides of the isoparametric system at value `f`:
    /// `(16(1 - f^2), 8(m2 - m1) - 4(2l + 2) f)`.
    pub fn cartan_munzner_rhs(&self, f: f64) -> (f64, f64) {
        let l = self.sys.l() as f64;
        let diff = self.m2() as f64 - self.m1() as f64;
        (16.0 * (1.0 - f * f), 8.0 * diff - 4.0 * (2.0 * l + 2.0) * f)
    }
}

/// Worst residuals of both Cartan–Münzner equations over random sphere points.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanMunznerCheck {
    pub samples: usize,
    pub gradient_residual: f64,
    pub laplacian_residual: f64,
    pub record: VerificationRecord,
}

pub fn verify_cartan_munzner(
    p: &FkmPolynomial,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CartanMunznerCheck> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut grad_res: f64 = 0.0;
    let mut lap_res: f64 = 0.0;
    for _ in 0..n_samples {
        let x = unit_vector(&mut rng, p.n_ambient());
        let d = p.spherical_derivatives(&x)?;
        let (grad_rhs, lap_rhs) = p.cartan_munzner_rhs(d.f);
        grad_res = worst(grad_res, (d.grad_s.norm_squared() - grad_rhs).abs());
        lap_res = worst(lap_res, (d.lap_s - lap_rhs).abs());
    }
    let record = VerificationRecord::new("cartan_munzner", worst(grad_res, lap_res), tol);
    Ok(CartanMunznerCheck {
        samples: n_samples,
        gradient_residual: grad_res,
        laplacian_residual: lap_res,
        record,
    })
}
