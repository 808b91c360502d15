//! Checks of the Willmore property of `M_+` and of each intermediate identity
//! used to establish it.
//!
//! Because `M_+` is minimal and `S` is constant, the Willmore condition
//! reduces to `sum_ij R_ij h^a_ij = 0` for every normal index `a`. For a unit
//! normal `xi = P x` the shape operator `A_xi` has eigenvalues `0, 1, -1`
//! on `T_0, T_1, T_{-1}`, so the contraction along `xi` equals
//! `sum Ric(v_i) - sum Ric(w_i)` over orthonormal bases of `T_1` and
//! `T_{-1}`. After rotating the system so that `P'_0 = P`, that difference
//! is a sum over pairs of `|(P'_a P'_b x)^{T_1}|^2 - |(P'_a P'_b x)^{T_{-1}}|^2`,
//! and each pair balances individually.
//!
//! Functions taking a "rotated" system expect one produced by
//! [`rotate_system`](crate::clifford::rotate_system) with the normal's
//! coefficients, so that `P'_0 x = xi`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::clifford::{rotate_system, CliffordSystem};
use crate::error::{Error, Result};
use crate::geometry::{ricci_quadratic, AdaptedFrame, ShapeData};
use crate::record::{worst, worst_of, VerificationRecord};
use crate::rng::rng_from_seed;

/// Eigenvalues within this of `0` or `±1` join that cluster.
pub const CLUSTER_RADIUS: f64 = 1e-6;
/// Spread of the Ricci quadratic form above which a configuration is
/// reported as non-Einstein.
pub const EINSTEIN_SPREAD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalDecomposition {
    pub xi_coeffs: DVector<f64>,
    /// `sum_a c_a P_a x` in ambient coordinates.
    pub xi: DVector<f64>,
    /// Orthonormal ambient bases of the 0, +1 and -1 eigenspaces of `A_xi`.
    pub t0: Vec<DVector<f64>>,
    pub t1: Vec<DVector<f64>>,
    pub tm1: Vec<DVector<f64>>,
    /// Largest distance of an eigenvalue from its cluster center.
    pub spectrum_deviation: f64,
}

impl PrincipalDecomposition {
    pub fn multiplicities(&self) -> [usize; 3] {
        [self.t0.len(), self.t1.len(), self.tm1.len()]
    }
}

fn check_unit(c: &DVector<f64>, expected_len: usize) -> Result<()> {
    if c.len() != expected_len {
        return Err(Error::DimensionMismatch {
            expected: expected_len,
            got: c.len(),
        });
    }
    let norm = c.norm();
    if !((norm - 1.0).abs() <= 1e-12) {
        return Err(Error::Domain(format!(
            "normal coefficients must be a unit vector, |c| = {norm}"
        )));
    }
    Ok(())
}

fn orthonormalize(vectors: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for _ in 0..2 {
            for b in &out {
                let proj = v.dot(b);
                v.axpy(-proj, b, 1.0);
            }
        }
        let n = v.norm();
        if n > 1e-12 {
            out.push(v / n);
        }
    }
    out
}

/// `A_xi = sum_a c_a A_a` in the tangent frame, with `(A_a)_ij = -<P_a e_i, e_j>`.
pub fn shape_operator_along(
    sys: &CliffordSystem,
    frame: &AdaptedFrame,
    c: &DVector<f64>,
) -> DMatrix<f64> {
    let n = sys.ambient_dim();
    let p = sys
        .matrices()
        .iter()
        .zip(c.iter())
        .fold(DMatrix::zeros(n, n), |acc, (pa, &ca)| acc + pa * ca);
    let e = frame.tangent();
    -(e.transpose() * p * e)
}

/// Eigenspaces of `A_xi` for `xi = sum_a c_a P_a x`, clustered to
/// `{0, 1, -1}` and checked against multiplicities `(m, l-m-1, l-m-1)`.
pub fn principal_decomposition(
    sys: &CliffordSystem,
    frame: &AdaptedFrame,
    xi_coeffs: &DVector<f64>,
) -> Result<PrincipalDecomposition> {
    check_unit(xi_coeffs, sys.m() + 1)?;
    let a_xi = shape_operator_along(sys, frame, xi_coeffs);
    let sym = (&a_xi + a_xi.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();

    let mut clusters: [Vec<DVector<f64>>; 3] = Default::default();
    let mut deviation: f64 = 0.0;
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        let (slot, dist) = [0.0, 1.0, -1.0]
            .iter()
            .map(|t| (ev - t).abs())
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bd), (i, d)| if d < bd { (i, d) } else { (bi, bd) });
        if !(dist <= CLUSTER_RADIUS) {
            return Err(Error::Spectrum {
                eigenvalue: ev,
                radius: CLUSTER_RADIUS,
            });
        }
        deviation = worst(deviation, dist);
        clusters[slot].push(frame.tangent() * eig.eigenvectors.column(k));
    }
    let [t0, t1, tm1] = clusters.map(orthonormalize);
    let (m1, m2) = sys.multiplicities();
    let expected = [m1, m2, m2];
    let got = [t0.len(), t1.len(), tm1.len()];
    if got != expected {
        return Err(Error::LemmaViolation { expected, got });
    }
    let xi = frame.normal() * xi_coeffs;
    Ok(PrincipalDecomposition {
        xi_coeffs: xi_coeffs.clone(),
        xi,
        t0,
        t1,
        tm1,
        spectrum_deviation: deviation,
    })
}

fn project(basis: &[DVector<f64>], v: &DVector<f64>) -> DVector<f64> {
    basis
        .iter()
        .fold(DVector::zeros(v.len()), |acc, b| acc + b * b.dot(v))
}

/// Residuals of the eigenspace description under `P'_0 x = xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectionCheck {
    /// `max |P'_0 v + v|` over the `T_1` basis (`T_1` inside the -1 eigenspace of `P'_0`).
    pub t1: f64,
    /// `max |P'_0 w - w|` over the `T_{-1}` basis.
    pub tm1: f64,
    /// Distance of the `T_0` basis from `span{P'_b P'_0 x : b >= 1}`.
    pub t0_span: f64,
}

impl ReflectionCheck {
    pub fn max(&self) -> f64 {
        worst_of([self.t1, self.tm1, self.t0_span])
    }
}

pub fn reflection_check(
    rotated: &CliffordSystem,
    frame: &AdaptedFrame,
    decomp: &PrincipalDecomposition,
) -> ReflectionCheck {
    let p0 = rotated.p(0);
    let t1 = worst_of(decomp.t1.iter().map(|v| (p0 * v + v).norm()));
    let tm1 = worst_of(decomp.tm1.iter().map(|w| (p0 * w - w).norm()));

    let p0x = p0 * frame.x();
    let qp: Vec<DVector<f64>> = rotated
        .matrices()
        .iter()
        .skip(1)
        .map(|q| q * &p0x)
        .collect();
    let span = orthonormalize(qp);
    let t0_span = worst_of(decomp.t0.iter().map(|u| (u - project(&span, u)).norm()));
    ReflectionCheck { t1, tm1, t0_span }
}

/// `max_a |sum_ij R_ij h^a_ij|`.
pub fn willmore_residual(sd: &ShapeData) -> f64 {
    worst_of(sd.a.iter().map(|a| sd.ricci.component_mul(a).sum().abs()))
}

/// `sum_ij R_ij h^xi_ij` for `xi = sum_a c_a xi_a`.
pub fn willmore_contraction_along(sd: &ShapeData, c: &DVector<f64>) -> f64 {
    sd.ricci.component_mul(&sd.combined(c)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicciBalance {
    pub ricci_t1: f64,
    pub ricci_tm1: f64,
    /// `|sum Ric(v_i) - sum Ric(w_i)|`.
    pub balance: f64,
    /// `|sum_ij R_ij h^xi_ij - (sum Ric(v_i) - sum Ric(w_i))|`.
    pub bridge: f64,
    /// `|sum_i sum_{a,b} <P_a v_i, P_b x>^2 - sum_i sum_{a,b} <P_a w_i, P_b x>^2|`.
    pub pair_sums: f64,
}

pub fn ricci_balance(
    sys: &CliffordSystem,
    frame: &AdaptedFrame,
    sd: &ShapeData,
    decomp: &PrincipalDecomposition,
) -> Result<RicciBalance> {
    let sum_ricci = |basis: &[DVector<f64>]| -> Result<f64> {
        basis.iter().map(|v| ricci_quadratic(sys, frame, v)).sum()
    };
    let ricci_t1 = sum_ricci(&decomp.t1)?;
    let ricci_tm1 = sum_ricci(&decomp.tm1)?;
    let diff = ricci_t1 - ricci_tm1;
    let contraction = willmore_contraction_along(sd, &decomp.xi_coeffs);

    let px = sys.apply_all(frame.x());
    let pair_sum = |basis: &[DVector<f64>]| -> f64 {
        basis
            .iter()
            .map(|v| {
                sys.matrices()
                    .iter()
                    .map(|p| {
                        let pv = p * v;
                        px.iter().map(|pbx| pv.dot(pbx).powi(2)).sum::<f64>()
                    })
                    .sum::<f64>()
            })
            .sum()
    };
    Ok(RicciBalance {
        ricci_t1,
        ricci_tm1,
        balance: diff.abs(),
        bridge: (contraction - diff).abs(),
        pair_sums: (pair_sum(&decomp.t1) - pair_sum(&decomp.tm1)).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionBalance {
    /// `max_{a<b} | |z^{T_1}|^2 - |z^{T_{-1}}|^2 |`, `z = P'_a P'_b x`.
    pub pairwise: f64,
    /// `| sum_{a != b} |z^{T_1}|^2 - sum_{a != b} |z^{T_{-1}}|^2 |`.
    pub aggregate: f64,
    /// `max_b (|z^{T_1}| + |z^{T_{-1}}|)` for `z = P'_0 P'_b x`.
    pub zero_pairs: f64,
    pub pairs: usize,
}

impl ProjectionBalance {
    pub fn max(&self) -> f64 {
        worst_of([self.pairwise, self.aggregate, self.zero_pairs])
    }
}

pub fn projection_balance(
    rotated: &CliffordSystem,
    frame: &AdaptedFrame,
    decomp: &PrincipalDecomposition,
) -> ProjectionBalance {
    let x = frame.x();
    let m = rotated.m();
    let px = rotated.apply_all(x);
    let mut pairwise: f64 = 0.0;
    let mut zero_pairs: f64 = 0.0;
    let (mut sum_t1, mut sum_tm1) = (0.0, 0.0);
    let mut pairs = 0;
    for a in 0..=m {
        for b in 0..=m {
            if a == b {
                continue;
            }
            let z = rotated.p(a) * &px[b];
            let n1 = project(&decomp.t1, &z).norm_squared();
            let nm1 = project(&decomp.tm1, &z).norm_squared();
            sum_t1 += n1;
            sum_tm1 += nm1;
            if a < b {
                pairs += 1;
                pairwise = worst(pairwise, (n1 - nm1).abs());
                if a == 0 {
                    zero_pairs = worst(zero_pairs, n1.sqrt() + nm1.sqrt());
                }
            }
        }
    }
    ProjectionBalance {
        pairwise,
        aggregate: (sum_t1 - sum_tm1).abs(),
        zero_pairs,
        pairs,
    }
}

/// Residuals of the per-pair identities for `z = P'_a P'_b x`, `0 < a < b`,
/// decomposed as `z = U + V + W` over `T_0 (+) T_1 (+) T_{-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseIdentities {
    /// Pairs with `0 < a < b`.
    pub pairs: usize,
    /// `z` orthogonal to `x` and every `P'_c x` (all `a < b`).
    pub tangency: f64,
    /// `|<P'_0 z, z>|`.
    pub reflection_orthogonality: f64,
    /// `|P'_0 U|`, only for `m = 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0_u: Option<f64>,
    /// `z + P'_0 z = U + P'_0 U + 2W` and `z - P'_0 z = U - P'_0 U + 2V`.
    pub sum_difference: f64,
    /// `2 = |U|^2 + |P'_0 U|^2 + 4|W|^2` and the same with `V`.
    pub norm_bookkeeping: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CaseIdentities {
    pub fn max(&self) -> f64 {
        worst_of([
            self.tangency,
            self.reflection_orthogonality,
            self.p0_u.unwrap_or(0.0),
            self.sum_difference,
            self.norm_bookkeeping,
        ])
    }

    pub fn record(&self, tol: f64) -> VerificationRecord {
        let rec = VerificationRecord::new("case_identities", self.max(), tol);
        match &self.note {
            Some(n) => rec.with_note(n.clone()),
            None => rec,
        }
    }
}

pub fn case_identities(
    rotated: &CliffordSystem,
    frame: &AdaptedFrame,
    decomp: &PrincipalDecomposition,
) -> CaseIdentities {
    let x = frame.x();
    let m = rotated.m();
    let p0 = rotated.p(0);
    let px = rotated.apply_all(x);

    let mut tangency: f64 = 0.0;
    for a in 0..=m {
        for b in (a + 1)..=m {
            let z = rotated.p(a) * &px[b];
            tangency = worst(tangency, z.dot(x).abs());
            for pcx in &px {
                tangency = worst(tangency, z.dot(pcx).abs());
            }
        }
    }

    let mut out = CaseIdentities {
        pairs: 0,
        tangency,
        reflection_orthogonality: 0.0,
        p0_u: None,
        sum_difference: 0.0,
        norm_bookkeeping: 0.0,
        note: None,
    };
    if m == 1 {
        out.note = Some("trivially balanced: no pairs with a, b > 0".into());
        return out;
    }
    let mut p0_u: f64 = 0.0;
    for a in 1..=m {
        for b in (a + 1)..=m {
            out.pairs += 1;
            let z = rotated.p(a) * &px[b];
            let p0z = p0 * &z;
            let u = project(&decomp.t0, &z);
            let v = project(&decomp.t1, &z);
            let w = project(&decomp.tm1, &z);
            let p0u = p0 * &u;
            p0_u = worst(p0_u, p0u.norm());
            out.reflection_orthogonality = worst(out.reflection_orthogonality, p0z.dot(&z).abs());

            let plus = (&z + &p0z) - (&u + &p0u + &w * 2.0);
            let minus = (&z - &p0z) - (&u - &p0u + &v * 2.0);
            out.sum_difference = worst(out.sum_difference, worst(plus.norm(), minus.norm()));

            let base = u.norm_squared() + p0u.norm_squared();
            let with_w = (2.0 - base - 4.0 * w.norm_squared()).abs();
            let with_v = (2.0 - base - 4.0 * v.norm_squared()).abs();
            out.norm_bookkeeping = worst(out.norm_bookkeeping, worst(with_w, with_v));
        }
    }
    if m == 2 {
        out.p0_u = Some(p0_u);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EinsteinStatus {
    NonEinstein,
    /// The dimension inequality holds but the measured spread is small.
    NoSpreadObserved,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EinsteinProbe {
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    /// `4l > m^2 + 3m + 4`.
    pub inequality: bool,
    /// `dim M_+ > m(m+1)/2`, checked on integers.
    pub dimension_inequality: bool,
    pub status: EinsteinStatus,
}

/// Samples the Ricci quadratic form over random unit tangents and the
/// eigen-directions of the Ricci tensor.
pub fn einstein_probe(
    sys: &CliffordSystem,
    frame: &AdaptedFrame,
    sd: &ShapeData,
    n_dirs: usize,
    seed: u64,
) -> Result<EinsteinProbe> {
    if n_dirs < 2 {
        return Err(Error::Domain(format!("einstein probe needs n_dirs >= 2, got {n_dirs}")));
    }
    let mut values = Vec::with_capacity(n_dirs + frame.dim());
    let mut rng = rng_from_seed(seed);
    for _ in 0..n_dirs {
        let v = frame.random_unit_tangent(&mut rng);
        values.push(ricci_quadratic(sys, frame, &v)?);
    }
    let sym = (&sd.ricci + sd.ricci.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    for col in eig.eigenvectors.column_iter() {
        let v = frame.tangent() * col;
        let v = &v / v.norm();
        values.push(ricci_quadratic(sys, frame, &v)?);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = max - min;

    let (m, l) = (sys.m(), sys.l());
    let inequality = 4 * l > m * m + 3 * m + 4;
    let dimension_inequality = 2 * sys.focal_dim() > m * (m + 1);
    let status = if !inequality {
        EinsteinStatus::Inconclusive
    } else if spread > EINSTEIN_SPREAD {
        EinsteinStatus::NonEinstein
    } else {
        EinsteinStatus::NoSpreadObserved
    };
    Ok(EinsteinProbe {
        min,
        max,
        spread,
        inequality,
        dimension_inequality,
        status,
    })
}

/// Per-point summary of the three residuals that carry the Willmore
/// property, taken over a set of unit normals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WillmoreCertificate {
    /// `max_a |sum_ij R_ij h^a_ij|`.
    pub residual_reduced: f64,
    /// Max over normals of `|sum Ric(v_i) - sum Ric(w_i)|`.
    pub residual_balance: f64,
    /// Max over normals and pairs of the pairwise projection balance.
    pub residual_projection: f64,
    pub pass: bool,
}

/// Builds the certificate at one point. `tol_reduced` bounds the first two
/// residuals, `tol_projection` the third.
pub fn willmore_certificate(
    sys: &CliffordSystem,
    frame: &AdaptedFrame,
    sd: &ShapeData,
    normals: &[DVector<f64>],
    tol_reduced: f64,
    tol_projection: f64,
) -> Result<WillmoreCertificate> {
    let mut residual_balance: f64 = 0.0;
    let mut residual_projection: f64 = 0.0;
    for c in normals {
        let decomp = principal_decomposition(sys, frame, c)?;
        residual_balance = worst(residual_balance, ricci_balance(sys, frame, sd, &decomp)?.balance);
        let rotated = rotate_system(sys, c)?;
        let rframe = frame.with_system(&rotated)?;
        residual_projection = worst(
            residual_projection,
            projection_balance(&rotated, &rframe, &decomp).pairwise,
        );
    }
    let residual_reduced = willmore_residual(sd);
    let pass = residual_reduced <= tol_reduced
        && residual_balance <= tol_reduced
        && residual_projection <= tol_projection;
    Ok(WillmoreCertificate {
        residual_reduced,
        residual_balance,
        residual_projection,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_clifford_system;
    use crate::focal::sample_focal_points;
    use crate::geometry::{build_frame, shape_data};
    use crate::rng::unit_vector;

    fn setup(m: usize, k: usize) -> (CliffordSystem, AdaptedFrame, ShapeData) {
        let sys = build_clifford_system(m, k).unwrap();
        let pt = sample_focal_points(&sys, 1, 23).unwrap().remove(0);
        let frame = build_frame(&sys, &pt).unwrap();
        let sd = shape_data(&sys, &frame);
        (sys, frame, sd)
    }

    fn e0(m: usize) -> DVector<f64> {
        let mut c = DVector::zeros(m + 1);
        c[0] = 1.0;
        c
    }

    #[test]
    fn lemma_dims_first_normal() {
        for &(m, k, dims) in &[(1, 3, [1, 1, 1]), (2, 2, [2, 1, 1]), (3, 2, [3, 4, 4])] {
            let (sys, frame, _) = setup(m, k);
            let d = principal_decomposition(&sys, &frame, &e0(m)).unwrap();
            assert_eq!(d.multiplicities(), dims);
            assert!(d.spectrum_deviation < 1e-8);
        }
    }

    #[test]
    fn decomposition_rejects_non_unit() {
        let (sys, frame, _) = setup(1, 3);
        let c = DVector::from_row_slice(&[1.0, 1.0]);
        assert!(matches!(principal_decomposition(&sys, &frame, &c), Err(Error::Domain(_))));
    }

    #[test]
    fn reflection_for_first_normal() {
        let (sys, frame, _) = setup(2, 2);
        let d = principal_decomposition(&sys, &frame, &e0(2)).unwrap();
        let r = reflection_check(&sys, &frame, &d);
        assert!(r.max() < 1e-10, "{r:?}");
    }

    #[test]
    fn reflection_for_random_normals() {
        let (sys, frame, _) = setup(3, 2);
        let mut rng = rng_from_seed(2);
        for _ in 0..10 {
            let c = unit_vector(&mut rng, 4);
            let d = principal_decomposition(&sys, &frame, &c).unwrap();
            let rot = rotate_system(&sys, &c).unwrap();
            assert!(reflection_check(&rot, &frame, &d).max() < 1e-8);
        }
    }

    #[test]
    fn main_identity_and_balance() {
        for &(m, k) in &[(1, 3), (2, 2), (3, 2)] {
            let (sys, frame, sd) = setup(m, k);
            assert!(willmore_residual(&sd) < 1e-7);
            let d = principal_decomposition(&sys, &frame, &e0(m)).unwrap();
            let b = ricci_balance(&sys, &frame, &sd, &d).unwrap();
            assert!(b.balance < 1e-7 && b.bridge < 1e-8 && b.pair_sums < 1e-8, "{b:?}");
        }
    }

    #[test]
    fn projection_pairs_m4() {
        let (sys, frame, _) = setup(4, 2);
        let d = principal_decomposition(&sys, &frame, &e0(4)).unwrap();
        let p = projection_balance(&sys, &frame, &d);
        assert_eq!(p.pairs, 10);
        assert!(p.max() < 1e-8, "{p:?}");
    }

    #[test]
    fn case_a_identities() {
        let (sys, frame, _) = setup(2, 2);
        let d = principal_decomposition(&sys, &frame, &e0(2)).unwrap();
        let c = case_identities(&sys, &frame, &d);
        assert_eq!(c.pairs, 1);
        assert!(c.p0_u.unwrap() < 1e-8);
        assert!(c.max() < 1e-8, "{c:?}");
    }

    #[test]
    fn case_b_identities() {
        let (sys, frame, _) = setup(3, 2);
        let d = principal_decomposition(&sys, &frame, &e0(3)).unwrap();
        let c = case_identities(&sys, &frame, &d);
        assert_eq!(c.pairs, 3);
        assert!(c.p0_u.is_none());
        assert!(c.max() < 1e-8, "{c:?}");
    }

    #[test]
    fn m1_is_vacuous() {
        let (sys, frame, _) = setup(1, 3);
        let d = principal_decomposition(&sys, &frame, &e0(1)).unwrap();
        let c = case_identities(&sys, &frame, &d);
        assert_eq!(c.pairs, 0);
        assert!(c.note.as_deref().unwrap().contains("trivially balanced"));
        assert!(c.record(1e-8).pass);
    }

    #[test]
    fn einstein_m1() {
        let (sys, frame, sd) = setup(1, 3);
        let p = einstein_probe(&sys, &frame, &sd, 20, 1).unwrap();
        assert!((p.spread - 2.0).abs() < 1e-8, "{p:?}");
        assert_eq!(p.status, EinsteinStatus::NonEinstein);
        assert!(p.dimension_inequality);
        assert!(einstein_probe(&sys, &frame, &sd, 1, 1).is_err());
    }

    #[test]
    fn einstein_m4_inconclusive() {
        let (sys, frame, sd) = setup(4, 2);
        let p = einstein_probe(&sys, &frame, &sd, 20, 1).unwrap();
        assert!(!p.inequality);
        assert_eq!(p.status, EinsteinStatus::Inconclusive);
    }

    #[test]
    fn certificate_over_random_normals() {
        let (sys, frame, sd) = setup(3, 2);
        let mut rng = rng_from_seed(6);
        let normals: Vec<DVector<f64>> = (0..5).map(|_| unit_vector(&mut rng, 4)).collect();
        let cert = willmore_certificate(&sys, &frame, &sd, &normals, 1e-7, 1e-8).unwrap();
        assert!(cert.pass, "{cert:?}");
        let strict = willmore_certificate(&sys, &frame, &sd, &normals, 1e-300, 1e-300).unwrap();
        assert!(!strict.pass);
    }
}
