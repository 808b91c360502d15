//! Extrinsic geometry of `M_+` at a certified point: adapted frames, shape
//! operators, the second fundamental form, mean curvature, sectional and
//! Ricci curvature.
//!
//! Conventions: `n = 2l - m - 2` is the dimension of `M_+`, `e_1..e_n` the
//! tangent frame, `xi_a = P_a x` the normal frame. The shape operator along
//! `xi_a` is `A_a X = -(P_a X)^T`, so in the tangent frame
//! `(A_a)_ij = -<P_a e_i, e_j>`, and `h^a_ij = (A_a)_ij`.
//!
//! Curvatures are available in two independent forms: directly from the
//! Clifford matrices (`sectional_curvature`, `ricci_quadratic`) and from the
//! Gauss equation applied to the shape operators (`sectional_curvature_gauss`,
//! `ricci_tensor`).

use nalgebra::{DMatrix, DVector};

use crate::clifford::CliffordSystem;
use crate::error::{Error, Result};
use crate::focal::FocalPoint;
use crate::record::worst;
use crate::rng::{unit_vector, Rng};

/// Frame Gram matrices may deviate from the identity by at most this.
pub const FRAME_TOLERANCE: f64 = 1e-8;
/// Unit-length and orthogonality tolerance for sectional-curvature inputs.
pub const PAIR_TOLERANCE: f64 = 1e-10;
/// Tangency tolerance for Ricci inputs.
pub const TANGENCY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    point: FocalPoint,
    /// `2l x n`, columns `e_i`.
    tangent: DMatrix<f64>,
    /// `2l x (m+1)`, columns `P_a x`.
    normal: DMatrix<f64>,
}

impl AdaptedFrame {
    pub fn point(&self) -> &FocalPoint {
        &self.point
    }

    pub fn x(&self) -> &DVector<f64> {
        self.point.x()
    }

    pub fn tangent(&self) -> &DMatrix<f64> {
        &self.tangent
    }

    pub fn normal(&self) -> &DMatrix<f64> {
        &self.normal
    }

    pub fn dim(&self) -> usize {
        self.tangent.ncols()
    }

    pub fn tangent_vector(&self, i: usize) -> DVector<f64> {
        self.tangent.column(i).into_owned()
    }

    /// Coordinates of an ambient vector in the tangent frame.
    pub fn tangent_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        self.tangent.tr_mul(v)
    }

    /// Orthogonal projection onto `T_x M_+`.
    pub fn project_tangent(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.tangent * self.tangent_coords(v)
    }

    /// Same tangent frame, normals recomputed as `P'_a x` for another system
    /// spanning the same Clifford sphere (e.g. a rotated one).
    pub fn with_system(&self, sys: &CliffordSystem) -> Result<Self> {
        let normal = normal_matrix(sys, self.x())?;
        Ok(Self {
            point: self.point.clone(),
            tangent: self.tangent.clone(),
            normal,
        })
    }

    /// Replaces the tangent frame by `tangent * q` for an orthogonal `q`.
    pub fn rotate_tangent(&self, q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() != self.dim() || q.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: q.nrows(),
            });
        }
        let frame = Self {
            point: self.point.clone(),
            tangent: &self.tangent * q,
            normal: self.normal.clone(),
        };
        let dev = frame_gram_deviation(&frame);
        if !(dev <= FRAME_TOLERANCE) {
            return Err(Error::Numerical(format!(
                "rotated frame not orthonormal (Gram deviation {dev:e})"
            )));
        }
        Ok(frame)
    }

    /// Uniformly random unit tangent vector.
    pub fn random_unit_tangent(&self, rng: &mut Rng) -> DVector<f64> {
        &self.tangent * unit_vector(rng, self.dim())
    }
}

fn normal_matrix(sys: &CliffordSystem, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    if x.len() != sys.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.ambient_dim(),
            got: x.len(),
        });
    }
    let cols = sys.apply_all(x);
    Ok(DMatrix::from_columns(&cols))
}

/// Orthonormal completion of `fixed` (assumed orthonormal) by pivoted
/// Gram–Schmidt over `candidates`: at each step the candidate with the
/// largest residual is taken, ties broken by lowest index.
fn pivoted_completion(
    fixed: &[DVector<f64>],
    candidates: &[DVector<f64>],
    count: usize,
) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = fixed.to_vec();
    let mut out = Vec::with_capacity(count);
    let mut remaining: Vec<DVector<f64>> = candidates.to_vec();
    let orthogonalize = |v: &mut DVector<f64>, basis: &[DVector<f64>]| {
        for b in basis {
            let proj = v.dot(b);
            v.axpy(-proj, b, 1.0);
        }
    };
    for r in remaining.iter_mut() {
        orthogonalize(r, &basis);
    }
    while out.len() < count && !remaining.is_empty() {
        let (best, _) = remaining
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bn), (i, r)| {
                let rn = r.norm();
                if rn > bn {
                    (i, rn)
                } else {
                    (bi, bn)
                }
            });
        let mut v = remaining.remove(best);
        // reorthogonalize against everything chosen so far
        orthogonalize(&mut v, &basis);
        let vn = v.norm();
        if vn <= 1e-12 {
            break;
        }
        let v = v / vn;
        for r in remaining.iter_mut() {
            let proj = r.dot(&v);
            r.axpy(-proj, &v, 1.0);
        }
        basis.push(v.clone());
        out.push(v);
    }
    out
}

/// Largest deviation of the Gram matrix of `{x, e_1..e_n, xi_0..xi_m}` from
/// the identity.
pub fn frame_gram_deviation(frame: &AdaptedFrame) -> f64 {
    let mut cols: Vec<DVector<f64>> = vec![frame.x().clone()];
    cols.extend(frame.tangent.column_iter().map(|c| c.into_owned()));
    cols.extend(frame.normal.column_iter().map(|c| c.into_owned()));
    let all = DMatrix::from_columns(&cols);
    let gram = all.tr_mul(&all);
    let id = DMatrix::<f64>::identity(gram.nrows(), gram.ncols());
    (gram - id).iter().fold(0.0, |acc, v| worst(acc, v.abs()))
}

/// Normal frame `P_a x` plus a tangent frame spanning the orthogonal
/// complement of `{x, P_0 x, ..., P_m x}`, completed from the standard basis
/// with column pivoting.
pub fn build_frame(sys: &CliffordSystem, pt: &FocalPoint) -> Result<AdaptedFrame> {
    let x = pt.x();
    let normal = normal_matrix(sys, x)?;
    let n_amb = sys.ambient_dim();
    let dim = sys.focal_dim();

    let mut fixed = vec![x.clone()];
    fixed.extend(normal.column_iter().map(|c| c.into_owned()));
    let standard: Vec<DVector<f64>> = (0..n_amb)
        .map(|i| {
            let mut e = DVector::zeros(n_amb);
            e[i] = 1.0;
            e
        })
        .collect();
    let tangent_cols = pivoted_completion(&fixed, &standard, dim);
    if tangent_cols.len() != dim {
        return Err(Error::Numerical(format!(
            "tangent completion produced {} of {dim} vectors",
            tangent_cols.len()
        )));
    }
    let frame = AdaptedFrame {
        point: pt.clone(),
        tangent: DMatrix::from_columns(&tangent_cols),
        normal,
    };
    let dev = frame_gram_deviation(&frame);
    if !(dev <= FRAME_TOLERANCE) {
        return Err(Error::Numerical(format!(
            "adapted frame incomplete (Gram deviation {dev:e})"
        )));
    }
    Ok(frame)
}

/// Shape operators, second fundamental form and derived curvature data.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeData {
    /// `A_0..A_m` in the tangent frame; also the components `h^a_ij`.
    pub a: Vec<DMatrix<f64>>,
    pub s: f64,
    pub rho2: f64,
    pub h_vec: DVector<f64>,
    pub ricci: DMatrix<f64>,
}

impl ShapeData {
    pub fn h(&self, alpha: usize, i: usize, j: usize) -> f64 {
        self.a[alpha][(i, j)]
    }

    pub fn dim(&self) -> usize {
        self.ricci.nrows()
    }

    /// `sum_a c_a A_a`.
    pub fn combined(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        self.a
            .iter()
            .zip(c.iter())
            .fold(DMatrix::zeros(n, n), |acc, (a, &ca)| acc + a * ca)
    }
}

/// `(A_a)_ij = -<P_a e_i, e_j>`.
pub fn shape_operators(sys: &CliffordSystem, frame: &AdaptedFrame) -> Vec<DMatrix<f64>> {
    let e = frame.tangent();
    sys.matrices()
        .iter()
        .map(|p| -(e.transpose() * p * e))
        .collect()
}

/// `S = sum_{a,i,j} (h^a_ij)^2`.
pub fn second_fundamental_norm(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|m| m.norm_squared()).sum()
}

/// `H^a = tr(A_a) / n`.
pub fn mean_curvature(a: &[DMatrix<f64>]) -> DVector<f64> {
    DVector::from_iterator(
        a.len(),
        a.iter().map(|m| m.trace() / m.nrows() as f64),
    )
}

/// Gauss contraction in a unit sphere:
/// `R_ij = (n-1) delta_ij + sum_a [tr(A_a) (A_a)_ij - (A_a^2)_ij]`.
pub fn ricci_tensor(a: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = a.first().map_or(0, |m| m.nrows());
    let mut r = DMatrix::<f64>::identity(n, n) * (n as f64 - 1.0);
    for am in a {
        r += am * am.trace();
        r -= am * am;
    }
    r
}

pub fn shape_data(sys: &CliffordSystem, frame: &AdaptedFrame) -> ShapeData {
    let a = shape_operators(sys, frame);
    let s = second_fundamental_norm(&a);
    let h_vec = mean_curvature(&a);
    let n = frame.dim() as f64;
    let rho2 = s - n * h_vec.norm_squared();
    let ricci = ricci_tensor(&a);
    ShapeData {
        a,
        s,
        rho2,
        h_vec,
        ricci,
    }
}

/// Closed-form value of `S` on `M_+`: `2(l - m - 1)(m + 1)`.
pub fn expected_s(sys: &CliffordSystem) -> f64 {
    let (m1, m2) = sys.multiplicities();
    2.0 * (m2 * (m1 + 1)) as f64
}

/// `S` through the normal-component route:
/// `sum_i sum_a { 1 - sum_b <P_a e_i, P_b x>^2 }`.
pub fn s_via_normal_components(sys: &CliffordSystem, frame: &AdaptedFrame) -> f64 {
    let normal = frame.normal();
    let mut total = 0.0;
    for e in frame.tangent().column_iter() {
        for p in sys.matrices() {
            let pe = p * e;
            let normal_part = normal.tr_mul(&pe).norm_squared();
            total += 1.0 - normal_part;
        }
    }
    total
}

/// `S` through `(2l-m-2)(m+1) - 2 sum_{a<b} |P_a P_b x|^2`.
pub fn s_via_pair_norms(sys: &CliffordSystem, frame: &AdaptedFrame) -> f64 {
    let px = sys.apply_all(frame.x());
    let mut pair_sum = 0.0;
    for a in 0..px.len() {
        for b in (a + 1)..px.len() {
            pair_sum += (sys.p(a) * &px[b]).norm_squared();
        }
    }
    (frame.dim() * (sys.m() + 1)) as f64 - 2.0 * pair_sum
}

fn check_unit_tangent(frame: &AdaptedFrame, v: &DVector<f64>, tol: f64) -> Result<()> {
    if v.len() != frame.x().len() {
        return Err(Error::DimensionMismatch {
            expected: frame.x().len(),
            got: v.len(),
        });
    }
    let unit = (v.norm() - 1.0).abs();
    let normal_part = (v - frame.project_tangent(v)).norm();
    if !(unit <= tol && normal_part <= TANGENCY_TOLERANCE) {
        return Err(Error::Domain(format!(
            "expected a unit tangent vector (| |v| - 1 | = {unit:e}, normal part {normal_part:e})"
        )));
    }
    Ok(())
}

fn check_orthonormal_pair(frame: &AdaptedFrame, x: &DVector<f64>, y: &DVector<f64>) -> Result<()> {
    check_unit_tangent(frame, x, PAIR_TOLERANCE)?;
    check_unit_tangent(frame, y, PAIR_TOLERANCE)?;
    let dot = x.dot(y).abs();
    if !(dot <= PAIR_TOLERANCE) {
        return Err(Error::Domain(format!(
            "sectional curvature needs orthogonal vectors, <X,Y> = {dot:e}"
        )));
    }
    Ok(())
}

/// `K(X, Y) = 1 + sum_a { <P_a X, X><P_a Y, Y> - <P_a X, Y>^2 }`.
pub fn sectional_curvature(
    sys: &CliffordSystem,
    frame: &AdaptedFrame,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    check_orthonormal_pair(frame, x, y)?;
    Ok(sectional_unchecked(sys, x, y))
}

fn sectional_unchecked(sys: &CliffordSystem, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    1.0 + sys
        .matrices()
        .iter()
        .map(|p| {
            let px = p * x;
            let pxy = px.dot(y);
            px.dot(x) * (p * y).dot(y) - pxy * pxy
        })
        .sum::<f64>()
}

/// Gauss equation with the shape operators:
/// `K(X, Y) = 1 + sum_a { <A_a X, X><A_a Y, Y> - <A_a X, Y>^2 }`.
pub fn sectional_curvature_gauss(
    shape: &ShapeData,
    frame: &AdaptedFrame,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    check_orthonormal_pair(frame, x, y)?;
    let cx = frame.tangent_coords(x);
    let cy = frame.tangent_coords(y);
    Ok(1.0
        + shape
            .a
            .iter()
            .map(|a| {
                let ax = a * &cx;
                let axy = ax.dot(&cy);
                ax.dot(&cx) * (a * &cy).dot(&cy) - axy * axy
            })
            .sum::<f64>())
}

/// `Ric(X) = 2(l - m - 2) + 2 sum_{a<b} <X, P_a P_b x>^2` for a unit tangent `X`.
pub fn ricci_quadratic(sys: &CliffordSystem, frame: &AdaptedFrame, v: &DVector<f64>) -> Result<f64> {
    check_unit_tangent(frame, v, TANGENCY_TOLERANCE)?;
    let (m, l) = (sys.m(), sys.l());
    assert!(l >= m + 2, "closed-form Ricci needs l >= m + 2");
    let px = sys.apply_all(frame.x());
    let mut pair_sum = 0.0;
    for a in 0..=m {
        // <X, P_a P_b x> = <P_a X, P_b x>
        let pav = sys.p(a) * v;
        for pbx in px.iter().skip(a + 1) {
            let t = pav.dot(pbx);
            pair_sum += t * t;
        }
    }
    Ok(2.0 * (l - m - 2) as f64 + 2.0 * pair_sum)
}

/// Orthonormal completion of a unit tangent `X` to a basis of `T_x M_+`,
/// excluding `X` itself.
pub fn complete_tangent(frame: &AdaptedFrame, v: &DVector<f64>) -> Vec<DVector<f64>> {
    let mut fixed = vec![frame.x().clone(), v.clone()];
    fixed.extend(frame.normal().column_iter().map(|c| c.into_owned()));
    // normals are orthonormal only up to roundoff; re-orthonormalize
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    for f in fixed {
        let mut w = f;
        for b in &ortho {
            let proj = w.dot(b);
            w.axpy(-proj, b, 1.0);
        }
        let wn = w.norm();
        if wn > 1e-12 {
            ortho.push(w / wn);
        }
    }
    let candidates: Vec<DVector<f64>> = frame.tangent.column_iter().map(|c| c.into_owned()).collect();
    pivoted_completion(&ortho, &candidates, frame.dim() - 1)
}

/// `Ric(X) = sum_{i>=2} K(X, e_i)` over an orthonormal completion of `X`.
pub fn ricci_from_sectional(
    sys: &CliffordSystem,
    frame: &AdaptedFrame,
    v: &DVector<f64>,
) -> Result<f64> {
    check_unit_tangent(frame, v, TANGENCY_TOLERANCE)?;
    Ok(complete_tangent(frame, v)
        .iter()
        .map(|e| sectional_unchecked(sys, v, e))
        .sum())
}

/// Max over `a` of `| <P_a X, X> + sum_{i>=2} <P_a e_i, e_i> |` with
/// `e_2..e_n` completing `X`; vanishes because `P_a` is trace free.
pub fn trace_split_residual(
    sys: &CliffordSystem,
    frame: &AdaptedFrame,
    v: &DVector<f64>,
) -> Result<f64> {
    check_unit_tangent(frame, v, TANGENCY_TOLERANCE)?;
    let rest = complete_tangent(frame, v);
    Ok(sys.matrices().iter().fold(0.0, |acc, p| {
        let t = (p * v).dot(v) + rest.iter().map(|e| (p * e).dot(e)).sum::<f64>();
        worst(acc, t.abs())
    }))
}

/// Max over `a` of
/// `| <P_a X, X>^2 + sum_{i>=2} <P_a X, e_i>^2 + sum_b <X, P_a P_b x>^2 - 1 |`.
pub fn completeness_residual(
    sys: &CliffordSystem,
    frame: &AdaptedFrame,
    v: &DVector<f64>,
) -> Result<f64> {
    check_unit_tangent(frame, v, TANGENCY_TOLERANCE)?;
    let rest = complete_tangent(frame, v);
    let px = sys.apply_all(frame.x());
    Ok(sys.matrices().iter().fold(0.0, |acc, p| {
        let pv = p * v;
        let along = pv.dot(v);
        let tangential: f64 = rest.iter().map(|e| pv.dot(e).powi(2)).sum();
        let normal: f64 = px.iter().map(|pbx| pv.dot(pbx).powi(2)).sum();
        worst(acc, (along * along + tangential + normal - 1.0).abs())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_clifford_system;
    use crate::focal::{deterministic_seed, sample_focal_points};
    use crate::rng::rng_from_seed;

    fn setup(m: usize, k: usize) -> (CliffordSystem, AdaptedFrame) {
        let sys = build_clifford_system(m, k).unwrap();
        let pt = sample_focal_points(&sys, 1, 17).unwrap().remove(0);
        let frame = build_frame(&sys, &pt).unwrap();
        (sys, frame)
    }

    #[test]
    fn frame_m1_l3() {
        let (_, frame) = setup(1, 3);
        assert_eq!(frame.dim(), 3);
        assert_eq!(frame.normal().ncols(), 2);
        assert!(frame_gram_deviation(&frame) < 1e-12);
        assert!(frame.tangent().tr_mul(frame.x()).amax() < 1e-12);
    }

    #[test]
    fn normals_are_p_times_x() {
        let (sys, frame) = setup(2, 2);
        for a in 0..3 {
            assert_eq!(frame.normal().column(a).into_owned(), sys.p(a) * frame.x());
        }
        let gram = frame.normal().tr_mul(frame.normal());
        assert!((gram - DMatrix::<f64>::identity(3, 3)).amax() < 1e-10);
    }

    #[test]
    fn frame_is_deterministic() {
        let sys = build_clifford_system(3, 2).unwrap();
        let pt = deterministic_seed(&sys).unwrap();
        assert_eq!(build_frame(&sys, &pt).unwrap(), build_frame(&sys, &pt).unwrap());
    }

    #[test]
    fn shape_operators_symmetric_and_trace_free() {
        let (sys, frame) = setup(3, 2);
        let sd = shape_data(&sys, &frame);
        for a in &sd.a {
            assert!((a - a.transpose()).amax() < 1e-10);
            assert!(a.trace().abs() < 1e-10);
        }
        assert!(sd.h_vec.amax() < 1e-10);
        assert!((sd.rho2 - sd.s).abs() < 1e-10);
        assert_eq!(sd.h(1, 0, 2), sd.a[1][(0, 2)]);
    }

    #[test]
    fn principal_curvatures_of_first_normal() {
        let (sys, frame) = setup(2, 2);
        let sd = shape_data(&sys, &frame);
        for ev in sd.a[0].clone().symmetric_eigen().eigenvalues.iter() {
            let d = [0.0, 1.0, -1.0].iter().map(|t| (ev - t).abs()).fold(f64::MAX, f64::min);
            assert!(d < 1e-8, "eigenvalue {ev}");
        }
    }

    #[test]
    fn s_closed_form_values() {
        for &(m, k, s) in &[(1, 3, 4.0), (2, 2, 6.0), (3, 2, 32.0)] {
            let (sys, frame) = setup(m, k);
            assert_eq!(expected_s(&sys), s);
            let sd = shape_data(&sys, &frame);
            assert!((second_fundamental_norm(&sd.a) - s).abs() < 1e-8);
            assert!((s_via_normal_components(&sys, &frame) - s).abs() < 1e-8);
            assert!((s_via_pair_norms(&sys, &frame) - s).abs() < 1e-8);
        }
    }

    #[test]
    fn corrupted_frame_shows_mean_curvature() {
        let (sys, frame) = setup(1, 3);
        let mut tangent = frame.tangent().clone();
        tangent.set_column(0, frame.x());
        let bad = AdaptedFrame {
            point: frame.point().clone(),
            tangent,
            normal: frame.normal().clone(),
        };
        let a = shape_operators(&sys, &bad);
        // tr A_a shifts by <P_a e_0, e_0>
        let h = mean_curvature(&a);
        assert!(h.amax() > 1e-3, "H = {h}");
    }

    #[test]
    fn sectional_two_routes_and_symmetry() {
        let (sys, frame) = setup(3, 2);
        let sd = shape_data(&sys, &frame);
        let e0 = frame.tangent_vector(0);
        let e1 = frame.tangent_vector(1);
        let k = sectional_curvature(&sys, &frame, &e0, &e1).unwrap();
        let kg = sectional_curvature_gauss(&sd, &frame, &e0, &e1).unwrap();
        assert!((k - kg).abs() < 1e-10);
        let ks = sectional_curvature(&sys, &frame, &e1, &e0).unwrap();
        assert!((k - ks).abs() < 1e-14);
    }

    #[test]
    fn sectional_rejects_non_orthonormal() {
        let (sys, frame) = setup(1, 3);
        let e0 = frame.tangent_vector(0);
        assert!(matches!(sectional_curvature(&sys, &frame, &e0, &e0), Err(Error::Domain(_))));
        let scaled = &e0 * 2.0;
        let e1 = frame.tangent_vector(1);
        assert!(sectional_curvature(&sys, &frame, &scaled, &e1).is_err());
    }

    #[test]
    fn ricci_routes_agree() {
        let (sys, frame) = setup(2, 2);
        let sd = shape_data(&sys, &frame);
        let mut rng = rng_from_seed(4);
        for _ in 0..20 {
            let v = frame.random_unit_tangent(&mut rng);
            let q = ricci_quadratic(&sys, &frame, &v).unwrap();
            let c = frame.tangent_coords(&v);
            assert!((c.dot(&(&sd.ricci * &c)) - q).abs() < 1e-8);
            assert!((ricci_from_sectional(&sys, &frame, &v).unwrap() - q).abs() < 1e-8);
            assert_eq!(q, ricci_quadratic(&sys, &frame, &-&v).unwrap());
        }
    }

    #[test]
    fn ricci_range_m1() {
        let (sys, frame) = setup(1, 3);
        let mut rng = rng_from_seed(8);
        for _ in 0..200 {
            let v = frame.random_unit_tangent(&mut rng);
            let q = ricci_quadratic(&sys, &frame, &v).unwrap();
            assert!((-1e-12..=2.0 + 1e-12).contains(&q), "{q}");
        }
    }

    #[test]
    fn ricci_rejects_normal_vector() {
        let (sys, frame) = setup(1, 3);
        let xi = frame.normal().column(0).into_owned();
        assert!(matches!(ricci_quadratic(&sys, &frame, &xi), Err(Error::Domain(_))));
    }

    #[test]
    fn ricci_trace() {
        let (sys, frame) = setup(3, 2);
        let sd = shape_data(&sys, &frame);
        let n = frame.dim() as f64;
        assert!((sd.ricci.trace() - (n * (n - 1.0) - sd.s)).abs() < 1e-8);
        assert!((&sd.ricci - sd.ricci.transpose()).amax() < 1e-12);
    }

    #[test]
    fn trace_and_completeness_identities() {
        let (sys, frame) = setup(4, 2);
        let mut rng = rng_from_seed(12);
        for _ in 0..10 {
            let v = frame.random_unit_tangent(&mut rng);
            assert!(trace_split_residual(&sys, &frame, &v).unwrap() < 1e-9);
            assert!(completeness_residual(&sys, &frame, &v).unwrap() < 1e-9);
        }
    }
}
