//! Symmetric Clifford systems `{P_0, ..., P_m}` on `R^{2l}`.
//!
//! Systems are assembled from skew generators `E_1, ..., E_{m-1}` on
//! `R^{delta(m)}` with the block formulas, writing `R^{2l} = R^l (+) R^l`:
//!
//! ```text
//! P_0     (u, v) = (u, -v)
//! P_1     (u, v) = (v, u)
//! P_{1+i} (u, v) = (E_i v, -E_i u)
//! ```
//!
//! where `E_i` acts on `R^l` as the `k`-fold block-diagonal copy of the base
//! generator. All entries lie in `{-1, 0, 1}`, so every relation is checked
//! with zero tolerance.
//!
//! Base generators are left multiplications by imaginary units in the
//! Cayley–Dickson algebras: `R^2` (complex), `R^4` (quaternion) and `R^8`
//! (octonion). The product is the doubling rule
//!
//! ```text
//! (a, b)(c, d) = (a c - d* b, d a + b c*),    (a, b)* = (a*, -b)
//! ```
//!
//! applied recursively to coordinate vectors of length `2^p`, with unit
//! `e_j` the `j`-th coordinate. For octonions this gives `e_{4+i}` as the
//! pair `(0, e_i)` over the quaternions. For `m > 8` the generators are
//! extended by one periodicity step at a time, tensoring with the eight
//! generators on `R^16` (see [`build_skew_generators`]).

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::record::{worst, VerificationRecord};

/// Largest base representation dimension `delta(m)` we are willing to build
/// as dense matrices.
pub const MAX_GENERATOR_DIM: usize = 1024;

/// Projections with norm at or below this are skipped when completing a unit
/// vector to an orthonormal basis in [`rotate_system`].
pub const PIVOT_SKIP: f64 = 1e-6;

/// Representation dimension table with `delta(m + 8) = 16 delta(m)`.
pub fn delta(m: usize) -> Result<usize> {
    const TABLE: [usize; 8] = [1, 2, 4, 4, 8, 8, 8, 8];
    if m == 0 {
        return Err(Error::Domain("delta(m) requires m >= 1".into()));
    }
    let steps = (m - 1) / 8;
    Ok(TABLE[(m - 1) % 8] * 16usize.pow(steps as u32))
}

/// Anticommuting orthogonal skew matrices `E_1, ..., E_{m-1}` on `R^{delta(m)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewGeneratorSet {
    dim: usize,
    matrices: Vec<DMatrix<f64>>,
}

impl SkewGeneratorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }
}

fn cd_conj(a: &[f64]) -> Vec<f64> {
    if a.len() == 1 {
        return a.to_vec();
    }
    let h = a.len() / 2;
    let mut out = cd_conj(&a[..h]);
    out.extend(a[h..].iter().map(|x| -x));
    out
}

/// Cayley–Dickson product of two elements of the `2^p`-dimensional algebra.
pub fn cayley_dickson_mul(x: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), y.len());
    assert!(x.len().is_power_of_two());
    if x.len() == 1 {
        return vec![x[0] * y[0]];
    }
    let h = x.len() / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let ac = cayley_dickson_mul(a, c);
    let db = cayley_dickson_mul(&cd_conj(d), b);
    let da = cayley_dickson_mul(d, a);
    let bc = cayley_dickson_mul(b, &cd_conj(c));
    let mut out: Vec<f64> = ac.iter().zip(&db).map(|(p, q)| p - q).collect();
    out.extend(da.iter().zip(&bc).map(|(p, q)| p + q));
    out
}

/// Matrix of `x -> e_unit * x` on the `dim`-dimensional Cayley–Dickson algebra.
pub fn left_multiplication(dim: usize, unit: usize) -> DMatrix<f64> {
    let basis = |j: usize| {
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        v
    };
    let e = basis(unit);
    let mut mat = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col = cayley_dickson_mul(&e, &basis(j));
        for (i, value) in col.into_iter().enumerate() {
            mat[(i, j)] = value;
        }
    }
    mat
}

/// Eight anticommuting skew generators on `R^16 = R^8 (x) R^2`:
/// `L_i (x) Z` for the octonion units `i = 1..7` and `I_8 (x) J`.
fn periodicity_generators() -> Vec<DMatrix<f64>> {
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let mut gens: Vec<DMatrix<f64>> = (1..8)
        .map(|i| left_multiplication(8, i).kronecker(&z))
        .collect();
    gens.push(DMatrix::<f64>::identity(8, 8).kronecker(&j));
    gens
}

/// Anticommuting skew generators `E_1, ..., E_{m-1}` with `E_i^2 = -I`.
///
/// For `m <= 8` these are left multiplications by the first `m - 1`
/// imaginary units of the Cayley–Dickson algebra of dimension `delta(m)`.
/// For `m > 8` the generators for `m - 8` are tensored with the volume
/// element `w = F_1 ... F_8` of the eight generators `F_j` on `R^16`
/// (`w` is a symmetric involution anticommuting with every `F_j`):
/// `{E_i (x) w} ∪ {I (x) F_j}`.
pub fn build_skew_generators(m: usize) -> Result<SkewGeneratorSet> {
    let dim = delta(m)?;
    if dim > MAX_GENERATOR_DIM {
        return Err(Error::Unsupported {
            m,
            reason: format!(
                "periodicity step would need delta(m) = {dim} > {MAX_GENERATOR_DIM} dense dimensions"
            ),
        });
    }
    if m <= 8 {
        let matrices = (1..m).map(|i| left_multiplication(dim, i)).collect();
        return Ok(SkewGeneratorSet { dim, matrices });
    }

    let base = build_skew_generators(m - 8)?;
    let f = periodicity_generators();
    let volume = f.iter().skip(1).fold(f[0].clone(), |acc, g| acc * g);
    let id_base = DMatrix::<f64>::identity(base.dim, base.dim);
    let mut matrices: Vec<DMatrix<f64>> =
        base.matrices.iter().map(|e| e.kronecker(&volume)).collect();
    matrices.extend(f.iter().map(|g| id_base.kronecker(g)));
    debug_assert_eq!(matrices.len(), m - 1);
    Ok(SkewGeneratorSet { dim, matrices })
}

/// The matrices `P_0, ..., P_m` of a symmetric Clifford system on `R^{2l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordSystem {
    m: usize,
    l: usize,
    matrices: Vec<DMatrix<f64>>,
}

impl CliffordSystem {
    /// Wraps raw matrices after shape and admissibility checks. The Clifford
    /// relations are *not* enforced here; use [`verify_clifford_relations`].
    pub fn from_matrices(m: usize, matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("a Clifford system needs m >= 1".into()));
        }
        if matrices.len() != m + 1 {
            return Err(Error::DimensionMismatch {
                expected: m + 1,
                got: matrices.len(),
            });
        }
        let n = matrices[0].nrows();
        if n == 0 || n % 2 != 0 {
            return Err(Error::Domain(format!(
                "ambient dimension must be even and positive, got {n}"
            )));
        }
        for p in &matrices {
            if p.nrows() != n || p.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: if p.nrows() != n { p.nrows() } else { p.ncols() },
                });
            }
        }
        let l = n / 2;
        let m2 = l as i64 - m as i64 - 1;
        if m2 < 1 {
            return Err(Error::Inadmissible { m, k: 0, l, m2 });
        }
        Ok(Self { m, l, matrices })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// `2l`.
    pub fn ambient_dim(&self) -> usize {
        2 * self.l
    }

    /// Dimension of the focal submanifold `M_+`: `2l - m - 2`.
    pub fn focal_dim(&self) -> usize {
        2 * self.l - self.m - 2
    }

    /// Multiplicities `(m1, m2) = (m, l - m - 1)`.
    pub fn multiplicities(&self) -> (usize, usize) {
        (self.m, self.l - self.m - 1)
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    pub fn p(&self, alpha: usize) -> &DMatrix<f64> {
        &self.matrices[alpha]
    }

    /// `P_alpha x` for every alpha.
    pub fn apply_all(&self, x: &DVector<f64>) -> Vec<DVector<f64>> {
        self.matrices.iter().map(|p| p * x).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.matrices
            .iter()
            .all(|p| p.iter().all(|v| v.fract() == 0.0))
    }
}

/// The block-construction Clifford system for `(m, k)`, with `l = k delta(m)`.
pub fn build_clifford_system(m: usize, k: usize) -> Result<CliffordSystem> {
    if k == 0 {
        return Err(Error::Domain("k must be a positive integer".into()));
    }
    let d = delta(m)?;
    let l = k * d;
    let m2 = l as i64 - m as i64 - 1;
    if m2 < 1 {
        return Err(Error::Inadmissible { m, k, l, m2 });
    }
    let gens = build_skew_generators(m)?;

    let id = DMatrix::<f64>::identity(l, l);
    let id_k = DMatrix::<f64>::identity(k, k);
    let block = |tl: &DMatrix<f64>, tr: &DMatrix<f64>, bl: &DMatrix<f64>, br: &DMatrix<f64>| {
        let mut p = DMatrix::zeros(2 * l, 2 * l);
        p.view_mut((0, 0), (l, l)).copy_from(tl);
        p.view_mut((0, l), (l, l)).copy_from(tr);
        p.view_mut((l, 0), (l, l)).copy_from(bl);
        p.view_mut((l, l), (l, l)).copy_from(br);
        p
    };
    let zero = DMatrix::<f64>::zeros(l, l);

    let mut matrices = Vec::with_capacity(m + 1);
    matrices.push(block(&id, &zero, &zero, &(-&id)));
    matrices.push(block(&zero, &id, &id, &zero));
    for e in gens.matrices() {
        let e_l = id_k.kronecker(e);
        matrices.push(block(&zero, &e_l, &(-&e_l), &zero));
    }
    Ok(CliffordSystem { m, l, matrices })
}

/// Largest absolute deviation over symmetry, anticommutation, involution and
/// trace checks.
pub fn clifford_deviation(sys: &CliffordSystem) -> f64 {
    let n = sys.ambient_dim();
    let id = DMatrix::<f64>::identity(n, n);
    let max_abs = |m: &DMatrix<f64>| m.iter().fold(0.0, |acc, v| worst(acc, v.abs()));
    let mut dev: f64 = 0.0;
    for (a, pa) in sys.matrices.iter().enumerate() {
        dev = worst(dev, max_abs(&(pa - pa.transpose())));
        dev = worst(dev, pa.trace().abs());
        for (b, pb) in sys.matrices.iter().enumerate().skip(a) {
            let mut anti = pa * pb + pb * pa;
            if a == b {
                anti -= &id * 2.0;
            }
            dev = worst(dev, max_abs(&anti));
        }
    }
    dev
}

/// Exact check: passes only with zero deviation.
pub fn verify_clifford_relations(sys: &CliffordSystem) -> VerificationRecord {
    VerificationRecord::new("clifford_relations", clifford_deviation(sys), 0.0)
}

/// Same checks with a floating tolerance, for rotated systems.
pub fn verify_clifford_relations_within(sys: &CliffordSystem, tol: f64) -> VerificationRecord {
    VerificationRecord::new("clifford_relations", clifford_deviation(sys), tol)
}

/// Orthogonal `(m+1) x (m+1)` matrix whose first row is `c`, completed by
/// Gram–Schmidt against the standard basis in order, skipping vectors whose
/// projection has norm `<= PIVOT_SKIP`.
pub fn rotation_basis(c: &DVector<f64>) -> Result<DMatrix<f64>> {
    let norm = c.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "rotation vector must be a unit vector, |c| = {norm}"
        )));
    }
    let dim = c.len();
    let mut rows: Vec<DVector<f64>> = vec![c.clone()];
    for j in 0..dim {
        if rows.len() == dim {
            break;
        }
        let mut r = DVector::<f64>::zeros(dim);
        r[j] = 1.0;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &rows {
                let proj = r.dot(b);
                r.axpy(-proj, b, 1.0);
            }
        }
        let rn = r.norm();
        if rn > PIVOT_SKIP {
            rows.push(r / rn);
        }
    }
    if rows.len() != dim {
        return Err(Error::Numerical(
            "orthonormal completion of the rotation vector failed".into(),
        ));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

/// Rotates the system inside its Clifford sphere: `P'_b = sum_a C[b][a] P_a`
/// with `C = rotation_basis(c)`, so `P'_0 = sum_a c_a P_a`.
pub fn rotate_system(sys: &CliffordSystem, c: &DVector<f64>) -> Result<CliffordSystem> {
    if c.len() != sys.m + 1 {
        return Err(Error::DimensionMismatch {
            expected: sys.m + 1,
            got: c.len(),
        });
    }
    let basis = rotation_basis(c)?;
    let n = sys.ambient_dim();
    let matrices = (0..=sys.m)
        .map(|b| {
            let mut p = DMatrix::zeros(n, n);
            for (a, pa) in sys.matrices.iter().enumerate() {
                let coeff = basis[(b, a)];
                if coeff != 0.0 {
                    p += pa * coeff;
                }
            }
            p
        })
        .collect();
    Ok(CliffordSystem {
        m: sys.m,
        l: sys.l,
        matrices,
    })
}

/// Text dump: a header line `"2l m"`, then `m+1` blocks of `2l` rows of
/// space-separated integers. Fails for non-integral (e.g. rotated) systems.
pub fn dump_matrices(sys: &CliffordSystem) -> Result<String> {
    if !sys.is_integral() {
        return Err(Error::Domain(
            "matrix dump requires integer entries".into(),
        ));
    }
    let n = sys.ambient_dim();
    let mut out = String::new();
    writeln!(out, "{} {}", n, sys.m).unwrap();
    for p in &sys.matrices {
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{}", p[(i, j)] as i64)).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    }
    Ok(out)
}

/// Inverse of [`dump_matrices`]; blank lines are ignored.
pub fn parse_matrix_dump(text: &str) -> Result<CliffordSystem> {
    let mut lines = text.lines().map(str::trim).filter(|s| !s.is_empty()).peekable();
    if lines.peek().is_none() {
        return Err(Error::Parse("empty matrix dump".into()));
    }
    let sys = parse_one(&mut lines)?;
    if lines.next().is_some() {
        return Err(Error::Parse("trailing data after matrix dump".into()));
    }
    Ok(sys)
}

/// Parses several concatenated dumps, as written for a whole grid.
pub fn parse_matrix_dumps(text: &str) -> Result<Vec<CliffordSystem>> {
    let mut lines = text.lines().map(str::trim).filter(|s| !s.is_empty()).peekable();
    let mut out = Vec::new();
    while lines.peek().is_some() {
        out.push(parse_one(&mut lines)?);
    }
    Ok(out)
}

fn parse_one<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<CliffordSystem> {
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix dump".into()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad header token {t:?}")))
        })
        .collect::<Result<_>>()?;
    let [n, m] = nums[..] else {
        return Err(Error::Parse(format!("header must be \"2l m\", got {header:?}")));
    };
    let mut matrices = Vec::with_capacity(m + 1);
    for _ in 0..=m {
        let mut p = DMatrix::zeros(n, n);
        for i in 0..n {
            let row = lines
                .next()
                .ok_or_else(|| Error::Parse("truncated matrix dump".into()))?;
            let entries: Vec<i64> = row
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad matrix entry {t:?}")))
                })
                .collect::<Result<_>>()?;
            if entries.len() != n {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, expected {n}",
                    entries.len()
                )));
            }
            for (j, v) in entries.into_iter().enumerate() {
                p[(i, j)] = v as f64;
            }
        }
        matrices.push(p);
    }
    CliffordSystem::from_matrices(m, matrices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    #[test]
    fn delta_table() {
        let expected = [1, 2, 4, 4, 8, 8, 8, 8, 16, 32, 64, 64, 128];
        for (i, &d) in expected.iter().enumerate() {
            assert_eq!(delta(i + 1).unwrap(), d, "m = {}", i + 1);
        }
        assert_eq!(delta(17).unwrap(), 256);
        assert!(matches!(delta(0), Err(Error::Domain(_))));
    }

    #[test]
    fn cayley_dickson_reproduces_quaternions() {
        // i*j = k, j*k = i, k*i = j, i*i = -1
        let e = |j: usize| {
            let mut v = vec![0.0; 4];
            v[j] = 1.0;
            v
        };
        assert_eq!(cayley_dickson_mul(&e(1), &e(2)), e(3));
        assert_eq!(cayley_dickson_mul(&e(2), &e(3)), e(1));
        assert_eq!(cayley_dickson_mul(&e(3), &e(1)), e(2));
        assert_eq!(cayley_dickson_mul(&e(1), &e(1)), vec![-1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn m2_generator_is_rotation() {
        let g = build_skew_generators(2).unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.count(), 1);
        let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert_eq!(g.matrices()[0], j);
        assert_eq!(&j * &j, -DMatrix::<f64>::identity(2, 2));
    }

    #[test]
    fn m1_generators_empty() {
        let g = build_skew_generators(1).unwrap();
        assert_eq!((g.dim(), g.count()), (1, 0));
    }

    #[test]
    fn generator_relations_brute_force() {
        for m in 1..=10 {
            let g = build_skew_generators(m).unwrap();
            assert_eq!(g.count(), m - 1);
            let id = DMatrix::<f64>::identity(g.dim(), g.dim());
            for (a, ea) in g.matrices().iter().enumerate() {
                assert!(ea.iter().all(|v| [-1.0, 0.0, 1.0].contains(v)));
                assert_eq!(ea.transpose(), -ea, "m={m} E{a} not skew");
                for (b, eb) in g.matrices().iter().enumerate() {
                    let mut anti = ea * eb + eb * ea;
                    if a == b {
                        anti += &id * 2.0;
                    }
                    assert_eq!(max_abs(&anti), 0.0, "m={m} pair ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn block_system_m1_k3() {
        let sys = build_clifford_system(1, 3).unwrap();
        assert_eq!(sys.matrices().len(), 2);
        assert_eq!(sys.ambient_dim(), 6);
        let p0 = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0]));
        assert_eq!(sys.p(0), &p0);
        assert!(verify_clifford_relations(&sys).pass);
    }

    #[test]
    fn exhaustive_relations_small_grid() {
        for &(m, k) in &[(1, 3), (1, 4), (2, 2), (3, 2), (4, 2), (5, 1), (6, 1), (7, 2), (8, 2), (9, 1)] {
            let sys = build_clifford_system(m, k).unwrap();
            let rec = verify_clifford_relations(&sys);
            assert_eq!(rec.max_residual, 0.0, "({m},{k})");
            assert!(rec.pass);
            assert!(sys.is_integral());
        }
    }

    #[test]
    fn inadmissible_reports_m2() {
        let err = build_clifford_system(3, 1).unwrap_err();
        assert_eq!(err, Error::Inadmissible { m: 3, k: 1, l: 4, m2: 0 });
        assert!(matches!(build_clifford_system(2, 1), Err(Error::Inadmissible { m2: -1, .. })));
    }

    #[test]
    fn corrupted_entry_is_detected() {
        let sys = build_clifford_system(1, 3).unwrap();
        let mut mats = sys.matrices().to_vec();
        mats[0][(0, 0)] = 2.0;
        let bad = CliffordSystem::from_matrices(1, mats).unwrap();
        let rec = verify_clifford_relations(&bad);
        assert!(rec.max_residual >= 1.0);
        assert!(!rec.pass);
    }

    #[test]
    fn identity_rotation_is_exact() {
        let sys = build_clifford_system(3, 2).unwrap();
        let mut c = DVector::zeros(4);
        c[0] = 1.0;
        assert_eq!(rotate_system(&sys, &c).unwrap(), sys);
    }

    #[test]
    fn rotation_to_second_generator() {
        let sys = build_clifford_system(2, 2).unwrap();
        let c = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let rot = rotate_system(&sys, &c).unwrap();
        assert_eq!(rot.p(0), sys.p(1));
        assert!(verify_clifford_relations_within(&rot, 1e-12).pass);
    }

    #[test]
    fn rotation_rejects_non_unit() {
        let sys = build_clifford_system(1, 3).unwrap();
        let c = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(rotate_system(&sys, &c), Err(Error::Domain(_))));
    }

    #[test]
    fn dump_round_trip() {
        let sys = build_clifford_system(2, 2).unwrap();
        let text = dump_matrices(&sys).unwrap();
        assert!(text.starts_with("8 2\n"));
        assert_eq!(text.lines().count(), 1 + 3 * 8);
        assert_eq!(parse_matrix_dump(&text).unwrap(), sys);
    }

    #[test]
    fn dump_rejects_rotated() {
        let sys = build_clifford_system(1, 3).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rot = rotate_system(&sys, &DVector::from_vec(vec![s, s])).unwrap();
        assert!(dump_matrices(&rot).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(parse_matrix_dump(""), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix_dump("4 1\n1 0 0 0\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix_dump("2 x\n"), Err(Error::Parse(_))));
    }
}
