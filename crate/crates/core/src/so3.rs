//! Rotation group SO(3) and its Lie algebra in the index convention used
//! throughout the crate.
//!
//! Matrices are stored with the row as the first (lower) index and the column
//! as the second (upper) index, so `m[(i, j)]` is `S_i^j` and a connection
//! matrix `A_{μ i}^j` is the bivector of the algebra vector `A_μ^k`:
//!
//! ```text
//! A^{ij} = A^k ε_{kij},     A^k = ½ A^{ij} ε_{kij},     ε_{123} = 1.
//! ```
//!
//! Note that this bivector is the *transpose* of the usual hat operator
//! `[v]×`, so `exp_so3(f)` is the rotation by `|f|` about `f` acting on row
//! vectors (`n^i = n0^j S_j^i`), which equals the usual active rotation by
//! `-|f|` on column vectors.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Below this rotation angle `exp_so3` switches to the series coefficients.
pub const SMALL_ANGLE: f64 = 1e-4;
/// Orthogonality and determinant tolerance for rotation matrices.
pub const ORTHO_TOL: f64 = 1e-9;
/// Largest admissible symmetric part of a bivector.
pub const ANTISYM_TOL: f64 = 1e-9;

/// Levi-Civita symbol on zero-based indices.
#[inline]
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    let (i, j, k) = (i as i32, j as i32, k as i32);
    ((j - i) * (k - i) * (k - j)) as f64 / 2.0
}

/// Algebra element `f`: direction is the rotation axis, length the angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3Vector(pub Vec3);

impl So3Vector {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self(Vec3::new(x1, x2, x3))
    }

    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        Self(axis.normalize() * angle)
    }

    pub fn zero() -> Self {
        Self(Vec3::zeros())
    }

    /// Rotation angle `F = |f|`.
    pub fn angle(&self) -> f64 {
        self.0.norm()
    }

    pub fn vector(&self) -> &Vec3 {
        &self.0
    }
}

impl std::ops::Neg for So3Vector {
    type Output = So3Vector;
    fn neg(self) -> So3Vector {
        So3Vector(-self.0)
    }
}

/// Antisymmetric 3×3 matrix `A^{ij}`. Antisymmetry is exact: the lower
/// triangle is always the negated upper triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bivector3(Mat3);

impl Bivector3 {
    /// Accepts `m` if its symmetric part is within [`ANTISYM_TOL`] and
    /// stores the exact antisymmetric part.
    pub fn try_from_matrix(m: &Mat3) -> Result<Self> {
        Self::try_from_matrix_with_tolerance(m, ANTISYM_TOL)
    }

    pub fn try_from_matrix_with_tolerance(m: &Mat3, tolerance: f64) -> Result<Self> {
        let sym = (m + m.transpose()) * 0.5;
        let norm = sym.norm();
        if !(norm <= tolerance) {
            return Err(Error::NotAntisymmetric { norm, tolerance });
        }
        Ok(Self((m - m.transpose()) * 0.5))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn to_vector(&self) -> Vec3 {
        let m = &self.0;
        Vec3::new(m[(1, 2)], m[(2, 0)], m[(0, 1)])
    }
}

/// `A^{ij} = v_k ε_{kij}`.
pub fn vector_to_bivector(v: &Vec3) -> Bivector3 {
    Bivector3(Mat3::new(
        0.0, v.z, -v.y, //
        -v.z, 0.0, v.x, //
        v.y, -v.x, 0.0,
    ))
}

/// Raw matrix form of [`vector_to_bivector`].
#[inline]
pub fn bivector_matrix(v: &Vec3) -> Mat3 {
    *vector_to_bivector(v).matrix()
}

/// `A^k = ½ A^{ij} ε_{kij}`; rejects matrices with a symmetric part above
/// [`ANTISYM_TOL`].
pub fn bivector_to_vector(m: &Mat3) -> Result<Vec3> {
    bivector_to_vector_with_tolerance(m, ANTISYM_TOL)
}

pub fn bivector_to_vector_with_tolerance(m: &Mat3, tolerance: f64) -> Result<Vec3> {
    Ok(Bivector3::try_from_matrix_with_tolerance(m, tolerance)?.to_vector())
}

/// Element of SO(3), row index = source index (`S_i^j`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Mat3);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Checks orthogonality and `det = +1` within [`ORTHO_TOL`].
    pub fn try_from_matrix(m: Mat3) -> Result<Self> {
        let orthogonality = orthogonality_defect(&m);
        let det = m.determinant();
        if !(orthogonality <= ORTHO_TOL) || !((det - 1.0).abs() <= ORTHO_TOL) {
            return Err(Error::NotRotation { orthogonality, det });
        }
        Ok(Self(m))
    }

    /// Wraps `m` without checking; for matrices that are rotations by
    /// construction.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Self(m)
    }

    /// Nearest rotation in the Frobenius norm (symmetric orthogonalization
    /// `m (mᵀm)^{-1/2}`).
    pub fn project(m: &Mat3) -> Self {
        Self(project_to_so3(m))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &RotationMatrix) -> Self {
        Self(self.0 * other.0)
    }

    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.0)
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn frobenius_distance(&self, other: &RotationMatrix) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// Max entry of `|mᵀm - 1|`.
pub fn orthogonality_defect(m: &Mat3) -> f64 {
    (m.transpose() * m - Mat3::identity()).amax()
}

pub(crate) fn project_to_so3(m: &Mat3) -> Mat3 {
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        // reflect across the weakest singular direction
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
        let mut u = u;
        u.column_mut(imin).neg_mut();
        r = u * v_t;
    }
    r
}

/// Exponential map `S_i^j = exp(f^k ε_{ki}^j)`:
///
/// ```text
/// S = 1 cos F + ε·f sin F / F + f fᵀ (1 - cos F) / F²,   F = |f|
/// ```
pub fn exp_so3(f: &So3Vector) -> RotationMatrix {
    exp_so3_with_angle(&f.0, f.angle())
}

/// Exponential map with an explicitly supplied `F`. Only `F²` is fixed by
/// `f`, and the formula is unchanged under `F → -F`, so either root may be
/// passed.
pub fn exp_so3_with_angle(f: &Vec3, angle: f64) -> RotationMatrix {
    let theta2 = angle * angle;
    let (sin_coeff, cos_coeff) = if angle.abs() < SMALL_ANGLE {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        let half = (0.5 * angle).sin();
        (angle.sin() / angle, 2.0 * half * half / theta2)
    };
    let m = Mat3::identity() * angle.cos() + bivector_matrix(f) * sin_coeff + f * f.transpose() * cos_coeff;
    RotationMatrix(m)
}

/// Principal logarithm, angle in `[0, π]`. Inverse of [`exp_so3`].
pub fn log_so3(s: &RotationMatrix) -> Result<So3Vector> {
    let m = RotationMatrix::try_from_matrix(s.0)?.0;
    // vee of the antisymmetric part: sin F · axis
    let anti = Bivector3((m - m.transpose()) * 0.5).to_vector();
    let sin_f = anti.norm();
    let cos_f = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let angle = sin_f.atan2(cos_f);

    if angle < SMALL_ANGLE {
        return Ok(So3Vector(anti / (1.0 - angle * angle / 6.0)));
    }
    if cos_f > -0.99 {
        return Ok(So3Vector(anti * (angle / sin_f)));
    }

    // near F = π: axis from the symmetric part f fᵀ ∝ (S + Sᵀ)/2 - cos F
    let sym = (m + m.transpose()) * 0.5 - Mat3::identity() * cos_f;
    let col = (0..3).max_by(|&a, &b| sym[(a, a)].total_cmp(&sym[(b, b)])).unwrap_or(0);
    let mut axis: Vec3 = sym.column(col).into_owned();
    axis /= axis.norm();
    if axis.dot(&anti) < 0.0 {
        axis = -axis;
    }
    Ok(So3Vector(axis * angle))
}

/// `n^i = n0^j S_j^i`; the row index of `S` is the source index.
pub fn apply_rotation(n0: &Vec3, s: &RotationMatrix) -> Vec3 {
    s.0.transpose() * n0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Sign of a permutation of (0,1,2) by counting inversions.
    fn permutation_sign(p: [usize; 3]) -> f64 {
        if p[0] == p[1] || p[1] == p[2] || p[0] == p[2] {
            return 0.0;
        }
        let mut inv = 0;
        for a in 0..3 {
            for b in a + 1..3 {
                if p[a] > p[b] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn series_exp(m: &Mat3, terms: usize) -> Mat3 {
        let mut sum = Mat3::identity();
        let mut term = Mat3::identity();
        for n in 1..terms {
            term = term * m / n as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn levi_civita_matches_permutation_sign() {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(levi_civita(i, j, k), permutation_sign([i, j, k]));
                }
            }
        }
    }

    #[test]
    fn bivector_matches_epsilon_contraction() {
        let v = Vec3::new(0.0, 0.0, 1.0);
        let b = vector_to_bivector(&v);
        for i in 0..3 {
            for j in 0..3 {
                let expected: f64 = (0..3).map(|k| v[k] * permutation_sign([k, i, j])).sum();
                assert_eq!(b.matrix()[(i, j)], expected);
            }
        }
        assert_eq!(b.matrix()[(0, 1)], 1.0);
        assert_eq!(b.matrix()[(1, 0)], -1.0);
        assert_eq!(vector_to_bivector(&Vec3::zeros()).matrix(), &Mat3::zeros());
    }

    #[test]
    fn duality_round_trip() {
        let v = Vec3::new(0.3, -1.2, 2.0);
        assert_eq!(bivector_to_vector(vector_to_bivector(&v).matrix()).unwrap(), v);
        let w = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(bivector_to_vector(&bivector_matrix(&w)).unwrap(), w);
        assert_eq!(bivector_to_vector(&Mat3::zeros()).unwrap(), Vec3::zeros());
    }

    #[test]
    fn symmetric_perturbation_rejected() {
        let mut m = bivector_matrix(&Vec3::new(1.0, 2.0, 3.0));
        m[(0, 1)] += 1e-3;
        m[(1, 0)] += 1e-3;
        assert!(matches!(bivector_to_vector(&m), Err(Error::NotAntisymmetric { .. })));
    }

    #[test]
    fn exp_at_zero_is_identity() {
        assert_eq!(exp_so3(&So3Vector::zero()).matrix(), &Mat3::identity());
    }

    #[test]
    fn quarter_turn_matches_power_series() {
        let f = Vec3::new(0.0, 0.0, PI / 2.0);
        let oracle = series_exp(&bivector_matrix(&f), 30);
        let s = exp_so3(&So3Vector(f));
        assert!((s.matrix() - oracle).amax() < 1e-12);
        // row-vector action: e1 -> e2 for a positive quarter turn about e3
        let n = apply_rotation(&Vec3::x(), &s);
        assert!((n - Vec3::y()).amax() < 1e-15);
    }

    #[test]
    fn full_turn_is_identity() {
        let s = exp_so3(&So3Vector::new(0.0, 0.0, 2.0 * PI));
        assert!((s.matrix() - Mat3::identity()).amax() < 1e-12);
    }

    #[test]
    fn branch_seam_is_continuous() {
        let axis = Vec3::new(0.3, -0.5, 0.8).normalize();
        let f = axis * SMALL_ANGLE;
        let generic = {
            let a = SMALL_ANGLE;
            Mat3::identity() * a.cos()
                + bivector_matrix(&f) * (a.sin() / a)
                + f * f.transpose() * ((1.0 - a.cos()) / (a * a))
        };
        let series = {
            let a2 = SMALL_ANGLE * SMALL_ANGLE;
            Mat3::identity() * SMALL_ANGLE.cos()
                + bivector_matrix(&f) * (1.0 - a2 / 6.0)
                + f * f.transpose() * (0.5 - a2 / 24.0)
        };
        assert!((generic - series).amax() < 1e-13);
        let just_below = exp_so3(&So3Vector(axis * (SMALL_ANGLE * (1.0 - 1e-12))));
        let at = exp_so3(&So3Vector(f));
        assert!((just_below.matrix() - at.matrix()).amax() < 1e-13);
    }

    #[test]
    fn formula_invariant_under_angle_sign() {
        let f = Vec3::new(0.4, -1.1, 0.7);
        let pos = exp_so3_with_angle(&f, f.norm());
        let neg = exp_so3_with_angle(&f, -f.norm());
        assert!((pos.matrix() - neg.matrix()).amax() < 1e-15);
    }

    #[test]
    fn log_identity_is_zero() {
        assert_eq!(log_so3(&RotationMatrix::identity()).unwrap().0, Vec3::zeros());
    }

    #[test]
    fn log_round_trip() {
        let f = So3Vector::new(0.1, -0.2, 0.3);
        let back = log_so3(&exp_so3(&f)).unwrap();
        assert!((back.0 - f.0).amax() < 1e-10);
    }

    #[test]
    fn log_at_pi() {
        let s = RotationMatrix::try_from_matrix(Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0))).unwrap();
        let f = log_so3(&s).unwrap();
        assert!((f.angle() - PI).abs() < 1e-12);
        assert!((f.0.normalize().x.abs() - 1.0).abs() < 1e-12);
        assert!((exp_so3(&f).matrix() - s.matrix()).amax() < ORTHO_TOL);
    }

    #[test]
    fn log_rejects_non_orthogonal() {
        let m = Mat3::identity() * 1.01;
        assert!(matches!(
            log_so3(&RotationMatrix::from_matrix_unchecked(m)),
            Err(Error::NotRotation { .. })
        ));
    }

    #[test]
    fn apply_rotation_quarter_turn_about_e1() {
        let s = exp_so3(&So3Vector::new(PI / 2.0, 0.0, 0.0));
        let oracle = series_exp(&bivector_matrix(&Vec3::new(PI / 2.0, 0.0, 0.0)), 30);
        let n0 = Vec3::new(0.0, 0.0, 1.0);
        let expected = oracle.transpose() * n0;
        let n = apply_rotation(&n0, &s);
        assert!((n - expected).amax() < 1e-12);
        assert!((n - Vec3::new(0.0, -1.0, 0.0)).amax() < 1e-12);
        assert_eq!(apply_rotation(&n0, &RotationMatrix::identity()), n0);
    }

    #[test]
    fn projection_recovers_rotation() {
        let s = exp_so3(&So3Vector::new(0.5, 0.2, -0.9));
        let noisy = s.matrix() + Mat3::new(1e-6, 0.0, 2e-6, 0.0, -1e-6, 0.0, 3e-7, 0.0, 0.0);
        let p = RotationMatrix::project(&noisy);
        assert!(p.orthogonality_defect() < 1e-14);
        assert!((p.determinant() - 1.0).abs() < 1e-14);
        assert!((p.matrix() - s.matrix()).amax() < 1e-5);
    }
}
