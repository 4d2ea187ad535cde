//! Director fields `n^i = n0^j S_j^i` reconstructed from the flat connection.
//!
//! The spherically symmetric frame is `S(x) = exp_so3(x̂ (f(∞) - f(r)))`,
//! the transport of `S(∞) = 1` in from infinity. All explicit component
//! formulas below use the normalized profile `g(r) = f(r) - f(∞)`; with
//! `n0 = e3` they read
//!
//! ```text
//! n1 = -(x2/r) sin g + (x1 x3/r²)(1 - cos g)
//! n2 =  (x1/r) sin g + (x2 x3/r²)(1 - cos g)
//! n3 =  cos g + (x3²/r²)(1 - cos g)
//! ```
//!
//! The field has a direction-independent limit at the origin exactly when
//! `S(0)` is the identity, i.e. when `f(0) - f(∞)` is an even multiple of π.
//! At odd multiples `S(0)` is the half-turn about `x̂` and the limit
//! `n = 2 (x̂·n0) x̂ - n0` still depends on the direction of approach.

use std::f64::consts::PI;

use crate::ansatz::{checked_radius, eval_flat_connection, R_MIN};
use crate::error::{Error, Result};
use crate::profile::ProfileFunction;
use crate::so3::{apply_rotation, exp_so3, Mat3, RotationMatrix, So3Vector, Vec3};

/// Tolerance of the `kπ` test on the declared `f(0)`.
pub const CLASSIFY_TOL: f64 = 1e-9;
/// Radius of the excluded cylinder around the nonpositive 3-axis.
pub const AXIS_EXCLUSION: f64 = 1e-8;

/// How the frame applied to `n0` is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// `n = n0 S` with the spherically symmetric `S`.
    SpherSym,
    /// `n = n0 P S`, with `P` turning `e3` into `e_r̂` first.
    Hedgehog,
}

/// Normalized profile value `f(r) - f(∞)`.
#[inline]
fn normalized(f: &ProfileFunction, r: f64) -> f64 {
    f.eval(r) - f.f_at_infinity()
}

/// Spherically symmetric frame `S(x) = exp_so3(x̂ (f(∞) - f(r)))`.
pub fn spherical_matrix(f: &ProfileFunction, x: &Vec3) -> Result<RotationMatrix> {
    let r = checked_radius(x, R_MIN)?;
    Ok(exp_so3(&So3Vector(x * (-normalized(f, r) / r))))
}

/// Closed-form components of `e3 · S(x)`.
pub fn nfield_cartesian(f: &ProfileFunction, x: &Vec3) -> Result<Vec3> {
    let r = checked_radius(x, R_MIN)?;
    let (s, c) = normalized(f, r).sin_cos();
    let (x1, x2, x3) = (x.x / r, x.y / r, x.z / r);
    Ok(Vec3::new(
        -x2 * s + x1 * x3 * (1.0 - c),
        x1 * s + x2 * x3 * (1.0 - c),
        c + x3 * x3 * (1.0 - c),
    ))
}

/// The same field in spherical coordinates, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
pub fn nfield_spherical(f: &ProfileFunction, r: f64, theta: f64, phi: f64) -> Result<Vec3> {
    if !(r >= R_MIN) {
        return Err(Error::OriginExclusion {
            radius: r,
            r_min: R_MIN,
        });
    }
    let (s, c) = normalized(f, r).sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok(Vec3::new(
        -st * sp * s + st * ct * cp * (1.0 - c),
        st * cp * s + st * ct * sp * (1.0 - c),
        c + ct * ct * (1.0 - c),
    ))
}

/// Field in the section `x2 = 0`.
pub fn plane_section_x2(f: &ProfileFunction, x1: f64, x3: f64) -> Result<Vec3> {
    let r = checked_radius(&Vec3::new(x1, 0.0, x3), R_MIN)?;
    let (s, c) = normalized(f, r).sin_cos();
    Ok(Vec3::new(
        x1 * x3 / (r * r) * (1.0 - c),
        x1 / r * s,
        c + x3 * x3 / (r * r) * (1.0 - c),
    ))
}

/// Rotation `P` written in the orthonormal spherical basis
/// `(e_r̂, e_θ̂, e_φ̂)`.
pub fn hedgehog_p(theta: f64) -> RotationMatrix {
    let (s, c) = theta.sin_cos();
    RotationMatrix::from_matrix_unchecked(Mat3::new(
        c, s, 0.0, //
        -s, c, 0.0, //
        0.0, 0.0, 1.0,
    ))
}

/// Orthonormal spherical basis at `x` as the rows `e_r̂, e_θ̂, e_φ̂` of a
/// matrix, together with `θ`.
fn spherical_basis(x: &Vec3) -> (Mat3, f64) {
    let r = x.norm();
    let theta = (x.z / r).clamp(-1.0, 1.0).acos();
    let phi = x.y.atan2(x.x);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let basis = Mat3::new(
        st * cp,
        st * sp,
        ct, //
        ct * cp,
        ct * sp,
        -st, //
        -sp,
        cp,
        0.0,
    );
    (basis, theta)
}

fn check_axis(x: &Vec3) -> Result<()> {
    let distance = x.x.hypot(x.y);
    if x.z <= 0.0 && distance < AXIS_EXCLUSION {
        return Err(Error::AxisExclusion { distance });
    }
    Ok(())
}

/// Hedgehog field `n^i = n0^k P_k^j S_j^i` with `n0 = e3`.
///
/// `n0` is expressed in the spherical basis, rotated by `P` (giving `e_r̂`),
/// converted back to Cartesian components and carried by the spherically
/// symmetric frame. Undefined on the nonpositive 3-axis, where the
/// spherical frame degenerates.
pub fn hedgehog_field(f: &ProfileFunction, x: &Vec3) -> Result<Vec3> {
    checked_radius(x, R_MIN)?;
    check_axis(x)?;
    let (basis, theta) = spherical_basis(x);
    let n0 = Vec3::z();
    let n0_spherical = basis * n0;
    let tilde_spherical = apply_rotation(&n0_spherical, &hedgehog_p(theta));
    let tilde = basis.transpose() * tilde_spherical;
    Ok(apply_rotation(&tilde, &spherical_matrix(f, x)?))
}

/// A unit vector field built from a profile and a boundary vector.
#[derive(Debug, Clone)]
pub struct DirectorField {
    pub profile: ProfileFunction,
    pub boundary: Vec3,
    pub construction: Construction,
}

impl DirectorField {
    /// Spherically symmetric frame applied to a fixed unit `n0`.
    pub fn spherical(profile: ProfileFunction, boundary: Vec3) -> Self {
        Self {
            profile,
            boundary: boundary.normalize(),
            construction: Construction::SpherSym,
        }
    }

    /// Hedgehog construction; the boundary vector is `e3`.
    pub fn hedgehog(profile: ProfileFunction) -> Self {
        Self {
            profile,
            boundary: Vec3::z(),
            construction: Construction::Hedgehog,
        }
    }

    pub fn eval(&self, x: &Vec3) -> Result<Vec3> {
        match self.construction {
            Construction::SpherSym => Ok(apply_rotation(&self.boundary, &spherical_matrix(&self.profile, x)?)),
            Construction::Hedgehog => hedgehog_field(&self.profile, x),
        }
    }
}

/// Limit direction paired with the field value approached along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalWitness {
    pub direction: Vec3,
    pub limit: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OriginClassification {
    /// `f(0) - f(∞) = kπ` with `k` even; the field extends continuously.
    Continuous { k: i64 },
    /// The limit at the origin depends on the direction; two witnesses with
    /// different limits.
    EssentialSingularity { witnesses: [DirectionalWitness; 2] },
}

/// `lim_{r→0+} n(r·d)` for `n0 = e3`, by substituting the declared `f(0)`.
pub fn directional_limit(f: &ProfileFunction, direction: &Vec3) -> Result<Vec3> {
    let norm = direction.norm();
    if !((norm - 1.0).abs() < 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, |d| = {norm}"
        )));
    }
    let d = direction;
    let (s, c) = (f.f_at_zero() - f.f_at_infinity()).sin_cos();
    Ok(Vec3::new(
        -d.y * s + d.x * d.z * (1.0 - c),
        d.x * s + d.y * d.z * (1.0 - c),
        c + d.z * d.z * (1.0 - c),
    ))
}

/// Angle between two unit vectors.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Classifies the origin for `n0 = e3` from the declared limits.
///
/// `k = round((f(0) - f(∞))/π)`. The field is continuous when the offset is
/// within [`CLASSIFY_TOL`] of `kπ` and `k` is even. Otherwise the witnesses
/// are `e3` (limit `e3`) and `e1` (limit `(0, sin g0, cos g0)`), which differ
/// by the angle `|g0|` reduced to `[0, π]`.
pub fn classify_origin(f: &ProfileFunction) -> OriginClassification {
    let g0 = f.f_at_zero() - f.f_at_infinity();
    let k = (g0 / PI).round();
    if (g0 - k * PI).abs() < CLASSIFY_TOL && (k as i64) % 2 == 0 {
        return OriginClassification::Continuous { k: k as i64 };
    }
    let witness = |d: Vec3| DirectionalWitness {
        direction: d,
        limit: directional_limit(f, &d).expect("unit direction"),
    };
    OriginClassification::EssentialSingularity {
        witnesses: [witness(Vec3::z()), witness(Vec3::x())],
    }
}

/// `∇_μ n^i = ∂_μ n^i + n^j A_{μ j}^i` with central differences of step `h`
/// for `∂n` and the flat connection of `f`. Row `μ`, column `i`.
pub fn covariant_derivative_n(f: &ProfileFunction, n0: &Vec3, x: &Vec3, h: f64) -> Result<Mat3> {
    let field = DirectorField::spherical(f.clone(), *n0);
    covariant_derivative_with(|y: &Vec3| eval_flat_connection(f, y), |y: &Vec3| field.eval(y), x, h)
}

/// Covariant derivative of an arbitrary field against an arbitrary connection.
pub fn covariant_derivative_with(
    conn: impl Fn(&Vec3) -> Result<crate::ansatz::ConnectionCoefficients>,
    field: impl Fn(&Vec3) -> Result<Vec3>,
    x: &Vec3,
    h: f64,
) -> Result<Mat3> {
    let radius = x.norm();
    if !(h > 0.0) || radius - h < R_MIN {
        return Err(Error::StencilViolation {
            radius,
            step: h,
            r_min: R_MIN,
        });
    }
    let n = field(x)?;
    let a = conn(x)?;
    let mut out = Mat3::zeros();
    for mu in 0..3 {
        let mut e = Vec3::zeros();
        e[mu] = h;
        let dn = (field(&(x + e))? - field(&(x - e))?) / (2.0 * h);
        let transported = a.bivector(mu).transpose() * n;
        out.set_row(mu, &(dn + transported).transpose());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::ConnectionCoefficients;

    fn example_two() -> ProfileFunction {
        ProfileFunction::example_two()
    }

    #[test]
    fn zero_profile_gives_identity_frame() {
        let s = spherical_matrix(&ProfileFunction::zero(), &Vec3::new(1.0, -2.0, 0.3)).unwrap();
        assert_eq!(s.matrix(), &Mat3::identity());
    }

    #[test]
    fn half_turn_where_profile_is_pi() {
        // f(r) = π/r crosses π at r = 1
        let f = ProfileFunction::new(
            "pi/r",
            crate::profile::RadialFunction::new(|r| PI / r, |r| -PI / (r * r)),
            f64::INFINITY,
            0.0,
        );
        let x = Vec3::new(0.6, 0.0, 0.8);
        let s = spherical_matrix(&f, &x).unwrap();
        let expected = x * x.transpose() * 2.0 - Mat3::identity();
        assert!((s.matrix() - expected).amax() < 1e-15);
    }

    #[test]
    fn cartesian_on_axes() {
        let f = example_two();
        let n = nfield_cartesian(&f, &Vec3::new(0.0, 0.0, 2.5)).unwrap();
        assert!((n - Vec3::z()).amax() < 1e-15);
        let g = PI * (-1.0f64).exp() / 2.0;
        let n = nfield_cartesian(&f, &Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((n - Vec3::new(0.0, g.sin(), g.cos())).amax() < 1e-15);
        let via_rotation = apply_rotation(&Vec3::z(), &spherical_matrix(&f, &Vec3::x()).unwrap());
        assert!((n - via_rotation).amax() < 1e-15);
    }

    #[test]
    fn spherical_on_axes() {
        let f = example_two();
        let n = nfield_spherical(&f, 1.3, 0.0, 2.0).unwrap();
        assert!((n - Vec3::z()).amax() < 1e-15);
        let g = f.eval(1.3);
        let n = nfield_spherical(&f, 1.3, PI / 2.0, 0.0).unwrap();
        assert!((n - Vec3::new(0.0, g.sin(), g.cos())).amax() < 1e-15);
    }

    #[test]
    fn plane_section_far_field_and_equator() {
        let f = example_two();
        let n = plane_section_x2(&f, 30.0, 40.0).unwrap();
        assert!((n - Vec3::z()).amax() < 1e-6 * PI / 2.0);
        let n = plane_section_x2(&f, 0.7, 0.0).unwrap();
        let g = f.eval(0.7);
        assert!((n - Vec3::new(0.0, g.sin(), g.cos())).amax() < 1e-15);
        assert!(n.x.hypot(n.z) < 1.0);
    }

    #[test]
    fn hedgehog_p_basics() {
        assert_eq!(hedgehog_p(0.0).matrix(), &Mat3::identity());
        for i in 0..=20 {
            let p = hedgehog_p(PI * i as f64 / 20.0);
            assert!(p.orthogonality_defect() < 1e-15);
            assert!((p.determinant() - 1.0).abs() < 1e-15);
            let theta = PI * i as f64 / 20.0;
            let n0 = Vec3::new(theta.cos(), -theta.sin(), 0.0);
            assert!((apply_rotation(&n0, &p) - Vec3::x()).amax() < 1e-15);
        }
    }

    #[test]
    fn hedgehog_is_radial() {
        let x = Vec3::new(1.0, -2.0, 0.5);
        let n = hedgehog_field(&example_two(), &x).unwrap();
        assert!((n - x.normalize()).amax() < 1e-10);
        let north = Vec3::new(1e-3, 0.0, 1.0);
        let n = hedgehog_field(&ProfileFunction::zero(), &north).unwrap();
        assert!((n - north.normalize()).amax() < 1e-12);
        assert!(matches!(
            hedgehog_field(&example_two(), &Vec3::new(0.0, 0.0, -1.0)),
            Err(Error::AxisExclusion { .. })
        ));
        assert!(hedgehog_field(&example_two(), &Vec3::new(0.0, 0.0, 1.0)).is_ok());
    }

    #[test]
    fn example_two_is_singular() {
        match classify_origin(&example_two()) {
            OriginClassification::EssentialSingularity { witnesses } => {
                assert_eq!(witnesses[0].direction, Vec3::z());
                assert!((witnesses[0].limit - Vec3::z()).amax() < 1e-15);
                assert_eq!(witnesses[1].direction, Vec3::x());
                assert!((witnesses[1].limit - Vec3::y()).amax() < 1e-15);
            }
            other => panic!("expected a singularity, got {other:?}"),
        }
    }

    #[test]
    fn zero_and_full_turn_are_continuous() {
        assert_eq!(
            classify_origin(&ProfileFunction::zero()),
            OriginClassification::Continuous { k: 0 }
        );
        assert_eq!(
            classify_origin(&ProfileFunction::exp_decay(2.0 * PI, 1.0)),
            OriginClassification::Continuous { k: 2 }
        );
    }

    #[test]
    fn half_turn_limit_depends_on_direction() {
        let f = ProfileFunction::exp_decay(PI, 1.0);
        let up = directional_limit(&f, &Vec3::z()).unwrap();
        let side = directional_limit(&f, &Vec3::x()).unwrap();
        assert!((up - Vec3::z()).amax() < 1e-15);
        assert!((side + Vec3::z()).amax() < 1e-15);
        assert!(matches!(
            classify_origin(&f),
            OriginClassification::EssentialSingularity { .. }
        ));
    }

    #[test]
    fn directional_limits_by_substitution() {
        let f = example_two();
        assert!((directional_limit(&f, &Vec3::y()).unwrap() - Vec3::new(-1.0, 0.0, 0.0)).amax() < 1e-15);
        assert!((directional_limit(&f, &Vec3::z()).unwrap() - Vec3::z()).amax() < 1e-15);
        assert!(directional_limit(&f, &Vec3::new(2.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn covariant_derivative_vanishes_for_pure_gauge() {
        let zero =
            covariant_derivative_n(&ProfileFunction::zero(), &Vec3::z(), &Vec3::new(0.9, 0.4, -1.2), 1e-5).unwrap();
        assert_eq!(zero, Mat3::zeros());
        let res = covariant_derivative_n(&example_two(), &Vec3::z(), &Vec3::new(0.9, 0.4, -1.2), 1e-5).unwrap();
        assert!(res.amax() < 1e-6, "{}", res.amax());
    }

    #[test]
    fn spurious_connection_term_is_detected() {
        let f = example_two();
        let field = DirectorField::spherical(f.clone(), Vec3::z());
        let res = covariant_derivative_with(
            |y: &Vec3| {
                let a = eval_flat_connection(&f, y)?;
                Ok(a + ConnectionCoefficients(Mat3::identity() * (0.1 / y.norm())))
            },
            |y: &Vec3| field.eval(y),
            &Vec3::new(0.9, 0.4, -1.2),
            1e-5,
        )
        .unwrap();
        assert!(res.amax() > 1e-3);
    }
}
