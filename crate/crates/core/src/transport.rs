//! Parallel transport of the SO(3) frame.
//!
//! Along a curve `y(t)` the inverse frame matrix obeys the linear ODE
//!
//! ```text
//! d/dt S⁻¹ = ẏ^μ A_μ S⁻¹,      A_μ = (A_{μ i}^j)
//! ```
//!
//! whose solution is a path-ordered exponential. Transport always runs from
//! the start of a curve (`t = 0`, where `S⁻¹ = S0⁻¹`) to its end (`t = 1`).
//! On radial rays the integrands commute and the ordered exponential is the
//! ordinary one, which gives the closed form
//!
//! ```text
//! S⁻¹(x) = exp(-f^k ε_k),    f^k = (x^k/r) (f(∞) - f(r)).
//! ```

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{checked_radius, ConnectionField, FlatConnection, R_MIN};
use crate::error::{Error, Result};
use crate::profile::ProfileFunction;
use crate::so3::{bivector_matrix, exp_so3, project_to_so3, Mat3, RotationMatrix, So3Vector, Vec3};

/// Target error of [`integrate_transport`].
pub const TRANSPORT_TOL: f64 = 1e-9;
/// Largest step count tried per curve piece.
pub const MAX_STEPS: usize = 1 << 20;
/// Truncation radius for rays that start at infinity.
pub const R_FAR: f64 = 50.0;

const INITIAL_STEPS: usize = 16;

/// A smooth curve piece `t ∈ [0, 1] ↦ (y(t), ẏ(t))`.
pub type CurveSampler = Arc<dyn Fn(f64) -> (Vec3, Vec3) + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// Radial segment from `r_far · x/|x|` in to `x`.
    Ray {
        to: Vec3,
        r_far: f64,
    },
    Polyline(Vec<Vec3>),
    Parametric,
}

/// A piecewise-smooth curve. Each piece is integrated separately so that
/// kinks of polylines never fall inside a Runge–Kutta step.
#[derive(Clone)]
pub struct Curve {
    pieces: Vec<CurveSampler>,
    kind: CurveKind,
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Curve")
            .field("kind", &self.kind)
            .field("pieces", &self.pieces.len())
            .finish()
    }
}

fn segment_sampler(a: Vec3, b: Vec3) -> CurveSampler {
    let d = b - a;
    Arc::new(move |t| (a + d * t, d))
}

/// Distance from the origin to the segment `[a, b]`.
fn segment_distance_to_origin(a: &Vec3, b: &Vec3) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-a.dot(&d) / len2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

impl Curve {
    /// Radial segment from `r_far · x̂` to `x`.
    pub fn ray_from_far(x: &Vec3, r_far: f64) -> Result<Self> {
        let r = checked_radius(x, R_MIN)?;
        if !(r_far > r) {
            return Err(Error::InvalidCurve(format!(
                "ray truncation radius {r_far} must exceed |x| = {r}"
            )));
        }
        let start = x * (r_far / r);
        Ok(Self {
            pieces: vec![segment_sampler(start, *x)],
            kind: CurveKind::Ray { to: *x, r_far },
        })
    }

    pub fn segment(a: Vec3, b: Vec3) -> Self {
        Self::polyline(vec![a, b]).expect("two vertices")
    }

    pub fn polyline(vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidCurve("a polyline needs at least two vertices".into()));
        }
        let pieces = vertices.windows(2).map(|w| segment_sampler(w[0], w[1])).collect();
        Ok(Self {
            pieces,
            kind: CurveKind::Polyline(vertices),
        })
    }

    /// A single smooth piece given by position and velocity on `[0, 1]`.
    pub fn parametric(sampler: impl Fn(f64) -> (Vec3, Vec3) + Send + Sync + 'static) -> Self {
        Self {
            pieces: vec![Arc::new(sampler)],
            kind: CurveKind::Parametric,
        }
    }

    /// Arc between two points: the direction moves along the great circle
    /// and the radius is interpolated linearly.
    pub fn arc(from: Vec3, to: Vec3) -> Result<Self> {
        let (ra, rb) = (checked_radius(&from, R_MIN)?, checked_radius(&to, R_MIN)?);
        let (ua, ub) = (from / ra, to / rb);
        let omega = ua.dot(&ub).clamp(-1.0, 1.0).acos();
        if omega > std::f64::consts::PI - 1e-9 {
            return Err(Error::InvalidCurve("arc endpoints are antipodal".into()));
        }
        if omega < 1e-12 {
            return Ok(Self::segment(from, to));
        }
        // orthonormal tangent direction in the plane of ua, ub
        let w = (ub - ua * ua.dot(&ub)).normalize();
        Ok(Self::parametric(move |t| {
            let (s, c) = (omega * t).sin_cos();
            let dir = ua * c + w * s;
            let ddir = (w * c - ua * s) * omega;
            let rad = ra + (rb - ra) * t;
            (dir * rad, ddir * rad + dir * (rb - ra))
        }))
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Position at the global parameter `t ∈ [0, 1]` (pieces share the
    /// parameter range evenly).
    pub fn point(&self, t: f64) -> Vec3 {
        let (piece, local) = self.locate(t);
        (self.pieces[piece])(local).0
    }

    /// Velocity with respect to the global parameter.
    pub fn velocity(&self, t: f64) -> Vec3 {
        let (piece, local) = self.locate(t);
        (self.pieces[piece])(local).1 * self.pieces.len() as f64
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.pieces.len();
        let scaled = t.clamp(0.0, 1.0) * n as f64;
        let piece = (scaled.floor() as usize).min(n - 1);
        (piece, scaled - piece as f64)
    }

    pub fn start(&self) -> Vec3 {
        (self.pieces[0])(0.0).0
    }

    pub fn end(&self) -> Vec3 {
        (self.pieces[self.pieces.len() - 1])(1.0).0
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| {
                let p = p.clone();
                Arc::new(move |t: f64| {
                    let (y, v) = p(1.0 - t);
                    (y, -v)
                }) as CurveSampler
            })
            .collect();
        let kind = match &self.kind {
            CurveKind::Polyline(v) => CurveKind::Polyline(v.iter().rev().copied().collect()),
            _ => CurveKind::Parametric,
        };
        Self { pieces, kind }
    }

    /// Checks that the curve stays outside the ball of radius `r_excl` and
    /// that each velocity matches a central difference of the position at
    /// five parameters (relative tolerance 1e-6).
    pub fn validate(&self, r_excl: f64) -> Result<()> {
        if let CurveKind::Polyline(v) = &self.kind {
            for w in v.windows(2) {
                let d = segment_distance_to_origin(&w[0], &w[1]);
                if d < r_excl {
                    return Err(Error::InvalidCurve(format!(
                        "segment passes within {d:e} of the origin (exclusion {r_excl:e})"
                    )));
                }
            }
        }
        for (k, piece) in self.pieces.iter().enumerate() {
            for i in 0..=256 {
                let y = piece(i as f64 / 256.0).0;
                if !y.iter().all(|c| c.is_finite()) || y.norm() < r_excl {
                    return Err(Error::InvalidCurve(format!(
                        "piece {k} enters the exclusion ball at t = {}",
                        i as f64 / 256.0
                    )));
                }
            }
            let h = 1e-6;
            for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let fd = (piece(t + h).0 - piece(t - h).0) / (2.0 * h);
                let v = piece(t).1;
                if (fd - v).norm() > 1e-6 * v.norm().max(1.0) {
                    return Err(Error::InvalidCurve(format!(
                        "velocity of piece {k} inconsistent with position at t = {t}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Step-doubling controls for [`integrate_transport`].
#[derive(Debug, Clone, Copy)]
pub struct TransportOptions {
    pub tolerance: f64,
    pub max_steps: usize,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self {
            tolerance: TRANSPORT_TOL,
            max_steps: MAX_STEPS,
        }
    }
}

/// Outcome of a transport integration.
#[derive(Debug, Clone, Copy)]
pub struct TransportResult {
    /// Transported `S⁻¹` at the end of the curve.
    pub s_inv: RotationMatrix,
    /// Total number of RK4 steps in the accepted (finest) runs.
    pub steps: usize,
    /// Sum over pieces of the step-doubling estimate `|S_2N - S_N| / 15`.
    pub error_estimate: f64,
    /// Largest Frobenius correction applied by the per-step projection.
    pub max_projection: f64,
}

/// Generator `ẏ^μ A_{μ i}^j` at one point of the curve.
fn generator<C: ConnectionField + ?Sized>(conn: &C, piece: &CurveSampler, t: f64) -> Result<Mat3> {
    let (y, v) = piece(t);
    Ok(bivector_matrix(&conn.connection(&y)?.contract(&v)))
}

/// `steps` classical RK4 steps on `[0, 1]`, projecting back to SO(3) after each.
fn rk4_run<C: ConnectionField + ?Sized>(
    conn: &C,
    piece: &CurveSampler,
    start: &Mat3,
    steps: usize,
) -> Result<(Mat3, f64)> {
    let h = 1.0 / steps as f64;
    let mut s = *start;
    let mut max_proj: f64 = 0.0;
    let mut g0 = generator(conn, piece, 0.0)?;
    for n in 0..steps {
        let t = n as f64 * h;
        let g_mid = generator(conn, piece, t + 0.5 * h)?;
        let g1 = generator(conn, piece, t + h)?;
        let k1 = g0 * s;
        let k2 = g_mid * (s + k1 * (0.5 * h));
        let k3 = g_mid * (s + k2 * (0.5 * h));
        let k4 = g1 * (s + k3 * h);
        let next = s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let projected = project_to_so3(&next);
        max_proj = max_proj.max((projected - next).norm());
        s = projected;
        g0 = g1;
    }
    Ok((s, max_proj))
}

/// Solves `d/dt S⁻¹ = ẏ^μ A_μ S⁻¹` from the start of `curve` (where
/// `S⁻¹ = s0_inv`) to its end.
///
/// Each piece is integrated with RK4 at `N` and `2N` steps, doubling `N`
/// until the Richardson estimate `|S_2N - S_N| / 15` meets the per-piece
/// share of the tolerance. The accepted value is the extrapolated
/// `S_2N + (S_2N - S_N)/15` projected onto SO(3).
pub fn integrate_transport<C: ConnectionField + ?Sized>(
    conn: &C,
    curve: &Curve,
    s0_inv: &RotationMatrix,
    options: &TransportOptions,
) -> Result<TransportResult> {
    curve.validate(conn.exclusion_radius())?;
    let piece_tol = options.tolerance / curve.pieces.len() as f64;
    let mut s = *s0_inv.matrix();
    let mut steps = 0;
    let mut error_estimate = 0.0;
    let mut max_projection: f64 = 0.0;

    for piece in &curve.pieces {
        let mut n = INITIAL_STEPS;
        let (mut coarse, mut proj) = rk4_run(conn, piece, &s, n)?;
        loop {
            let (fine, fine_proj) = rk4_run(conn, piece, &s, 2 * n)?;
            let estimate = (fine - coarse).norm() / 15.0;
            max_projection = max_projection.max(proj).max(fine_proj);
            if estimate <= piece_tol {
                s = project_to_so3(&(fine + (fine - coarse) / 15.0));
                steps += 2 * n;
                error_estimate += estimate;
                break;
            }
            n *= 2;
            if 2 * n > options.max_steps {
                return Err(Error::IntegrationFailure {
                    estimate: error_estimate + estimate,
                    tolerance: options.tolerance,
                    steps: steps + n,
                });
            }
            coarse = fine;
            proj = fine_proj;
        }
    }

    Ok(TransportResult {
        s_inv: RotationMatrix::from_matrix_unchecked(s),
        steps,
        error_estimate,
        max_projection,
    })
}

/// Algebra vector `f^k = (x^k/r)(f(∞) - f(r))` of the radial closed form.
pub fn radial_algebra_vector(f: &ProfileFunction, x: &Vec3) -> Result<So3Vector> {
    let r = checked_radius(x, R_MIN)?;
    Ok(So3Vector(x * ((f.f_at_infinity() - f.eval(r)) / r)))
}

/// Closed-form frame `S(x)` obtained by transport in from infinity with
/// `S(∞) = 1`: `S = exp_so3(f)`, `S⁻¹ = exp_so3(-f)`. For `f(∞) = 0` this is
/// the rotation by `f(r)` about `x̂` acting on column vectors.
pub fn radial_transport_closed_form(f: &ProfileFunction, x: &Vec3) -> Result<RotationMatrix> {
    let alg = radial_algebra_vector(f, x)?;
    Ok(exp_so3(&-alg).inverse())
}

/// Transports from infinity to `x` along the ray through `x`: the segment
/// `[r_far, |x|]` is integrated numerically and the tail beyond `r_far`
/// enters through the closed-form `S⁻¹(r_far x̂)`.
pub fn transport_from_infinity(
    f: &ProfileFunction,
    x: &Vec3,
    r_far: f64,
    options: &TransportOptions,
) -> Result<TransportResult> {
    let curve = Curve::ray_from_far(x, r_far)?;
    let tail = radial_transport_closed_form(f, &curve.start())?.inverse();
    integrate_transport(&FlatConnection::new(f.clone()), &curve, &tail, options)
}

/// Frobenius norm of `[ẏ·A(y(s)), ẏ·A(y(t))]` maximized over `samples`
/// random parameter pairs of `curve`.
pub fn max_commutator_along<C: ConnectionField + ?Sized>(
    conn: &C,
    curve: &Curve,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen_at = |t: f64| -> Result<Mat3> {
        let (y, v) = (curve.point(t), curve.velocity(t));
        Ok(bivector_matrix(&conn.connection(&y)?.contract(&v)))
    };
    let mut max: f64 = 0.0;
    for _ in 0..samples {
        let (s, t): (f64, f64) = (rng.gen(), rng.gen());
        let (a, b) = (gen_at(s)?, gen_at(t)?);
        max = max.max((a * b - b * a).norm());
    }
    Ok(max)
}

/// Commutator check on the ray through `x` for the flat connection of `f`:
/// parameters `y = x·t` with `|y| ∈ [0.05, R_FAR]`.
pub fn verify_ray_commutativity(f: &ProfileFunction, x: &Vec3, samples: usize, seed: u64) -> Result<f64> {
    let r = checked_radius(x, R_MIN)?;
    let (a, b) = (0.05 / r, R_FAR / r);
    let dir = *x;
    let ray = Curve::parametric(move |t| (dir * (a + (b - a) * t), dir * (b - a)));
    max_commutator_along(&FlatConnection::new(f.clone()), &ray, samples, seed)
}
