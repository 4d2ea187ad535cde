//! Spherically symmetric SO(3) connections, their curvature and the
//! zero-curvature equilibrium equations.
//!
//! The general ansatz is
//!
//! ```text
//! A_μ^i = ε_μ^{ij} (x_j/r) W + δ_μ^i V + (x_μ x^i / r²) U
//! ```
//!
//! and with `W = (K - 1)/r` the curvature splits into three independent
//! tensor structures whose coefficients are the residuals of a system of
//! three ODEs in `K, V, U`. Its general solution is generated by a single
//! profile `f(r)`:
//!
//! ```text
//! K = cos f,   V = ± sin f / r,   U = ± (r f' - sin f) / r.
//! ```
//!
//! Latin and Greek indices are identified (Euclidean vielbein).

use crate::error::{Error, Result};
use crate::profile::{ridders_derivative, ProfileFunction, RadialFunction};
use crate::so3::{bivector_matrix, bivector_to_vector, levi_civita, Mat3, Vec3};

/// Default radius of the ball around the origin where connections are not
/// evaluated.
pub const R_MIN: f64 = 1e-8;

/// Ordered index pairs `(μ, ν)` with `μ < ν`, zero-based.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Returns `|x|` or an origin-exclusion error.
pub fn checked_radius(x: &Vec3, r_min: f64) -> Result<f64> {
    let radius = x.norm();
    if !(radius >= r_min) || radius == 0.0 {
        return Err(Error::OriginExclusion { radius, r_min });
    }
    Ok(radius)
}

/// Connection in vector form at a point: entry `[(μ, i)]` is `A_μ^i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionCoefficients(pub Mat3);

impl ConnectionCoefficients {
    pub fn zero() -> Self {
        Self(Mat3::zeros())
    }

    /// Algebra vector `A_μ^k` for one spatial direction.
    pub fn algebra_vector(&self, mu: usize) -> Vec3 {
        self.0.row(mu).transpose()
    }

    /// Matrix `A_{μ i}^j = A_μ^k ε_{ki}^j`.
    pub fn bivector(&self, mu: usize) -> Mat3 {
        bivector_matrix(&self.algebra_vector(mu))
    }

    /// Algebra vector of `v^μ A_μ`.
    pub fn contract(&self, v: &Vec3) -> Vec3 {
        self.0.transpose() * v
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }
}

impl std::ops::Add for ConnectionCoefficients {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

/// Components `X_{μν}^i` of a two-form valued in the algebra, stored only for
/// `μ < ν`; the other orderings follow by antisymmetry.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PairComponents {
    data: [[f64; 3]; 3],
}

/// Curvature `F_{μν}^i`.
pub type CurvatureAtPoint = PairComponents;
/// Torsion `T_{μν}^i`.
pub type TorsionAtPoint = PairComponents;

impl PairComponents {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from a full function of `(μ, ν, i)`, reading only `μ < ν`.
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = [[0.0; 3]; 3];
        for (p, &(mu, nu)) in PAIRS.iter().enumerate() {
            for (i, slot) in data[p].iter_mut().enumerate() {
                *slot = f(mu, nu, i);
            }
        }
        Self { data }
    }

    pub fn get(&self, mu: usize, nu: usize, i: usize) -> f64 {
        match (mu, nu) {
            _ if mu == nu => 0.0,
            _ if mu < nu => self.data[pair_index(mu, nu)][i],
            _ => -self.data[pair_index(nu, mu)][i],
        }
    }

    /// The nine stored components in `PAIRS × i` order.
    pub fn components(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for p in 0..3 {
            out[3 * p..3 * p + 3].copy_from_slice(&self.data[p]);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components()
            .iter()
            .zip(other.components())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

fn pair_index(mu: usize, nu: usize) -> usize {
    match (mu, nu) {
        (0, 1) => 0,
        (0, 2) => 1,
        (1, 2) => 2,
        _ => unreachable!("pair ({mu}, {nu}) is not ordered"),
    }
}

/// Sign choice of the flat-solution family; both signs must be taken together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignBranch {
    #[default]
    Upper,
    Lower,
}

impl SignBranch {
    pub fn sign(self) -> f64 {
        match self {
            SignBranch::Upper => 1.0,
            SignBranch::Lower => -1.0,
        }
    }
}

/// The three radial functions `W, V, U` of the general ansatz.
#[derive(Debug, Clone)]
pub struct GeneralAnsatz {
    pub w: RadialFunction,
    pub v: RadialFunction,
    pub u: RadialFunction,
}

impl GeneralAnsatz {
    pub fn new(w: RadialFunction, v: RadialFunction, u: RadialFunction) -> Self {
        Self { w, v, u }
    }

    pub fn zero() -> Self {
        Self::new(RadialFunction::zero(), RadialFunction::zero(), RadialFunction::zero())
    }

    /// Substitutes `W = (K - 1)/r`, so `W' = K'/r - (K - 1)/r²`.
    pub fn from_kvu(kvu: &KvuProfiles) -> Self {
        let (k, k2) = (kvu.k.clone(), kvu.k.clone());
        let w = RadialFunction::new(
            move |r| (k.value(r) - 1.0) / r,
            move |r| k2.derivative(r) / r - (k2.value(r) - 1.0) / (r * r),
        );
        Self::new(w, kvu.v.clone(), kvu.u.clone())
    }
}

/// The functions `K, V, U` of the reduced form.
#[derive(Debug, Clone)]
pub struct KvuProfiles {
    pub k: RadialFunction,
    pub v: RadialFunction,
    pub u: RadialFunction,
}

impl KvuProfiles {
    pub fn new(k: RadialFunction, v: RadialFunction, u: RadialFunction) -> Self {
        Self { k, v, u }
    }

    /// `K ≡ 1, V = U ≡ 0`.
    pub fn vacuum() -> Self {
        Self::new(
            RadialFunction::constant(1.0),
            RadialFunction::zero(),
            RadialFunction::zero(),
        )
    }
}

/// Curvature built from the three spherically symmetric structures:
///
/// ```text
/// F_{μν}^i = c1 ε_{μνi} + c2 ε_{μνj} x_j x_i + c3 (x_μ δ_νi - x_ν δ_μi)
/// ```
fn structured_curvature(x: &Vec3, c1: f64, c2: f64, c3: f64) -> CurvatureAtPoint {
    PairComponents::from_fn(|mu, nu, i| {
        let eps_x: f64 = (0..3).map(|j| levi_civita(mu, nu, j) * x[j]).sum();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        c1 * levi_civita(mu, nu, i) + c2 * eps_x * x[i] + c3 * (x[mu] * delta(nu, i) - x[nu] * delta(mu, i))
    })
}

/// `A_μ^i = ε_μ^{ij} (x_j/r) W + δ_μ^i V + (x_μ x^i / r²) U`.
pub fn eval_general_connection(a: &GeneralAnsatz, x: &Vec3) -> Result<ConnectionCoefficients> {
    eval_general_connection_with_exclusion(a, x, R_MIN)
}

pub fn eval_general_connection_with_exclusion(
    a: &GeneralAnsatz,
    x: &Vec3,
    r_min: f64,
) -> Result<ConnectionCoefficients> {
    let r = checked_radius(x, r_min)?;
    let (w, v, u) = (a.w.value(r), a.v.value(r), a.u.value(r));
    Ok(structured_connection(x, w / r, v, u / (r * r)))
}

/// `A_μ^i = a ε_{μij} x_j + b δ_μi + c x_μ x_i`.
fn structured_connection(x: &Vec3, a: f64, b: f64, c: f64) -> ConnectionCoefficients {
    let mut m = Mat3::zeros();
    for mu in 0..3 {
        for i in 0..3 {
            let eps_x: f64 = (0..3).map(|j| levi_civita(mu, i, j) * x[j]).sum();
            m[(mu, i)] = a * eps_x + if mu == i { b } else { 0.0 } + c * x[mu] * x[i];
        }
    }
    ConnectionCoefficients(m)
}

/// Curvature of the general ansatz in terms of `W, V, U`.
pub fn eval_general_curvature(a: &GeneralAnsatz, x: &Vec3) -> Result<CurvatureAtPoint> {
    let r = checked_radius(x, R_MIN)?;
    let (w, dw) = (a.w.value(r), a.w.derivative(r));
    let (v, dv) = (a.v.value(r), a.v.derivative(r));
    let u = a.u.value(r);
    let c1 = dw + w / r + v * (v + u);
    let c2 = (w - r * dw + r * w * w - r * v * u) / (r * r * r);
    let c3 = (r * dv - u - r * w * (v + u)) / (r * r);
    Ok(structured_curvature(x, c1, c2, c3))
}

/// Curvature of the ansatz with `W = (K - 1)/r`; the three coefficients are
/// the ODE residuals divided by `r`, `r³`, `r²`.
pub fn eval_curvature_k_form(kvu: &KvuProfiles, x: &Vec3) -> Result<CurvatureAtPoint> {
    let r = checked_radius(x, R_MIN)?;
    let [rho1, rho2, rho3] = ode_residuals(kvu, r)?;
    Ok(structured_curvature(x, rho1 / r, rho2 / (r * r * r), rho3 / (r * r)))
}

/// Residuals of the equilibrium system:
///
/// ```text
/// ρ1 = K' + rV(V + U)
/// ρ2 = -K' + (K² - 1)/r - rVU
/// ρ3 = rV' - U - (K - 1)(V + U)
/// ```
pub fn ode_residuals(kvu: &KvuProfiles, r: f64) -> Result<[f64; 3]> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("ODE residuals need r > 0, got {r}")));
    }
    let (k, dk) = (kvu.k.value(r), kvu.k.derivative(r));
    let (v, dv) = (kvu.v.value(r), kvu.v.derivative(r));
    let u = kvu.u.value(r);
    Ok([
        dk + r * v * (v + u),
        -dk + (k * k - 1.0) / r - r * v * u,
        r * dv - u - (k - 1.0) * (v + u),
    ])
}

/// The flat-solution family generated by `f`.
///
/// Adding the first two equations gives `rV² + (K² - 1)/r = 0`, which has a
/// real solution only for `|K| ≤ 1`; hence `K = cos f`. The derivatives are
/// analytic in `f, f'` except `U'`, which the curvature never needs and falls
/// back to central differences.
pub fn theorem_solution(f: &ProfileFunction, branch: SignBranch) -> KvuProfiles {
    let s = branch.sign();
    let (fk, fk2, fv, fv2, fu) = (f.clone(), f.clone(), f.clone(), f.clone(), f.clone());
    let k = RadialFunction::new(move |r| fk.eval(r).cos(), move |r| -fk2.eval(r).sin() * fk2.deriv(r));
    let v = RadialFunction::new(
        move |r| s * fv.eval(r).sin() / r,
        move |r| {
            let g = fv2.eval(r);
            s * (g.cos() * fv2.deriv(r) * r - g.sin()) / (r * r)
        },
    );
    let u = RadialFunction::without_derivative(move |r| s * (r * fu.deriv(r) - fu.eval(r).sin()) / r);
    KvuProfiles::new(k, v, u)
}

/// ODE residuals of the flat-solution family with `K' = d(cos f)/dr` and
/// `V' = d(±sin f / r)/dr` taken by [`ridders_derivative`] from values of
/// `f` alone, while `U` uses the supplied `f'`. Unlike [`ode_residuals`] on
/// [`theorem_solution`], whose analytic derivatives all reuse `f'` and so
/// cancel any error in it, this route also checks that `f'` is the
/// derivative of `f`.
pub fn theorem_residuals_from_values(f: &ProfileFunction, branch: SignBranch, r: f64) -> Result<[f64; 3]> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("ODE residuals need r > 0, got {r}")));
    }
    let s = branch.sign();
    let k_of = |t: f64| f.eval(t).cos();
    let v_of = |t: f64| s * f.eval(t).sin() / t;
    let h0 = 0.1 * r.min(1.0);
    let (dk, _) = ridders_derivative(k_of, r, h0);
    let (dv, _) = ridders_derivative(v_of, r, h0);
    let (k, v) = (k_of(r), v_of(r));
    let u = s * (r * f.deriv(r) - f.eval(r).sin()) / r;
    Ok([
        dk + r * v * (v + u),
        -dk + (k * k - 1.0) / r - r * v * u,
        r * dv - u - (k - 1.0) * (v + u),
    ])
}

/// Flat connection generated by `f` (upper branch):
///
/// ```text
/// A_μ^i = ε_μ^{ij} x_j (cos f - 1)/r² + δ_μ^i sin f / r + x_μ x^i (r f' - sin f)/r³
/// ```
pub fn eval_flat_connection(f: &ProfileFunction, x: &Vec3) -> Result<ConnectionCoefficients> {
    eval_flat_connection_with_exclusion(f, x, R_MIN)
}

pub fn eval_flat_connection_with_exclusion(
    f: &ProfileFunction,
    x: &Vec3,
    r_min: f64,
) -> Result<ConnectionCoefficients> {
    let r = checked_radius(x, r_min)?;
    let (g, dg) = (f.eval(r), f.deriv(r));
    let (sin, cos) = g.sin_cos();
    Ok(structured_connection(
        x,
        (cos - 1.0) / (r * r),
        sin / r,
        (r * dg - sin) / (r * r * r),
    ))
}

/// A connection field `x ↦ A_μ^i(x)`. Implementations must be pure.
pub trait ConnectionField: Send + Sync {
    fn connection(&self, x: &Vec3) -> Result<ConnectionCoefficients>;

    /// Radius of the ball around the origin that must be avoided.
    fn exclusion_radius(&self) -> f64 {
        R_MIN
    }
}

impl<F> ConnectionField for F
where
    F: Fn(&Vec3) -> Result<ConnectionCoefficients> + Send + Sync,
{
    fn connection(&self, x: &Vec3) -> Result<ConnectionCoefficients> {
        self(x)
    }
}

/// The flat connection of a profile as a [`ConnectionField`].
#[derive(Debug, Clone)]
pub struct FlatConnection {
    pub profile: ProfileFunction,
    pub r_min: f64,
}

impl FlatConnection {
    pub fn new(profile: ProfileFunction) -> Self {
        Self { profile, r_min: R_MIN }
    }
}

impl ConnectionField for FlatConnection {
    fn connection(&self, x: &Vec3) -> Result<ConnectionCoefficients> {
        eval_flat_connection_with_exclusion(&self.profile, x, self.r_min)
    }

    fn exclusion_radius(&self) -> f64 {
        self.r_min
    }
}

/// The general ansatz as a [`ConnectionField`].
#[derive(Debug, Clone)]
pub struct GeneralConnection {
    pub ansatz: GeneralAnsatz,
    pub r_min: f64,
}

impl GeneralConnection {
    pub fn new(ansatz: GeneralAnsatz) -> Self {
        Self { ansatz, r_min: R_MIN }
    }
}

impl ConnectionField for GeneralConnection {
    fn connection(&self, x: &Vec3) -> Result<ConnectionCoefficients> {
        eval_general_connection_with_exclusion(&self.ansatz, x, self.r_min)
    }

    fn exclusion_radius(&self) -> f64 {
        self.r_min
    }
}

/// Central-difference partial derivatives `∂_μ A_ν^k`, indexed `[μ]` then
/// `[(ν, k)]`.
pub fn connection_derivatives<C: ConnectionField + ?Sized>(conn: &C, x: &Vec3, h: f64) -> Result<[Mat3; 3]> {
    let r_min = conn.exclusion_radius();
    let radius = x.norm();
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "stencil step must be positive, got {h}"
        )));
    }
    if radius - h < r_min {
        return Err(Error::StencilViolation { radius, step: h, r_min });
    }
    let mut d = [Mat3::zeros(); 3];
    for (mu, slot) in d.iter_mut().enumerate() {
        let mut e = Vec3::zeros();
        e[mu] = h;
        let plus = conn.connection(&(x + e))?;
        let minus = conn.connection(&(x - e))?;
        *slot = (plus.0 - minus.0) / (2.0 * h);
    }
    Ok(d)
}

/// Curvature from `A` and `∂A` through the matrix route
/// `F_{μν} = ∂_μ A_ν - ∂_ν A_μ - [A_μ, A_ν]`, dualized back to vector form.
pub fn curvature_bivector_route(a: &ConnectionCoefficients, da: &[Mat3; 3]) -> Result<CurvatureAtPoint> {
    let mut out = [[0.0; 3]; 3];
    for (p, &(mu, nu)) in PAIRS.iter().enumerate() {
        let d_mu_a_nu = bivector_matrix(&da[mu].row(nu).transpose());
        let d_nu_a_mu = bivector_matrix(&da[nu].row(mu).transpose());
        let (am, an) = (a.bivector(mu), a.bivector(nu));
        let f = d_mu_a_nu - d_nu_a_mu - (am * an - an * am);
        let v = bivector_to_vector(&f)?;
        out[p] = [v.x, v.y, v.z];
    }
    Ok(PairComponents::from_fn(|mu, nu, i| out[pair_index(mu, nu)][i]))
}

/// Curvature from `A` and `∂A` through the vector route
/// `F_{μνk} = ∂_μ A_{νk} - ∂_ν A_{μk} + A_μ^i A_ν^j ε_{ijk}`.
pub fn curvature_vector_route(a: &ConnectionCoefficients, da: &[Mat3; 3]) -> CurvatureAtPoint {
    PairComponents::from_fn(|mu, nu, k| {
        let (am, an) = (a.algebra_vector(mu), a.algebra_vector(nu));
        da[mu][(nu, k)] - da[nu][(mu, k)] + am.cross(&an)[k]
    })
}

/// Independent curvature oracle: central differences of step `h` on the
/// six-point stencil, assembled through the matrix route.
pub fn finite_difference_curvature<C: ConnectionField + ?Sized>(
    conn: &C,
    x: &Vec3,
    h: f64,
) -> Result<CurvatureAtPoint> {
    let da = connection_derivatives(conn, x, h)?;
    let a = conn.connection(x)?;
    curvature_bivector_route(&a, &da)
}

/// Torsion for the Euclidean vielbein `e_μ^i = δ_μ^i`:
/// `T_{μν}^i = ω_{μν}^i - ω_{νμ}^i` with `ω_{μ j}^i = A_μ^k ε_{kji}`.
pub fn torsion_flat_vielbein<C: ConnectionField + ?Sized>(conn: &C, x: &Vec3) -> Result<TorsionAtPoint> {
    checked_radius(x, conn.exclusion_radius())?;
    let a = conn.connection(x)?;
    let omega = |mu: usize, j: usize, i: usize| a.bivector(mu)[(j, i)];
    Ok(PairComponents::from_fn(|mu, nu, i| omega(mu, nu, i) - omega(nu, mu, i)))
}
