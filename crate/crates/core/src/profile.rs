//! Radial functions and the profile `f(r)` that parameterizes every
//! spherically symmetric flat connection.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative tolerance for the analytic-vs-central-difference derivative check.
pub const DERIVATIVE_TOL: f64 = 1e-6;
/// Radius at which the declared `f(∞)` is checked.
pub const FAR_FIELD_CHECK_RADIUS: f64 = 1e7;
/// Allowed deviation of `f` from its declared limits.
pub const LIMIT_TOL: f64 = 1e-6;

/// Central-difference step used when no analytic derivative is available.
#[inline]
pub fn fallback_step(r: f64) -> f64 {
    1e-6 * r.abs().max(1.0)
}

/// Derivative of `g` at `x` by Ridders' extrapolation of central
/// differences, starting from step `h0` and shrinking it by 1.4 per stage.
/// Returns the estimate and its error estimate. Every stencil stays inside
/// `[x - h0, x + h0]`.
pub fn ridders_derivative(g: impl Fn(f64) -> f64, x: f64, h0: f64) -> (f64, f64) {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const SAFE: f64 = 2.0;
    const NTAB: usize = 10;
    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = (g(x + h) - g(x - h)) / (2.0 * h);
    let (mut ans, mut err) = (a[0][0], f64::INFINITY);
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = (g(x + h) - g(x - h)) / (2.0 * h);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                ans = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    (ans, err)
}

/// A smooth function of the radius together with its derivative.
///
/// The derivative is analytic when supplied; otherwise a central difference
/// is used and [`RadialFunction::has_exact_derivative`] reports `false`.
#[derive(Clone)]
pub struct RadialFunction {
    value: ScalarFn,
    derivative: Option<ScalarFn>,
}

impl RadialFunction {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Some(Arc::new(derivative)),
        }
    }

    pub fn without_derivative(value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            derivative: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        (self.value)(r)
    }

    #[inline]
    pub fn derivative(&self, r: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(r),
            None => {
                let h = fallback_step(r);
                (self.value(r + h) - self.value(r - h)) / (2.0 * h)
            }
        }
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.derivative.is_some()
    }
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("exact_derivative", &self.has_exact_derivative())
            .finish()
    }
}

/// The profile `f(r)` (radians) with its declared limits `f(0)` and `f(∞)`.
#[derive(Clone, Debug)]
pub struct ProfileFunction {
    label: String,
    radial: RadialFunction,
    f_at_zero: f64,
    f_at_infinity: f64,
}

impl ProfileFunction {
    /// Builds a profile without validating it; see [`ProfileFunction::validate`].
    pub fn new(label: impl Into<String>, radial: RadialFunction, f_at_zero: f64, f_at_infinity: f64) -> Self {
        Self {
            label: label.into(),
            radial,
            f_at_zero,
            f_at_infinity,
        }
    }

    /// `f ≡ 0`: no disclination.
    pub fn zero() -> Self {
        Self::new("zero", RadialFunction::zero(), 0.0, 0.0)
    }

    /// `a·exp(-k r)`. `exp_decay(π/2, 1)` is the essential-singularity example.
    pub fn exp_decay(amplitude: f64, rate: f64) -> Self {
        Self::new(
            format!("exp_decay({amplitude}, {rate})"),
            RadialFunction::new(
                move |r| amplitude * (-rate * r).exp(),
                move |r| -rate * amplitude * (-rate * r).exp(),
            ),
            amplitude,
            0.0,
        )
    }

    /// `a·exp(-k r²)`.
    pub fn gauss(amplitude: f64, rate: f64) -> Self {
        Self::new(
            format!("gauss({amplitude}, {rate})"),
            RadialFunction::new(
                move |r| amplitude * (-rate * r * r).exp(),
                move |r| -2.0 * rate * r * amplitude * (-rate * r * r).exp(),
            ),
            amplitude,
            0.0,
        )
    }

    /// `a / (1 + r/s)`.
    pub fn rational(amplitude: f64, scale: f64) -> Self {
        Self::new(
            format!("rational({amplitude}, {scale})"),
            RadialFunction::new(
                move |r| amplitude / (1.0 + r / scale),
                move |r| {
                    let d = 1.0 + r / scale;
                    -amplitude / (scale * d * d)
                },
            ),
            amplitude,
            0.0,
        )
    }

    /// `π e^{-r}/2`.
    pub fn example_two() -> Self {
        Self::exp_decay(PI / 2.0, 1.0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn radial(&self) -> &RadialFunction {
        &self.radial
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        self.radial.value(r)
    }

    #[inline]
    pub fn deriv(&self, r: f64) -> f64 {
        self.radial.derivative(r)
    }

    pub fn f_at_zero(&self) -> f64 {
        self.f_at_zero
    }

    pub fn f_at_infinity(&self) -> f64 {
        self.f_at_infinity
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.radial.has_exact_derivative()
    }

    /// Same profile with the derivative multiplied by `factor`. Used to build
    /// deliberately inconsistent profiles for negative controls.
    pub fn with_scaled_derivative(&self, factor: f64) -> Self {
        let inner = self.radial.clone();
        let value = inner.clone();
        Self {
            label: format!("{}*d{}", self.label, factor),
            radial: RadialFunction::new(move |r| value.value(r), move |r| factor * inner.derivative(r)),
            f_at_zero: self.f_at_zero,
            f_at_infinity: self.f_at_infinity,
        }
    }

    fn central_difference(&self, r: f64) -> f64 {
        let h = fallback_step(r);
        (self.eval(r + h) - self.eval(r - h)) / (2.0 * h)
    }

    /// Largest relative mismatch `|f' - fd| / max(1, |f'|)` between the
    /// supplied derivative and central differences over the contract radii.
    /// Zero when no analytic derivative was given; NaN propagates.
    pub fn derivative_residual(&self) -> f64 {
        if !self.has_exact_derivative() {
            return 0.0;
        }
        sample_radii()
            .map(|r| {
                let d = self.deriv(r);
                (d - self.central_difference(r)).abs() / d.abs().max(1.0)
            })
            .fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
    }

    /// Checks the profile contract: finite values, an analytic derivative
    /// consistent with central differences, and declared limits matching
    /// `f` near the origin and at [`FAR_FIELD_CHECK_RADIUS`].
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::InvalidProfile {
            label: self.label.clone(),
            reason,
        };
        if !self.f_at_zero.is_finite() || !self.f_at_infinity.is_finite() {
            return Err(fail("declared limits must be finite".into()));
        }
        for r in sample_radii() {
            let (v, d) = (self.eval(r), self.deriv(r));
            if !v.is_finite() || !d.is_finite() {
                return Err(fail(format!("non-finite value or derivative at r = {r}")));
            }
            if self.has_exact_derivative() {
                let fd = self.central_difference(r);
                if (d - fd).abs() > DERIVATIVE_TOL * d.abs().max(1.0) {
                    return Err(fail(format!(
                        "derivative {d} disagrees with central difference {fd} at r = {r}"
                    )));
                }
            }
        }
        let near = self.eval(1e-8);
        if (near - self.f_at_zero).abs() > LIMIT_TOL {
            return Err(fail(format!(
                "f(1e-8) = {near} does not approach declared f(0) = {}",
                self.f_at_zero
            )));
        }
        let far = self.eval(FAR_FIELD_CHECK_RADIUS);
        if !((far - self.f_at_infinity).abs() < LIMIT_TOL) {
            return Err(fail(format!(
                "f({FAR_FIELD_CHECK_RADIUS:e}) = {far} does not approach declared f(inf) = {}",
                self.f_at_infinity
            )));
        }
        Ok(())
    }
}

/// Geometric sample of radii in `[0.01, 50]` used by the contract checks.
fn sample_radii() -> impl Iterator<Item = f64> {
    const N: usize = 48;
    (0..N).map(|i| 0.01 * (5000.0f64).powf(i as f64 / (N - 1) as f64))
}
