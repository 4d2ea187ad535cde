use crate::error::{CliError, CliResult};
use crate::expr::Expr;
use crate::format::ser_sci;
use disclination_core::{ProfileFunction, RadialFunction};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    Zero,
    ExpDecay {
        #[serde(serialize_with = "ser_sci")]
        amplitude: f64,
        #[serde(serialize_with = "ser_sci")]
        rate: f64,
    },
    Gauss {
        #[serde(serialize_with = "ser_sci")]
        amplitude: f64,
        #[serde(serialize_with = "ser_sci")]
        rate: f64,
    },
    Rational {
        #[serde(serialize_with = "ser_sci")]
        amplitude: f64,
        #[serde(serialize_with = "ser_sci")]
        scale: f64,
    },
    /// Expression in `r`; `f(0)` is its value at 0, `f(∞)` is declared.
    Custom {
        expression: String,
        #[serde(serialize_with = "ser_sci")]
        f_infinity: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSpec {
    #[serde(flatten)]
    pub kind: ProfileKind,
    pub label: String,
}

impl ProfileSpec {
    pub fn new(kind: ProfileKind) -> Self {
        let label = match &kind {
            ProfileKind::Zero => "zero".to_string(),
            ProfileKind::ExpDecay { amplitude, rate } => format!("exp_decay({amplitude}, {rate})"),
            ProfileKind::Gauss { amplitude, rate } => format!("gauss({amplitude}, {rate})"),
            ProfileKind::Rational { amplitude, scale } => format!("rational({amplitude}, {scale})"),
            ProfileKind::Custom { expression, .. } => format!("custom({expression})"),
        };
        Self { kind, label }
    }

    /// The paper's example two, `π e^{-r} / 2`.
    pub fn example_two() -> Self {
        Self::new(ProfileKind::ExpDecay {
            amplitude: std::f64::consts::FRAC_PI_2,
            rate: 1.0,
        })
    }

    /// Builds the profile and checks its contract.
    pub fn build(&self) -> CliResult<ProfileFunction> {
        let f = self.build_unchecked()?;
        f.validate()?;
        Ok(f)
    }

    /// Builds the profile without the contract check.
    pub fn build_unchecked(&self) -> CliResult<ProfileFunction> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Usage(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Usage(format!("{name} must be finite, got {v}")))
            }
        };
        let f = match &self.kind {
            ProfileKind::Zero => ProfileFunction::zero(),
            ProfileKind::ExpDecay { amplitude, rate } => {
                ProfileFunction::exp_decay(finite("amplitude", *amplitude)?, positive("rate", *rate)?)
            }
            ProfileKind::Gauss { amplitude, rate } => {
                ProfileFunction::gauss(finite("amplitude", *amplitude)?, positive("rate", *rate)?)
            }
            ProfileKind::Rational { amplitude, scale } => {
                ProfileFunction::rational(finite("amplitude", *amplitude)?, positive("scale", *scale)?)
            }
            ProfileKind::Custom { expression, f_infinity } => {
                let e = Expr::parse(expression)?;
                let d = e.derivative();
                let f0 = e.eval(0.0);
                if !f0.is_finite() {
                    return Err(CliError::Usage(format!("`{expression}` is not finite at r = 0")));
                }
                ProfileFunction::new(
                    self.label.clone(),
                    RadialFunction::new(move |r| e.eval(r), move |r| d.eval(r)),
                    f0,
                    finite("f_infinity", *f_infinity)?,
                )
            }
        };
        Ok(f)
    }
}
