//! The `transport` report: integrated frame against the closed form.

use crate::error::{CliError, CliResult};
use crate::format::{mat3, ser_sci, vec3, Sci};
use disclination_core::ansatz::{FlatConnection, R_MIN};
use disclination_core::transport::{
    integrate_transport, radial_transport_closed_form, transport_from_infinity, Curve, TransportOptions, R_FAR,
};
use disclination_core::{ProfileFunction, Vec3};
use serde::Serialize;

/// Frobenius tolerance against the closed form.
pub const ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    /// From `R_FAR` along the ray to `from`; the tail beyond `R_FAR` is exact.
    Ray,
    /// `from`, then these vertices in order.
    Polyline(Vec<Vec3>),
    /// Great-circle arc from `from` to the given point, radius linear.
    Arc(Vec3),
}

#[derive(Debug, Clone, Serialize)]
pub struct PathJson {
    pub kind: &'static str,
    pub vertices: Vec<[Sci; 3]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportReport {
    pub profile: String,
    pub path: PathJson,
    /// Integrated frame `S` at the end point.
    pub s_integrated: [[Sci; 3]; 3],
    /// `S` from the closed form at the end point.
    pub s_closed_form: [[Sci; 3]; 3],
    #[serde(serialize_with = "ser_sci")]
    pub frobenius_diff: f64,
    #[serde(serialize_with = "ser_sci")]
    pub error_estimate: f64,
    pub steps: usize,
    #[serde(serialize_with = "ser_sci")]
    pub tolerance: f64,
    pub pass: bool,
}

/// Transports the frame along the path. Non-ray paths start from the
/// closed-form frame at `from`, i.e. they continue the transport in from
/// infinity, so the end frame is comparable with the closed form there.
pub fn run_transport(profile: &ProfileFunction, from: Vec3, path: &PathSpec) -> CliResult<TransportReport> {
    let opts = TransportOptions::default();
    let (kind, vertices, end, result) = match path {
        PathSpec::Ray => {
            let res = transport_from_infinity(profile, &from, R_FAR, &opts)?;
            ("ray", vec![from * (R_FAR / from.norm()), from], from, res)
        }
        PathSpec::Polyline(rest) if rest.is_empty() => {
            return Err(CliError::Usage(
                "polyline needs at least one vertex after --from".into(),
            ));
        }
        PathSpec::Polyline(rest) => {
            let mut v = vec![from];
            v.extend(rest.iter().copied());
            let curve = Curve::polyline(v.clone())?;
            let res = run_curve(profile, &curve, &opts)?;
            ("polyline", v.clone(), *v.last().unwrap(), res)
        }
        PathSpec::Arc(to) => {
            let curve = Curve::arc(from, *to)?;
            let res = run_curve(profile, &curve, &opts)?;
            ("arc", vec![from, *to], *to, res)
        }
    };
    let s = result.s_inv.inverse();
    let closed = radial_transport_closed_form(profile, &end)?;
    let diff = s.frobenius_distance(&closed);
    Ok(TransportReport {
        profile: profile.label().to_string(),
        path: PathJson {
            kind,
            vertices: vertices.iter().map(vec3).collect(),
        },
        s_integrated: mat3(s.matrix()),
        s_closed_form: mat3(closed.matrix()),
        frobenius_diff: diff,
        error_estimate: result.error_estimate,
        steps: result.steps,
        tolerance: ORACLE_TOL,
        pass: diff <= ORACLE_TOL,
    })
}

fn run_curve(
    profile: &ProfileFunction,
    curve: &Curve,
    opts: &TransportOptions,
) -> CliResult<disclination_core::transport::TransportResult> {
    curve.validate(R_MIN)?;
    let s0_inv = radial_transport_closed_form(profile, &curve.start())?.inverse();
    Ok(integrate_transport(
        &FlatConnection::new(profile.clone()),
        curve,
        &s0_inv,
        opts,
    )?)
}

impl TransportReport {
    pub fn summary(&self) -> String {
        format!(
            "transport {} along {} ({} steps): |S - S_closed| = {:.3e} (tol {:.1e}) {}\n",
            self.profile,
            self.path.kind,
            self.steps,
            self.frobenius_diff,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}
