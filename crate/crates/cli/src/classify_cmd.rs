//! The `classify` report.

use crate::format::{ser_sci, vec3, Sci};
use disclination_core::nfield::{classify_origin, directional_limit, nfield_cartesian, OriginClassification};
use disclination_core::{ProfileFunction, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Radius at which the directional limits are sampled.
pub const SAMPLE_RADIUS: f64 = 1e-6;
pub const SAMPLE_DIRECTIONS: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct WitnessJson {
    pub direction: [Sci; 3],
    pub limit: [Sci; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingJson {
    #[serde(serialize_with = "ser_sci")]
    pub radius: f64,
    pub directions: usize,
    /// Largest `|n(r d) - lim n|` over the sampled directions.
    #[serde(serialize_with = "ser_sci")]
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub profile: String,
    #[serde(serialize_with = "ser_sci")]
    pub f_at_zero: f64,
    #[serde(serialize_with = "ser_sci")]
    pub f_at_infinity: f64,
    pub classification: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    pub witnesses: Vec<WitnessJson>,
    pub sampling: SamplingJson,
}

/// Largest deviation between the field at radius `r` and the analytic
/// directional limit, over `e1, e2, e3, -e3` and `n` seeded random directions.
pub fn sampled_limit_deviation(f: &ProfileFunction, r: f64, n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = vec![Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::z()];
    while dirs.len() < n + 4 {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let norm = v.norm();
        if norm > 1e-2 && norm <= 1.0 {
            dirs.push(v / norm);
        }
    }
    dirs.iter()
        .map(|d| {
            let sampled = nfield_cartesian(f, &(d * r)).expect("r above the exclusion radius");
            let limit = directional_limit(f, d).expect("unit direction");
            (sampled - limit).norm()
        })
        .fold(0.0, f64::max)
}

pub fn run_classify(f: &ProfileFunction, seed: u64) -> ClassifyReport {
    let (classification, k, witnesses) = match classify_origin(f) {
        OriginClassification::Continuous { k } => ("continuous", Some(k), vec![]),
        OriginClassification::EssentialSingularity { witnesses } => (
            "essential_singularity",
            None,
            witnesses
                .iter()
                .map(|w| WitnessJson {
                    direction: vec3(&w.direction),
                    limit: vec3(&w.limit),
                })
                .collect(),
        ),
    };
    ClassifyReport {
        profile: f.label().to_string(),
        f_at_zero: f.f_at_zero(),
        f_at_infinity: f.f_at_infinity(),
        classification,
        k,
        witnesses,
        sampling: SamplingJson {
            radius: SAMPLE_RADIUS,
            directions: SAMPLE_DIRECTIONS + 4,
            max_deviation: sampled_limit_deviation(f, SAMPLE_RADIUS, SAMPLE_DIRECTIONS, seed),
        },
    }
}

impl ClassifyReport {
    pub fn summary(&self) -> String {
        let mut s = match self.k {
            Some(k) => format!("{}: continuous at the origin, k = {k}\n", self.profile),
            None => format!("{}: essential singularity at the origin\n", self.profile),
        };
        for w in &self.witnesses {
            s += &format!(
                "  along ({:.3}, {:.3}, {:.3}) -> ({:.6}, {:.6}, {:.6})\n",
                w.direction[0].0, w.direction[1].0, w.direction[2].0, w.limit[0].0, w.limit[1].0, w.limit[2].0
            );
        }
        s += &format!(
            "  sampled at r = {:e}: max deviation from the limits {:.3e}\n",
            self.sampling.radius, self.sampling.max_deviation
        );
        s
    }
}
