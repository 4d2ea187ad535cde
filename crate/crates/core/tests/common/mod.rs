#![allow(dead_code)]

use disclination_core::so3::{exp_so3, RotationMatrix, So3Vector, Vec3};
use disclination_core::ProfileFunction;
use rand::Rng;
use std::f64::consts::PI;

/// The four reference profiles with `f(∞) = 0`.
pub fn test_profiles() -> Vec<ProfileFunction> {
    vec![
        ProfileFunction::zero(),
        ProfileFunction::exp_decay(PI / 2.0, 1.0),
        ProfileFunction::gauss(PI, 1.0),
        ProfileFunction::rational(PI, 1.0),
    ]
}

pub fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-2 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random point with log-uniform radius in `[r_lo, r_hi]`.
pub fn random_point<R: Rng>(rng: &mut R, r_lo: f64, r_hi: f64) -> Vec3 {
    let r = (rng.gen_range(r_lo.ln()..r_hi.ln())).exp();
    random_unit(rng) * r
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> RotationMatrix {
    exp_so3(&So3Vector(random_unit(rng) * rng.gen_range(0.0..PI)))
}
