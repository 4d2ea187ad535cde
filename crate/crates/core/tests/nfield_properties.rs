mod common;

use common::{random_point, random_rotation, random_unit, test_profiles};
use disclination_core::nfield::{
    angle_between, classify_origin, covariant_derivative_n, directional_limit, hedgehog_field, nfield_cartesian,
    nfield_spherical, plane_section_x2, spherical_matrix, DirectorField, OriginClassification,
};
use disclination_core::so3::apply_rotation;
use disclination_core::transport::radial_transport_closed_form;
use disclination_core::{ProfileFunction, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn consistency_triangle_and_unit_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for f in test_profiles() {
        for _ in 0..100 {
            let x = random_point(&mut rng, 0.05, 20.0);
            let r = x.norm();
            let cart = nfield_cartesian(&f, &x).unwrap();
            let rot = apply_rotation(&Vec3::z(), &spherical_matrix(&f, &x).unwrap());
            let theta = (x.z / r).acos();
            let phi = x.y.atan2(x.x).rem_euclid(2.0 * PI);
            let sph = nfield_spherical(&f, r, theta, phi).unwrap();
            assert!((cart - rot).amax() < 1e-12);
            assert!((cart - sph).amax() < 1e-12);
            assert!((cart.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn spherical_matrix_equals_radial_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for f in test_profiles() {
        let x = random_point(&mut rng, 0.1, 10.0);
        let a = spherical_matrix(&f, &x).unwrap();
        let b = radial_transport_closed_form(&f, &x).unwrap();
        assert!(a.frobenius_distance(&b) < 1e-14);
    }
}

#[test]
fn spherical_matrix_covariance() {
    // S(x·R) = Rᵀ S(x) R in the row-vector convention x·R = apply_rotation(x, R)
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for f in test_profiles() {
        for _ in 0..20 {
            let rot = random_rotation(&mut rng);
            let x = random_point(&mut rng, 0.1, 10.0);
            let lhs = spherical_matrix(&f, &apply_rotation(&x, &rot)).unwrap();
            let m = rot.matrix();
            let rhs = m.transpose() * spherical_matrix(&f, &x).unwrap().matrix() * m;
            assert!((lhs.matrix() - rhs).amax() < 1e-12);
        }
    }
}

#[test]
fn plane_section_matches_cartesian() {
    let f = ProfileFunction::example_two();
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..100 {
        let (x1, x3) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let a = plane_section_x2(&f, x1, x3).unwrap();
        let b = nfield_cartesian(&f, &Vec3::new(x1, 0.0, x3)).unwrap();
        assert!((a - b).amax() < 1e-15);
    }
}

#[test]
fn rotation_about_e3_rotates_the_field() {
    let f = ProfileFunction::example_two();
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..50 {
        let x = random_point(&mut rng, 0.1, 5.0);
        let alpha: f64 = rng.gen_range(0.0..2.0 * PI);
        let (s, c) = alpha.sin_cos();
        let rx = Vec3::new(c * x.x - s * x.y, s * x.x + c * x.y, x.z);
        let n = nfield_cartesian(&f, &x).unwrap();
        let rn = nfield_cartesian(&f, &rx).unwrap();
        assert!((rn.x - (c * n.x - s * n.y)).abs() < 1e-12);
        assert!((rn.y - (s * n.x + c * n.y)).abs() < 1e-12);
        assert!((rn.z - n.z).abs() < 1e-12);
    }
}

#[test]
fn hedgehog_is_radial_for_every_profile() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for f in test_profiles() {
        for _ in 0..200 {
            let x = random_point(&mut rng, 0.05, 10.0);
            let n = hedgehog_field(&f, &x).unwrap();
            assert!((n - x / x.norm()).amax() < 1e-10);
        }
    }
}

#[test]
fn director_field_unit_norm_for_random_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let field = DirectorField::spherical(ProfileFunction::gauss(PI, 1.0), random_unit(&mut rng));
    for _ in 0..100 {
        let n = field.eval(&random_point(&mut rng, 0.05, 10.0)).unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn covariant_derivative_vanishes_at_random_points() {
    let f = ProfileFunction::example_two();
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    for _ in 0..50 {
        let x = random_point(&mut rng, 0.3, 10.0);
        let n0 = random_unit(&mut rng);
        let res = covariant_derivative_n(&f, &n0, &x, 1e-5).unwrap();
        assert!(res.amax() < 1e-6, "{x:?}: {:e}", res.amax());
    }
}

/// Brute-force continuity: the field sampled at r = 1e-6 along many
/// directions either collapses to one vector or it does not.
fn sampled_limits_agree(f: &ProfileFunction) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(39);
    let reference = nfield_cartesian(f, &(Vec3::z() * 1e-6)).unwrap();
    (0..64).all(|_| {
        let d = random_unit(&mut rng);
        let n = nfield_cartesian(f, &(d * 1e-6)).unwrap();
        angle_between(&n, &reference) < 1e-4
    })
}

#[test]
fn classification_matches_directional_sampling() {
    let profiles = [
        ProfileFunction::zero(),
        ProfileFunction::example_two(),
        ProfileFunction::gauss(PI, 1.0),
        ProfileFunction::rational(PI, 1.0),
        ProfileFunction::exp_decay(2.0 * PI, 1.0),
        ProfileFunction::exp_decay(0.3, 2.0),
    ];
    for f in profiles {
        let continuous = matches!(classify_origin(&f), OriginClassification::Continuous { .. });
        assert_eq!(continuous, sampled_limits_agree(&f), "{}", f.label());
        for d in [
            Vec3::x(),
            -Vec3::x(),
            Vec3::y(),
            Vec3::z(),
            -Vec3::z(),
            Vec3::new(1.0, 1.0, 1.0).normalize(),
        ] {
            let analytic = directional_limit(&f, &d).unwrap();
            let sampled = nfield_cartesian(&f, &(d * 1e-6)).unwrap();
            assert!((analytic - sampled).amax() < 1e-5, "{} along {d:?}", f.label());
        }
    }
}

#[test]
fn singular_witnesses_differ() {
    for f0 in [0.3, PI / 2.0, PI, 3.0 * PI / 2.0, -1.0] {
        match classify_origin(&ProfileFunction::exp_decay(f0, 1.0)) {
            OriginClassification::EssentialSingularity { witnesses } => {
                assert!(angle_between(&witnesses[0].limit, &witnesses[1].limit) > 1e-9);
            }
            other => panic!("f(0) = {f0}: {other:?}"),
        }
    }
}
