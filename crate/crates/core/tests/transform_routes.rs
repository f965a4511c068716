//! Three independent routes to the indicator transform must agree.

use nalgebra::Rotation3;
use pompeiu_core::fourier::IndicatorTransform;
use pompeiu_core::geometry::{Ellipsoid, Resolution, Shape};
use pompeiu_core::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_xi(rng: &mut ChaCha8Rng) -> Vec3 {
    let dir = loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm() > 0.1 && v.norm() < 1.0 {
            break v.normalize();
        }
    };
    dir * rng.random_range(0.1..10.0)
}

fn check_routes(shape: Shape, seed: u64) {
    let t = IndicatorTransform::new(shape, &Resolution::default()).unwrap();
    let tol = 1e-8 * t.measure();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..50 {
        let xi = random_xi(&mut rng);
        let exact = t.closed_form(&xi).unwrap();
        let vol = t.by_volume(&xi);
        let surf = t.by_surface(&xi).unwrap();
        assert!((vol - exact).norm() < tol, "volume route at {xi:?}: {}", (vol - exact).norm());
        assert!((surf - exact).norm() < tol, "surface route at {xi:?}: {}", (surf - exact).norm());
    }
}

#[test]
fn ball_routes_agree() {
    check_routes(Shape::ball(1.0).unwrap(), 1);
}

#[test]
fn ellipsoid_routes_agree() {
    check_routes(Shape::ellipsoid([1.0, 1.0, 1.3]).unwrap(), 2);
}

#[test]
fn rotated_offset_ellipsoid_routes_agree() {
    let rot = Rotation3::from_euler_angles(0.5, -0.2, 1.0).into_inner();
    check_routes(Shape::Ellipsoid(Ellipsoid::new([0.8, 1.0, 1.2], Vec3::new(0.2, -0.1, 0.3), rot).unwrap()), 3);
}
