//! Randomized invariants.

use pompeiu_core::fourier::{chi_ft_ball, chi_ft_ellipsoid};
use pompeiu_core::geometry::Ellipsoid;
use pompeiu_core::numerics::{gauss_legendre, harmonic_count, lm_index, spherical_bessel_j_array};
use pompeiu_core::Vec3;
use nalgebra::Matrix3;
use proptest::prelude::*;

proptest! {
    #[test]
    fn lm_index_is_a_bijection(l in 0usize..30) {
        let mut seen = vec![false; harmonic_count(l)];
        for ll in 0..=l {
            for m in -(ll as i64)..=ll as i64 {
                let i = lm_index(ll, m);
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
        }
        prop_assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn bessel_three_term_recurrence(x in 0.05f64..60.0, l in 1usize..25) {
        let j = spherical_bessel_j_array(l + 1, x);
        let lhs = j[l - 1] + j[l + 1];
        let rhs = (2 * l + 1) as f64 / x * j[l];
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs() + j[l - 1].abs()));
    }

    #[test]
    fn gauss_legendre_integrates_monomials(n in 1usize..30, p in 0usize..20) {
        prop_assume!(p < 2 * n);
        let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p + 1) as f64 };
        let q = gauss_legendre(n);
        let approx: f64 = q.nodes.iter().zip(&q.weights).map(|(x, w)| w * x.powi(p as i32)).sum();
        prop_assert!((approx - exact).abs() < 1e-13);
    }

    #[test]
    fn ellipsoid_transform_is_bounded_by_volume(
        a in 0.3f64..2.0, b in 0.3f64..2.0, c in 0.3f64..2.0,
        x in -8.0f64..8.0, y in -8.0f64..8.0, z in -8.0f64..8.0,
    ) {
        let e = Ellipsoid::new([a, b, c], Vec3::new(0.1, 0.2, 0.3), Matrix3::identity()).unwrap();
        let xi = Vec3::new(x, y, z);
        let v = chi_ft_ellipsoid(&e, &xi);
        prop_assert!(v.norm() <= e.volume() * (1.0 + 1e-12));
        prop_assert!((v - chi_ft_ellipsoid(&e, &-xi).conj()).norm() < 1e-12 * e.volume());
    }

    #[test]
    fn ball_transform_depends_only_on_radius_times_frequency(
        r in 0.2f64..3.0, x in -5.0f64..5.0, y in -5.0f64..5.0, z in -5.0f64..5.0, s in 0.3f64..3.0,
    ) {
        let xi = Vec3::new(x, y, z);
        let lhs = chi_ft_ball(r * s, &(xi / s));
        let rhs = chi_ft_ball(r, &xi) * s.powi(3);
        prop_assert!((lhs - rhs).norm() < 1e-11 * r.powi(3) * s.powi(3) * 4.2);
    }
}
