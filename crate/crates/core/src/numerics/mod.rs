//! Special functions, quadrature, root finding and dense linear algebra.

mod bessel;
mod harmonics;
mod linalg;
mod quadrature;
mod roots;

pub use bessel::{
    spherical_bessel_j, spherical_bessel_j_array, spherical_bessel_j_deriv, spherical_bessel_ratio_array,
};
pub use harmonics::{
    harmonic_count, lm_index, real_spherical_harmonic, solid_harmonics, solid_harmonics_with_gradient,
};
pub use linalg::{least_squares_solve, min_eigenvalue_symmetric, min_singular_value, LeastSquares, SingularPair};
pub use quadrature::{gauss_legendre, sphere_grid, Quadrature1D, SphericalGrid};
pub use roots::{find_roots, golden_section_min, RootList, DEFAULT_ROOT_TOL};
