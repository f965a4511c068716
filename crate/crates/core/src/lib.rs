//! Numerical laboratory for the Pompeiu problem.
//!
//! A bounded domain `D ⊂ ℝ³` has the Pompeiu property when some nonzero `f`
//! integrates to zero over every rigid motion of `D`. Equivalently the Fourier
//! transform of its indicator vanishes on a whole sphere `|ξ| = k`, or the
//! over-determined Helmholtz problem `(∇² + k²)u = 1`, `u = ∂u/∂N = 0` on the
//! boundary is solvable. Balls have this property at the zeros of `j₁(kR)`.
//!
//! This crate evaluates every computable object in that story:
//!
//! * [`numerics`]: Gauss rules, spherical grids, spherical Bessel functions,
//!   real spherical harmonics, root finding and dense least squares.
//! * [`geometry`]: balls, ellipsoids, spherical-harmonic star shapes and
//!   closed triangle meshes, with quadrature samples on the boundary and in
//!   the interior.
//! * [`fourier`]: the indicator transform `χ̃(ξ) = ∫_D e^{iξ·x} dx` by three
//!   independent routes, and the zero-sphere scanner.
//! * [`helmholtz`]: entire Helmholtz solutions, ball eigenfunctions, the exact
//!   over-determined ball solution and the boundary defect functional.
//! * [`identities`]: the boundary and domain identities that tie the
//!   formulations together, checked numerically.
//!
//! The guide in `book/` walks through each of these with runnable snippets.

pub mod error;
pub mod fourier;
pub mod geometry;
pub mod helmholtz;
pub mod identities;
pub mod numerics;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Points, directions and normals.
pub type Vec3 = nalgebra::Vector3<f64>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/fourier.md")]
    mod fourier {}
    #[doc = include_str!("../../../book/src/helmholtz.md")]
    mod helmholtz {}
    #[doc = include_str!("../../../book/src/identities.md")]
    mod identities {}
}
