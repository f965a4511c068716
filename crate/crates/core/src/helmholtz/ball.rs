//! Exact solutions on a ball: Dirichlet eigenfunctions and the solution of
//! the over-determined problem `(∇² + k²)u = 1`, `u|_S = u_N|_S = 0`.

use num_complex::Complex64;

use super::{helmholtz_modes, real_gradient, CVec3, Field, HelmholtzField};
use crate::fourier::chi_ft_ball;
use crate::geometry::VolumeSample;
use crate::numerics::{
    find_roots, gauss_legendre, lm_index, real_spherical_harmonic, spherical_bessel_j, spherical_bessel_j_deriv,
    spherical_bessel_ratio_array, DEFAULT_ROOT_TOL,
};
use crate::{Error, Result, Vec3};

/// `extended_solution_ft` refuses `|k² − |ξ|²|` at or below this.
pub const VARIETY_EXCLUSION: f64 = 1e-6;

const RADIAL_NODES: usize = 60;
const ROOT_SCAN_PER_UNIT: f64 = 20.0;
const ROOT_SEARCH_LIMIT: f64 = 1e4;

/// `n`-th positive root of `j_l(k R) = 0`, as a wavenumber `k`.
pub fn dirichlet_wavenumber(l: usize, n: usize, radius: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("root index n starts at 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    // Roots of j_l are spaced by roughly π and the first lies above l.
    let mut upper = l as f64 + std::f64::consts::PI * (n as f64 + 1.0) + 2.0;
    let mut found = 0;
    while upper <= ROOT_SEARCH_LIMIT {
        let roots = find_roots(
            |x| spherical_bessel_j(l, x),
            1e-3,
            upper,
            (upper * ROOT_SCAN_PER_UNIT) as usize,
            DEFAULT_ROOT_TOL,
        );
        found = roots.len();
        if found >= n {
            return Ok(roots.roots[n - 1] / radius);
        }
        upper *= 2.0;
    }
    Err(Error::RootBracketExhausted { order: l, wanted: n, found, limit: ROOT_SEARCH_LIMIT })
}

/// `u = norm · j_l(k r) Y_lm(x̂)` on the ball `|x − c| < R` with `j_l(kR) = 0`,
/// normalized in `L²` of the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallEigenfunction {
    pub l: usize,
    pub m: i64,
    pub n: usize,
    pub radius: f64,
    pub center: Vec3,
    pub k: f64,
    pub norm: f64,
}

pub fn ball_dirichlet_eigenfunction(l: usize, m: i64, n: usize, radius: f64) -> Result<BallEigenfunction> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::InvalidArgument(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let k = dirichlet_wavenumber(l, n, radius)?;
    // ∫_ball u² = norm² ∫₀^R j_l(kr)² r² dr because Y_lm is orthonormal.
    let radial = gauss_legendre(RADIAL_NODES).integrate(0.0, radius, |r| {
        let j = spherical_bessel_j(l, k * r);
        j * j * r * r
    });
    Ok(BallEigenfunction { l, m, n, radius, center: Vec3::zeros(), k, norm: 1.0 / radial.sqrt() })
}

impl BallEigenfunction {
    pub fn with_center(mut self, center: Vec3) -> Self {
        self.center = center;
        self
    }

    /// Real value and gradient.
    pub fn eval(&self, x: &Vec3) -> (f64, Vec3) {
        let (values, grads) = helmholtz_modes(self.k, self.l, &(x - self.center));
        let i = lm_index(self.l, self.m);
        (self.norm * values[i], grads[i] * self.norm)
    }

    /// `u_N(s) = norm · k · j_l′(kR) · Y_lm(ŝ)`, the outward normal
    /// derivative at the boundary point nearest the ray through `s`.
    pub fn normal_derivative_at(&self, s: &Vec3) -> f64 {
        let dir = s - self.center;
        let y = real_spherical_harmonic(self.l, self.m, &dir).unwrap_or(0.0);
        self.norm * self.k * spherical_bessel_j_deriv(self.l, self.k * self.radius) * y
    }
}

impl Field for BallEigenfunction {
    fn value(&self, x: &Vec3) -> Complex64 {
        Complex64::new(self.eval(x).0, 0.0)
    }

    fn gradient(&self, x: &Vec3) -> CVec3 {
        real_gradient(self.eval(x).1)
    }
}

impl HelmholtzField for BallEigenfunction {
    fn wavenumber(&self) -> f64 {
        self.k
    }
}

/// `u = (1 − j₀(k r)/j₀(k R)) / k²` where `k` is a root of `j₁(kR)`:
/// `(∇² + k²)u = 1` in the ball and `u = u_N = 0` on its sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct OverdeterminedBallSolution {
    pub radius: f64,
    pub center: Vec3,
    pub n: usize,
    pub k: f64,
    /// `j₀(kR)`, nonzero because zeros of `j₀` and `j₁` interlace.
    pub j0_at_boundary: f64,
}

pub fn formulation3_ball_solution(radius: f64, n: usize) -> Result<OverdeterminedBallSolution> {
    let k = dirichlet_wavenumber(1, n, radius)?;
    let j0_at_boundary = spherical_bessel_j(0, k * radius);
    assert!(j0_at_boundary.abs() > 1e-3, "j0 vanished at a j1 root");
    Ok(OverdeterminedBallSolution { radius, center: Vec3::zeros(), n, k, j0_at_boundary })
}

impl OverdeterminedBallSolution {
    pub fn with_center(mut self, center: Vec3) -> Self {
        self.center = center;
        self
    }

    /// Real value and gradient; `∇u = y · (j₁(z)/z)(k r) / j₀(kR)`.
    pub fn eval(&self, x: &Vec3) -> (f64, Vec3) {
        let y = x - self.center;
        let ratios = spherical_bessel_ratio_array(1, self.k * y.norm());
        let value = (1.0 - ratios[0] / self.j0_at_boundary) / (self.k * self.k);
        (value, y * (ratios[1] / self.j0_at_boundary))
    }

    /// The boundary value `−k⁻²` of the companion `v = u − k⁻²`, which solves
    /// `(∇² + k²)v = 0`, `v|_S = const`, `v_N|_S = 0`.
    pub fn companion_constant(&self) -> f64 {
        -1.0 / (self.k * self.k)
    }

    /// Value and gradient of the companion `v = u − k⁻²`.
    pub fn companion_eval(&self, x: &Vec3) -> (f64, Vec3) {
        let (u, g) = self.eval(x);
        (u + self.companion_constant(), g)
    }

    /// A [`Field`] view of the companion, a homogeneous Helmholtz solution.
    pub fn companion(&self) -> Companion<'_> {
        Companion(self)
    }
}

impl Field for OverdeterminedBallSolution {
    fn value(&self, x: &Vec3) -> Complex64 {
        Complex64::new(self.eval(x).0, 0.0)
    }

    fn gradient(&self, x: &Vec3) -> CVec3 {
        real_gradient(self.eval(x).1)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Companion<'a>(&'a OverdeterminedBallSolution);

impl Field for Companion<'_> {
    fn value(&self, x: &Vec3) -> Complex64 {
        Complex64::new(self.0.companion_eval(x).0, 0.0)
    }

    fn gradient(&self, x: &Vec3) -> CVec3 {
        real_gradient(self.0.eval(x).1)
    }
}

impl HelmholtzField for Companion<'_> {
    fn wavenumber(&self) -> f64 {
        self.0.k
    }
}

/// `ũ(ξ)` of the zero extension of `u`, against `χ̃(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedTransform {
    pub u_tilde: Complex64,
    pub chi_tilde: Complex64,
    /// `|ũ(ξ)(k² − |ξ|²) − χ̃(ξ)|`.
    pub residual: f64,
}

/// Extending `u` by zero outside the ball gives `(∇² + k²)u = χ` in the
/// sense of distributions (both traces vanish), hence
/// `ũ(ξ)(k² − |ξ|²) = χ̃(ξ)`. `ũ` comes from `samples`, a volume rule on the
/// ball; `χ̃` from its closed form.
pub fn extended_solution_ft(
    sol: &OverdeterminedBallSolution,
    samples: &[VolumeSample],
    xi: &Vec3,
) -> Result<ExtendedTransform> {
    let symbol = sol.k * sol.k - xi.norm_squared();
    if symbol.abs() <= VARIETY_EXCLUSION {
        return Err(Error::InvalidArgument(format!(
            "|k² − |ξ|²| = {:e} is on the characteristic variety",
            symbol.abs()
        )));
    }
    let u_tilde: Complex64 = samples
        .iter()
        .map(|s| Complex64::from_polar(s.weight * sol.eval(&s.point).0, xi.dot(&s.point)))
        .sum();
    let chi_tilde = Complex64::from_polar(1.0, xi.dot(&sol.center)) * chi_ft_ball(sol.radius, xi);
    Ok(ExtendedTransform { u_tilde, chi_tilde, residual: (u_tilde * symbol - chi_tilde).norm() })
}

#[cfg(test)]
mod tests {
    use super::super::{helmholtz_residual, helmholtz_source_residual};
    use super::*;
    use crate::geometry::{Resolution, Shape};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    const J1_ROOTS: [f64; 2] = [4.493409457909064, 7.725251836937707];

    fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
        loop {
            let p = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let n = p.norm();
            if n > 0.1 && n < 1.0 {
                return p / n;
            }
        }
    }

    #[test]
    fn dirichlet_wavenumbers() {
        assert!((dirichlet_wavenumber(0, 1, 1.0).unwrap() - PI).abs() < 1e-12);
        assert!((dirichlet_wavenumber(0, 3, 1.0).unwrap() - 3.0 * PI).abs() < 1e-12);
        assert!((dirichlet_wavenumber(1, 1, 1.0).unwrap() - J1_ROOTS[0]).abs() < 1e-12);
        assert!((dirichlet_wavenumber(1, 2, 2.0).unwrap() - J1_ROOTS[1] / 2.0).abs() < 1e-12);
        // tan x = x oracle, independent of the Bessel code.
        let k = dirichlet_wavenumber(1, 1, 1.0).unwrap();
        assert!((k.tan() - k).abs() < 1e-9);
        assert!(dirichlet_wavenumber(0, 0, 1.0).is_err());
        assert!(ball_dirichlet_eigenfunction(1, 2, 1, 1.0).is_err());
    }

    #[test]
    fn eigenfunctions_are_normalized() {
        // ∫₀^R j_l(kr)² r² dr = R³/2 · j_{l+1}(kR)² when j_l(kR) = 0.
        for l in 0..=1 {
            for n in 1..=2 {
                let u = ball_dirichlet_eigenfunction(l, 0, n, 1.0).unwrap();
                let closed = 0.5 * spherical_bessel_j(l + 1, u.k).powi(2);
                assert!((u.norm * u.norm * closed - 1.0).abs() < 1e-8, "l={l} n={n}");
            }
        }
    }

    #[test]
    fn eigenfunctions_vanish_on_sphere_and_solve_pde() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (l, m) in [(0, 0), (1, -1), (2, 1)] {
            let u = ball_dirichlet_eigenfunction(l, m, 1, 1.3).unwrap();
            for _ in 0..10 {
                let d = random_unit(&mut rng);
                assert!(u.eval(&(d * 1.3)).0.abs() < 1e-12);
                let x = d * rng.random_range(0.1..1.2);
                assert!(helmholtz_residual(&u, &x, u.k) < 1e-5);
            }
        }
    }

    #[test]
    fn normal_derivative_trace_matches_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = Vec3::new(0.2, -0.1, 0.4);
        for (l, m) in [(0, 0), (1, 1), (2, -2)] {
            let u = ball_dirichlet_eigenfunction(l, m, 2, 0.9).unwrap().with_center(c);
            for _ in 0..5 {
                let d = random_unit(&mut rng);
                let s = c + d * 0.9;
                assert!((u.eval(&s).1.dot(&d) - u.normal_derivative_at(&s)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eigenfunctions_are_orthonormal() {
        let samples = Shape::ball(1.0).unwrap().volume_samples(&Resolution::default()).unwrap();
        let mut modes = Vec::new();
        for l in 0..=2usize {
            for m in -(l as i64)..=l as i64 {
                for n in 1..=2 {
                    modes.push(ball_dirichlet_eigenfunction(l, m, n, 1.0).unwrap());
                }
            }
        }
        for (i, a) in modes.iter().enumerate() {
            for b in &modes[i..] {
                let ip: f64 = samples.iter().map(|s| s.weight * a.eval(&s.point).0 * b.eval(&s.point).0).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-6, "{:?} {:?} {ip}", (a.l, a.m, a.n), (b.l, b.m, b.n));
            }
        }
    }

    #[test]
    fn overdetermined_solution_at_origin() {
        let sol = formulation3_ball_solution(1.0, 1).unwrap();
        assert!((sol.j0_at_boundary - (-0.217233628211222)).abs() < 1e-12);
        let expected = (1.0 - 1.0 / sol.j0_at_boundary) / (sol.k * sol.k);
        assert!((sol.eval(&Vec3::zeros()).0 - expected).abs() < 1e-15);
        assert_eq!(sol.eval(&Vec3::zeros()).1, Vec3::zeros());
    }

    #[test]
    fn overdetermined_solution_traces_and_pde() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=2 {
            let sol = formulation3_ball_solution(1.0, n).unwrap();
            for _ in 0..50 {
                let d = random_unit(&mut rng);
                let (u, g) = sol.eval(&d);
                assert!(u.abs() < 1e-12 && g.dot(&d).abs() < 1e-12);
                let x = d * rng.random_range(0.0..0.95);
                assert!(helmholtz_source_residual(&sol, &x, sol.k, 1.0) < 1e-6);
                assert!(helmholtz_residual(&sol.companion(), &x, sol.k) < 1e-6);
                assert!((sol.companion_eval(&d).0 - sol.companion_constant()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let sol = formulation3_ball_solution(1.2, 1).unwrap().with_center(Vec3::new(0.1, 0.0, -0.3));
        let x = Vec3::new(0.4, 0.3, 0.1);
        let h = 1e-6;
        for axis in 0..3 {
            let mut e = Vec3::zeros();
            e[axis] = h;
            let fd = (sol.eval(&(x + e)).0 - sol.eval(&(x - e)).0) / (2.0 * h);
            assert!((sol.eval(&x).1[axis] - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn extended_transform_identity() {
        let sol = formulation3_ball_solution(1.0, 1).unwrap();
        let samples = Shape::ball(1.0).unwrap().volume_samples(&Resolution::default()).unwrap();
        let volume = 4.0 * PI / 3.0;
        let at_zero = extended_solution_ft(&sol, &samples, &Vec3::zeros()).unwrap();
        assert!((at_zero.u_tilde.re * sol.k * sol.k - volume).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let xi = random_unit(&mut rng) * rng.random_range(0.0..8.0);
            match extended_solution_ft(&sol, &samples, &xi) {
                Ok(t) => assert!(t.residual < 1e-6 * volume),
                Err(_) => assert!((sol.k * sol.k - xi.norm_squared()).abs() <= VARIETY_EXCLUSION),
            }
        }
        let far = extended_solution_ft(&sol, &samples, &(Vec3::x() * 2.0 * sol.k)).unwrap();
        assert!(far.residual < 1e-6 * volume);
        assert!(extended_solution_ft(&sol, &samples, &(Vec3::y() * sol.k)).is_err());
    }
}
