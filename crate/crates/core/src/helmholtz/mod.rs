//! Entire Helmholtz solutions, exact solutions on the ball, and the
//! least-squares defect that measures how nearly the over-determined problem
//! `u|_S = const, u_N|_S = 0` is solvable on a given shape.

mod ball;
mod defect;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;

use crate::numerics::{harmonic_count, solid_harmonics_with_gradient, spherical_bessel_ratio_array};
use crate::{Error, Result, Vec3};

pub use ball::{
    ball_dirichlet_eigenfunction, dirichlet_wavenumber, extended_solution_ft, formulation3_ball_solution,
    BallEigenfunction, ExtendedTransform, OverdeterminedBallSolution, VARIETY_EXCLUSION,
};
pub use defect::{defect_sweep, mps_defect, DefectProblem, DefectResult, DefectSweep, DEFAULT_BASIS_DEGREE};

/// Complex 3-vector, the gradient of a complex field.
pub type CVec3 = Vector3<Complex64>;

/// A smooth scalar field with an analytic gradient.
pub trait Field: Sync {
    fn value(&self, x: &Vec3) -> Complex64;
    fn gradient(&self, x: &Vec3) -> CVec3;
}

/// A field solving `(∇² + k²) u = 0` wherever it is defined.
pub trait HelmholtzField: Field {
    fn wavenumber(&self) -> f64;
}

impl<F: Field + ?Sized> Field for &F {
    fn value(&self, x: &Vec3) -> Complex64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &Vec3) -> CVec3 {
        (**self).gradient(x)
    }
}

impl<F: HelmholtzField + ?Sized> HelmholtzField for &F {
    fn wavenumber(&self) -> f64 {
        (**self).wavenumber()
    }
}

pub(crate) fn real_gradient(g: Vec3) -> CVec3 {
    g.map(|c| Complex64::new(c, 0.0))
}

/// `e^{ik β·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    k: f64,
    beta: Vec3,
}

impl PlaneWave {
    /// `beta` is normalized; it must be nonzero.
    pub fn new(k: f64, beta: Vec3) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {k}")));
        }
        let n = beta.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument("plane-wave direction must be nonzero".into()));
        }
        Ok(Self { k, beta: beta / n })
    }

    pub fn beta(&self) -> Vec3 {
        self.beta
    }
}

impl Field for PlaneWave {
    fn value(&self, x: &Vec3) -> Complex64 {
        Complex64::from_polar(1.0, self.k * self.beta.dot(x))
    }

    fn gradient(&self, x: &Vec3) -> CVec3 {
        let v = self.value(x) * Complex64::new(0.0, self.k);
        self.beta.map(|b| v * b)
    }
}

impl HelmholtzField for PlaneWave {
    fn wavenumber(&self) -> f64 {
        self.k
    }
}

/// Values and gradients of every mode `j_l(k|y|) Y_lm(ŷ)`, `l ≤ l_max`, in
/// `lm_index` order.
///
/// Written as `g_l(r) R_lm(y)` with the solid harmonic `R_lm = r^l Y_lm` and
/// `g_l(r) = k^l · j_l(kr)/(kr)^l`, both smooth at the origin. Since
/// `d/dz [j_l(z)/z^l] = −z · j_{l+1}(z)/z^{l+1}`, `∇g_l = −k^{l+2} (j_{l+1}/z^{l+1})(kr) · y`.
pub fn helmholtz_modes(k: f64, l_max: usize, y: &Vec3) -> (Vec<f64>, Vec<Vec3>) {
    let ratios = spherical_bessel_ratio_array(l_max + 1, k * y.norm());
    let (solid, solid_grad) = solid_harmonics_with_gradient(l_max, y);
    let mut values = Vec::with_capacity(solid.len());
    let mut grads = Vec::with_capacity(solid.len());
    let mut kl = 1.0;
    for l in 0..=l_max {
        let g = kl * ratios[l];
        let dg = y * (-kl * k * k * ratios[l + 1]);
        for i in l * l..(l + 1) * (l + 1) {
            values.push(g * solid[i]);
            grads.push(solid_grad[i] * g + dg * solid[i]);
        }
        kl *= k;
    }
    (values, grads)
}

/// `U(x) = Σ a_lm j_l(k|x − c|) Y_lm(x̂ − c)` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HelmholtzBasisField {
    k: f64,
    l_max: usize,
    coefficients: Vec<f64>,
    center: Vec3,
}

impl HelmholtzBasisField {
    /// `coefficients` are in `lm_index` order, `(l_max + 1)²` of them.
    pub fn new(k: f64, l_max: usize, coefficients: Vec<f64>, center: Vec3) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {k}")));
        }
        if coefficients.len() != harmonic_count(l_max) {
            return Err(Error::InvalidArgument(format!(
                "degree {l_max} needs {} coefficients, got {}",
                harmonic_count(l_max),
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(Self { k, l_max, coefficients, center })
    }

    /// Coefficients uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(k: f64, l_max: usize, center: Vec3, rng: &mut R) -> Result<Self> {
        let coefficients = (0..harmonic_count(l_max)).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Self::new(k, l_max, coefficients, center)
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    /// Real value and gradient.
    pub fn eval(&self, x: &Vec3) -> (f64, Vec3) {
        let (values, grads) = helmholtz_modes(self.k, self.l_max, &(x - self.center));
        let mut v = 0.0;
        let mut g = Vec3::zeros();
        for ((a, val), grad) in self.coefficients.iter().zip(&values).zip(&grads) {
            v += a * val;
            g += grad * *a;
        }
        (v, g)
    }
}

impl Field for HelmholtzBasisField {
    fn value(&self, x: &Vec3) -> Complex64 {
        Complex64::new(self.eval(x).0, 0.0)
    }

    fn gradient(&self, x: &Vec3) -> CVec3 {
        real_gradient(self.eval(x).1)
    }
}

impl HelmholtzField for HelmholtzBasisField {
    fn wavenumber(&self) -> f64 {
        self.k
    }
}

/// `∇²u(x)` by fourth-order central differences of the field's own values,
/// with step `h = 1e-3 (1 + |x|)`.
pub fn laplacian_fd<F: Field + ?Sized>(field: &F, x: &Vec3) -> Complex64 {
    let h = 1e-3 * (1.0 + x.norm());
    let center = field.value(x);
    let mut lap = Complex64::new(0.0, 0.0);
    for axis in 0..3 {
        let mut e = Vec3::zeros();
        e[axis] = h;
        let p1 = field.value(&(x + e));
        let m1 = field.value(&(x - e));
        let p2 = field.value(&(x + e * 2.0));
        let m2 = field.value(&(x - e * 2.0));
        lap += (-p2 + p1 * 16.0 - center * 30.0 + m1 * 16.0 - m2) / (12.0 * h * h);
    }
    lap
}

/// `|(∇² + k²) u|(x)`.
pub fn helmholtz_residual<F: Field + ?Sized>(field: &F, x: &Vec3, k: f64) -> f64 {
    (laplacian_fd(field, x) + field.value(x) * (k * k)).norm()
}

/// `|(∇² + k²) u − f|(x)` for a constant source `f`.
pub fn helmholtz_source_residual<F: Field + ?Sized>(field: &F, x: &Vec3, k: f64, source: f64) -> f64 {
    (laplacian_fd(field, x) + field.value(x) * (k * k) - source).norm()
}
