//! Method-of-particular-solutions defect for `u|_S = const, u_N|_S = 0`.
//!
//! For a basis `φ_lm = j_l(k|x − c|) Y_lm` centered at the shape's center the
//! boundary conditions become the stacked, area-weighted rows
//! `√w (φ(s) − mean_S φ)` and `√w ∂_N φ(s) / k`. The defect is
//! `σ_min / σ_max` of that matrix after scaling each column to unit
//! `L²` norm on the ball `B_a` enclosing the boundary; without the scaling,
//! high-degree columns are tiny near the origin and the ratio measures
//! the basis rather than the shape. Dividing the Neumann rows by `k` puts
//! both blocks in the same units.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{helmholtz_modes, HelmholtzBasisField};
use crate::fourier::k_grid;
use crate::geometry::{Resolution, Shape, SurfaceSample};
use crate::numerics::{gauss_legendre, golden_section_min, harmonic_count, min_singular_value, spherical_bessel_j};
use crate::{Error, Result, Vec3};

pub const DEFAULT_BASIS_DEGREE: usize = 8;
/// Boundary rows per unknown coefficient, at least.
const OVERSAMPLING: usize = 4;
const RADIAL_NODES: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct DefectResult {
    pub k: f64,
    pub l_max: usize,
    /// `σ_min / σ_max` of the column-scaled boundary matrix.
    pub defect: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Minimizing coefficients in `lm_index` order, unit Euclidean norm,
    /// largest entry positive.
    pub coefficients: Vec<f64>,
    /// `‖u − mean_S u‖_{L²(S)}` for those coefficients.
    pub dirichlet_misfit: f64,
    /// `‖u_N‖_{L²(S)}`.
    pub neumann_misfit: f64,
    /// `mean_S u`, the recovered boundary constant.
    pub boundary_constant: f64,
    pub center: Vec3,
    pub n_samples: usize,
}

impl DefectResult {
    pub fn field(&self) -> HelmholtzBasisField {
        HelmholtzBasisField::new(self.k, self.l_max, self.coefficients.clone(), self.center)
            .expect("coefficients are finite and sized for l_max")
    }

    /// The minimizer rescaled so that its boundary constant is `c`.
    pub fn field_with_constant(&self, c: f64) -> Result<HelmholtzBasisField> {
        if self.boundary_constant.abs() < 1e-14 {
            return Err(Error::InvalidArgument("minimizer has zero boundary constant".into()));
        }
        let s = c / self.boundary_constant;
        HelmholtzBasisField::new(self.k, self.l_max, self.coefficients.iter().map(|a| a * s).collect(), self.center)
    }
}

/// Boundary samples prepared once for repeated defect evaluations.
#[derive(Debug, Clone)]
pub struct DefectProblem {
    samples: Vec<SurfaceSample>,
    center: Vec3,
    outer_radius: f64,
    l_max: usize,
}

impl DefectProblem {
    /// Refines `res` until there are at least four boundary samples per
    /// coefficient.
    pub fn new(shape: &Shape, l_max: usize, res: &Resolution) -> Result<Self> {
        if l_max < 2 {
            return Err(Error::InvalidArgument(format!("basis degree must be at least 2, got {l_max}")));
        }
        let needed = OVERSAMPLING * harmonic_count(l_max);
        let mut res = *res;
        let mut samples = shape.surface_samples(&res)?;
        while samples.len() < needed {
            if shape.is_parametric() {
                res.grid_degree += 4;
            } else {
                res.mesh_order += 1;
            }
            samples = shape.surface_samples(&res)?;
        }
        let center = shape.center();
        let outer_radius = samples.iter().map(|s| (s.point - center).norm()).fold(0.0, f64::max);
        Ok(Self { samples, center, outer_radius, l_max })
    }

    pub fn samples(&self) -> &[SurfaceSample] {
        &self.samples
    }

    /// `max_S |s − c|`, the radius of the ball on which columns are normalized.
    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn eval(&self, k: f64) -> Result<DefectResult> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {k}")));
        }
        let n = self.samples.len();
        let nc = harmonic_count(self.l_max);
        let mut values = DMatrix::<f64>::zeros(n, nc);
        let mut normals = DMatrix::<f64>::zeros(n, nc);
        for (i, s) in self.samples.iter().enumerate() {
            let (v, g) = helmholtz_modes(k, self.l_max, &(s.point - self.center));
            for j in 0..nc {
                values[(i, j)] = v[j];
                normals[(i, j)] = g[j].dot(&s.normal);
            }
        }
        let weights: Vec<f64> = self.samples.iter().map(|s| s.weight).collect();
        let area: f64 = weights.iter().sum();
        for j in 0..nc {
            let mean = (0..n).map(|i| weights[i] * values[(i, j)]).sum::<f64>() / area;
            for i in 0..n {
                values[(i, j)] -= mean;
            }
        }
        // `values` now holds deviations from the surface mean.
        let radial = gauss_legendre(RADIAL_NODES);
        let column_scale: Vec<f64> = (0..=self.l_max)
            .flat_map(|l| {
                let norm2 = radial.integrate(0.0, self.outer_radius, |r| {
                    let j = spherical_bessel_j(l, k * r);
                    j * j * r * r
                });
                std::iter::repeat_n(1.0 / norm2.sqrt(), 2 * l + 1)
            })
            .collect();
        let mut system = DMatrix::<f64>::zeros(2 * n, nc);
        for i in 0..n {
            let sw = weights[i].sqrt();
            for j in 0..nc {
                system[(i, j)] = sw * values[(i, j)] * column_scale[j];
                system[(n + i, j)] = sw * normals[(i, j)] * column_scale[j] / k;
            }
        }
        let pair = min_singular_value(&system);
        if pair.sigma_max < 1e-12 {
            return Err(Error::DegenerateSystem { sigma_min: pair.sigma_min, sigma_max: pair.sigma_max });
        }

        let mut coefficients: Vec<f64> = pair.vector.iter().zip(&column_scale).map(|(v, s)| v * s).collect();
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        let pivot = coefficients.iter().copied().fold(0.0f64, |best, c| if c.abs() > best.abs() { c } else { best });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for c in coefficients.iter_mut() {
            *c *= sign / norm;
        }

        let a = nalgebra::DVector::from_column_slice(&coefficients);
        let deviation = &values * &a;
        let normal = &normals * &a;
        let weighted_norm = |v: &nalgebra::DVector<f64>| (0..n).map(|i| weights[i] * v[i] * v[i]).sum::<f64>().sqrt();
        let boundary_constant = self
            .samples
            .iter()
            .map(|s| {
                let (v, _) = helmholtz_modes(k, self.l_max, &(s.point - self.center));
                s.weight * v.iter().zip(&coefficients).map(|(x, c)| x * c).sum::<f64>()
            })
            .sum::<f64>()
            / area;

        Ok(DefectResult {
            k,
            l_max: self.l_max,
            defect: pair.sigma_min / pair.sigma_max,
            sigma_min: pair.sigma_min,
            sigma_max: pair.sigma_max,
            coefficients,
            dirichlet_misfit: weighted_norm(&deviation),
            neumann_misfit: weighted_norm(&normal),
            boundary_constant,
            center: self.center,
            n_samples: n,
        })
    }
}

/// Defect of `shape` at one wavenumber with basis degree `l_max`.
pub fn mps_defect(shape: &Shape, k: f64, l_max: usize, res: &Resolution) -> Result<DefectResult> {
    DefectProblem::new(shape, l_max, res)?.eval(k)
}

#[derive(Debug, Clone)]
pub struct DefectSweep {
    pub curve: Vec<DefectResult>,
    /// Interior local minima of the curve, refined by golden-section search
    /// on their bracketing grid interval.
    pub minima: Vec<DefectResult>,
}

impl DefectSweep {
    /// Smallest defect seen on the grid or at a refined minimum.
    pub fn min_defect(&self) -> f64 {
        self.curve.iter().chain(&self.minima).map(|r| r.defect).fold(f64::INFINITY, f64::min)
    }
}

pub fn defect_sweep(
    shape: &Shape,
    k_min: f64,
    k_max: f64,
    k_step: f64,
    l_max: usize,
    res: &Resolution,
) -> Result<DefectSweep> {
    let ks = k_grid(k_min, k_max, k_step)?;
    let problem = DefectProblem::new(shape, l_max, res)?;
    let curve = ks.par_iter().map(|&k| problem.eval(k)).collect::<Result<Vec<_>>>()?;
    let d: Vec<f64> = curve.iter().map(|r| r.defect).collect();
    let interior: Vec<usize> =
        (1..d.len().saturating_sub(1)).filter(|&i| d[i] <= d[i - 1] && d[i] < d[i + 1]).collect();
    let minima = interior
        .par_iter()
        .map(|&i| {
            let (k, _) = golden_section_min(
                |k| problem.eval(k).map(|r| r.defect).unwrap_or(f64::INFINITY),
                ks[i - 1],
                ks[i + 1],
                1e-10 * ks[i],
            );
            problem.eval(k)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DefectSweep { curve, minima })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ellipsoid, HarmonicPerturbation};
    use nalgebra::Rotation3;

    const J1_ROOTS: [f64; 2] = [4.493409457909064, 7.725251836937707];

    fn coarse() -> Resolution {
        Resolution { grid_degree: 24, radial_order: 20, mesh_order: 3 }
    }

    #[test]
    fn ball_at_j1_root_is_solvable() {
        let ball = Shape::ball(1.0).unwrap();
        let r = mps_defect(&ball, J1_ROOTS[0], 6, &Resolution::default()).unwrap();
        assert!(r.defect < 1e-6, "{}", r.defect);
        // The minimizer is the monopole.
        assert!(r.coefficients[0].abs() > 1.0 - 1e-8);
        assert!(r.neumann_misfit < 1e-8 && r.dirichlet_misfit < 1e-8);
        let expected = spherical_bessel_j(0, J1_ROOTS[0]) / (4.0 * std::f64::consts::PI).sqrt();
        assert!((r.boundary_constant - expected).abs() < 1e-10);
    }

    #[test]
    fn ball_off_root_is_not_solvable() {
        let ball = Shape::ball(1.0).unwrap();
        let r = mps_defect(&ball, 3.0, 6, &Resolution::default()).unwrap();
        assert!(r.defect > 1e-2, "{}", r.defect);
        assert!((r.coefficients.iter().map(|c| c * c).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ball_defect_small_for_every_degree() {
        let ball = Shape::ball(1.0).unwrap();
        for l in 2..=6 {
            assert!(mps_defect(&ball, J1_ROOTS[1], l, &coarse()).unwrap().defect < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let ball = Shape::ball(1.0).unwrap();
        assert!(mps_defect(&ball, 3.0, 1, &coarse()).is_err());
        assert!(mps_defect(&ball, 0.0, 4, &coarse()).is_err());
    }

    #[test]
    fn grid_is_raised_to_oversample() {
        let ball = Shape::ball(1.0).unwrap();
        let low = Resolution { grid_degree: 2, radial_order: 4, mesh_order: 1 };
        let p = DefectProblem::new(&ball, 8, &low).unwrap();
        assert!(p.samples().len() >= 4 * 81);
    }

    #[test]
    fn defect_is_rotation_invariant() {
        let rot = Rotation3::from_euler_angles(0.3, -1.1, 0.7).into_inner();
        let plain = Shape::ellipsoid([1.0, 0.9, 1.3]).unwrap();
        let turned = Shape::Ellipsoid(Ellipsoid::new([1.0, 0.9, 1.3], Vec3::zeros(), rot).unwrap());
        for k in [3.3, 5.0] {
            let a = mps_defect(&plain, k, 5, &coarse()).unwrap().defect;
            let b = mps_defect(&turned, k, 5, &coarse()).unwrap().defect;
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }

    #[test]
    fn defect_is_translation_invariant() {
        let ell = Shape::ellipsoid([1.0, 0.9, 1.3]).unwrap();
        let moved = ell.shift_origin(&Vec3::new(3.0, -1.0, 2.0));
        let a = mps_defect(&ell, 4.0, 5, &coarse()).unwrap().defect;
        let b = mps_defect(&moved, 4.0, 5, &coarse()).unwrap().defect;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn sweep_finds_ball_minima_and_scales() {
        let sweep = defect_sweep(&Shape::ball(1.0).unwrap(), 4.0, 8.0, 0.1, 4, &coarse()).unwrap();
        let deep: Vec<f64> = sweep.minima.iter().filter(|r| r.defect < 1e-6).map(|r| r.k).collect();
        assert_eq!(deep.len(), 2);
        for (k, root) in deep.iter().zip(J1_ROOTS) {
            assert!((k - root).abs() < 1e-4);
        }
        let small = defect_sweep(&Shape::ball(0.5).unwrap(), 8.0, 16.0, 0.2, 4, &coarse()).unwrap();
        let deep: Vec<f64> = small.minima.iter().filter(|r| r.defect < 1e-6).map(|r| r.k).collect();
        assert_eq!(deep.len(), 2);
        for (k, root) in deep.iter().zip(J1_ROOTS) {
            assert!((k - 2.0 * root).abs() < 2e-4);
        }
    }

    #[test]
    fn star_perturbation_lifts_the_minimum() {
        let star = Shape::star(1.0, vec![HarmonicPerturbation { l: 2, m: 0, eps: 0.05 }]).unwrap();
        let ball = defect_sweep(&Shape::ball(1.0).unwrap(), 4.2, 4.8, 0.05, 6, &coarse()).unwrap();
        let pert = defect_sweep(&star, 4.2, 4.8, 0.05, 6, &coarse()).unwrap();
        assert!(pert.min_defect() > 10.0 * ball.min_defect());
    }
}
