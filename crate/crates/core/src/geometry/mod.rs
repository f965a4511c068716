//! Bounded domains in ℝ³ and quadrature samples on their boundary and interior.
//!
//! Parametric shapes (balls, ellipsoids, star shapes) are parametrized by the
//! unit sphere: a direction `u` maps to the boundary point `s(u)`. Surface
//! samples are the [`sphere_grid`] pushed through that map with the exact area
//! factor `dS/dΩ`, so smooth integrands converge spectrally. Meshes use
//! per-triangle and per-tetrahedron collapsed Gauss rules.

mod mesh;
mod silhouette;

use std::f64::consts::PI;

use nalgebra::Matrix3;

use crate::numerics::{gauss_legendre, lm_index, solid_harmonics_with_gradient, sphere_grid};
use crate::{Error, Result, Vec3};

pub use mesh::{load_mesh, parse_off, MeshError, TriMesh};
pub use silhouette::{silhouette_points, DEFAULT_SILHOUETTE_MERIDIANS, DEFAULT_SILHOUETTE_TOL};

/// Sampling resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    /// Exactness degree of the spherical grid used for parametric shapes.
    pub grid_degree: usize,
    /// Gauss order of the radial rule inside parametric shapes.
    pub radial_order: usize,
    /// Gauss order per axis of the triangle and tetrahedron rules on meshes.
    pub mesh_order: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { grid_degree: 40, radial_order: 40, mesh_order: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub radius: f64,
    pub center: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub semi_axes: [f64; 3],
    pub center: Vec3,
    /// Orthonormal frame; column `i` is the direction of semi-axis `i`.
    pub frame: Matrix3<f64>,
}

/// One term `ε Y_lm` of a star-shape radial perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicPerturbation {
    pub l: usize,
    pub m: i64,
    pub eps: f64,
}

/// Boundary `r = ρ(u) = R₀ (1 + Σ ε_lm Y_lm(u))` around `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarShape {
    pub base_radius: f64,
    pub terms: Vec<HarmonicPerturbation>,
    pub center: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    Star(StarShape),
    Mesh(TriMesh),
}

/// Boundary quadrature node. `normal` points out of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    pub point: Vec3,
    pub normal: Vec3,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeSample {
    pub point: Vec3,
    pub weight: f64,
}

/// Boundary point of a parametric shape at polar angles `(θ, φ)` of the
/// parametrizing direction, with both coordinate tangents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub theta: f64,
    pub phi: f64,
    pub point: Vec3,
    pub s_theta: Vec3,
    pub s_phi: Vec3,
    pub normal: Vec3,
    /// `dS / dΩ` at this point.
    pub area_factor: f64,
}

/// Point, outward normal and area factor `dS/dΩ` over a direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub point: Vec3,
    pub normal: Vec3,
    pub area_factor: f64,
}

impl Ball {
    pub fn new(radius: f64, center: Vec3) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidShape(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { radius, center })
    }
}

impl Ellipsoid {
    pub fn new(semi_axes: [f64; 3], center: Vec3, frame: Matrix3<f64>) -> Result<Self> {
        if semi_axes.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidShape(format!("semi-axes must be positive, got {semi_axes:?}")));
        }
        let gram = frame.transpose() * frame;
        if (gram - Matrix3::identity()).amax() > 1e-12 || frame.determinant() < 0.0 {
            return Err(Error::InvalidShape("ellipsoid frame must be a rotation".into()));
        }
        Ok(Self { semi_axes, center, frame })
    }

    /// The linear part `M = Q · diag(a, b, c)` of the map from the unit ball.
    pub fn linear_map(&self) -> Matrix3<f64> {
        let [a, b, c] = self.semi_axes;
        self.frame * Matrix3::from_diagonal(&Vec3::new(a, b, c))
    }

    pub fn volume(&self) -> f64 {
        4.0 * PI / 3.0 * self.semi_axes.iter().product::<f64>()
    }
}

impl StarShape {
    /// Validates `|m| ≤ l` and `ρ > 0` on a dense direction grid.
    pub fn new(base_radius: f64, terms: Vec<HarmonicPerturbation>, center: Vec3) -> Result<Self> {
        if !(base_radius > 0.0 && base_radius.is_finite()) {
            return Err(Error::InvalidShape(format!("base radius must be positive, got {base_radius}")));
        }
        if let Some(t) = terms.iter().find(|t| t.m.unsigned_abs() as usize > t.l) {
            return Err(Error::InvalidShape(format!("harmonic (l={}, m={}) has |m| > l", t.l, t.m)));
        }
        let shape = Self { base_radius, terms, center };
        let check = sphere_grid((4 * shape.l_max()).max(60));
        for d in &check.directions {
            let (rho, _) = shape.radius_and_surface_gradient(d);
            if rho <= 0.0 {
                return Err(Error::InvalidShape(format!(
                    "radial function is not positive (ρ = {rho:.3e} at direction {:?})",
                    d.as_slice()
                )));
            }
        }
        Ok(shape)
    }

    pub fn l_max(&self) -> usize {
        self.terms.iter().map(|t| t.l).max().unwrap_or(0)
    }

    /// `ρ(u)` and its surface gradient `∇_S ρ(u)` for a unit `u`.
    ///
    /// Uses `∇_S Y_lm(u) = ∇R_lm(u) − l Y_lm(u) u` for the solid harmonic
    /// `R_lm`, which is exact and regular at the poles.
    pub fn radius_and_surface_gradient(&self, u: &Vec3) -> (f64, Vec3) {
        let (values, grads) = solid_harmonics_with_gradient(self.l_max(), u);
        let mut rho = 1.0;
        let mut grad = Vec3::zeros();
        for t in &self.terms {
            let i = lm_index(t.l, t.m);
            rho += t.eps * values[i];
            grad += (grads[i] - u * (t.l as f64 * values[i])) * t.eps;
        }
        (self.base_radius * rho, grad * self.base_radius)
    }
}

fn polar_frame(theta: f64, phi: f64) -> (Vec3, Vec3, Vec3) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let u = Vec3::new(st * cp, st * sp, ct);
    let e_theta = Vec3::new(ct * cp, ct * sp, -st);
    let e_phi = Vec3::new(-sp, cp, 0.0);
    (u, e_theta, e_phi)
}

impl Shape {
    pub fn ball(radius: f64) -> Result<Self> {
        Ok(Shape::Ball(Ball::new(radius, Vec3::zeros())?))
    }

    /// Axis-aligned ellipsoid centered at the origin.
    pub fn ellipsoid(semi_axes: [f64; 3]) -> Result<Self> {
        Ok(Shape::Ellipsoid(Ellipsoid::new(semi_axes, Vec3::zeros(), Matrix3::identity())?))
    }

    /// Star shape centered at the origin.
    pub fn star(base_radius: f64, terms: Vec<HarmonicPerturbation>) -> Result<Self> {
        Ok(Shape::Star(StarShape::new(base_radius, terms, Vec3::zeros())?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Ball(_) => "ball",
            Shape::Ellipsoid(_) => "ellipsoid",
            Shape::Star(_) => "star",
            Shape::Mesh(_) => "mesh",
        }
    }

    pub fn is_parametric(&self) -> bool {
        !matches!(self, Shape::Mesh(_))
    }

    /// Reference point: the center of parametric shapes, the vertex
    /// centroid of meshes.
    pub fn center(&self) -> Vec3 {
        match self {
            Shape::Ball(b) => b.center,
            Shape::Ellipsoid(e) => e.center,
            Shape::Star(s) => s.center,
            Shape::Mesh(m) => m.vertex_centroid(),
        }
    }

    /// Exact volume where a closed form exists.
    pub fn exact_volume(&self) -> Option<f64> {
        match self {
            Shape::Ball(b) => Some(4.0 * PI / 3.0 * b.radius.powi(3)),
            Shape::Ellipsoid(e) => Some(e.volume()),
            Shape::Star(_) => None,
            Shape::Mesh(m) => Some(m.signed_volume()),
        }
    }

    /// Boundary point over the unit direction `u` (parametric shapes only).
    pub fn boundary_at(&self, u: &Vec3) -> Result<BoundaryPoint> {
        match self {
            Shape::Ball(b) => Ok(BoundaryPoint {
                point: b.center + u * b.radius,
                normal: *u,
                area_factor: b.radius * b.radius,
            }),
            Shape::Ellipsoid(e) => {
                let [a, b, c] = e.semi_axes;
                let g = Vec3::new(u[0] / a, u[1] / b, u[2] / c);
                let g_norm = g.norm();
                Ok(BoundaryPoint {
                    point: e.center + e.linear_map() * u,
                    normal: e.frame * g / g_norm,
                    area_factor: a * b * c * g_norm,
                })
            }
            Shape::Star(s) => {
                let (rho, grad) = s.radius_and_surface_gradient(u);
                let n = u * rho - grad;
                let n_norm = n.norm();
                Ok(BoundaryPoint {
                    point: s.center + u * rho,
                    normal: n / n_norm,
                    area_factor: rho * n_norm,
                })
            }
            Shape::Mesh(_) => Err(self.not_parametric()),
        }
    }

    pub fn param_point(&self, theta: f64, phi: f64) -> Result<ParamPoint> {
        let (u, e_theta, e_phi) = polar_frame(theta, phi);
        let bp = self.boundary_at(&u)?;
        let sin_t = theta.sin();
        let (s_theta, s_phi) = match self {
            Shape::Ball(b) => (e_theta * b.radius, e_phi * (b.radius * sin_t)),
            Shape::Ellipsoid(e) => {
                let m = e.linear_map();
                (m * e_theta, m * e_phi * sin_t)
            }
            Shape::Star(s) => {
                let (rho, grad) = s.radius_and_surface_gradient(&u);
                let rho_theta = grad.dot(&e_theta);
                let rho_phi = sin_t * grad.dot(&e_phi);
                (u * rho_theta + e_theta * rho, u * rho_phi + e_phi * (rho * sin_t))
            }
            Shape::Mesh(_) => unreachable!("boundary_at rejects meshes"),
        };
        Ok(ParamPoint {
            theta,
            phi,
            point: bp.point,
            s_theta,
            s_phi,
            normal: bp.normal,
            area_factor: bp.area_factor,
        })
    }

    /// Parametric points on the degree-`p` grid with their solid-angle weights.
    pub fn param_points(&self, grid_degree: usize) -> Result<Vec<(ParamPoint, f64)>> {
        let grid = sphere_grid(grid_degree);
        (0..grid.len())
            .map(|i| Ok((self.param_point(grid.thetas[i], grid.phis[i])?, grid.weights[i])))
            .collect()
    }

    pub fn surface_samples(&self, res: &Resolution) -> Result<Vec<SurfaceSample>> {
        if let Shape::Mesh(m) = self {
            return Ok(m.surface_samples(res.mesh_order));
        }
        let grid = sphere_grid(res.grid_degree);
        grid.directions
            .iter()
            .zip(&grid.weights)
            .map(|(u, &w)| {
                let bp = self.boundary_at(u)?;
                Ok(SurfaceSample { point: bp.point, normal: bp.normal, weight: w * bp.area_factor })
            })
            .collect()
    }

    pub fn volume_samples(&self, res: &Resolution) -> Result<Vec<VolumeSample>> {
        let radial = gauss_legendre(res.radial_order);
        let radial: Vec<(f64, f64)> = radial.on_interval(0.0, 1.0).collect();
        let grid = sphere_grid(res.grid_degree);
        let mut out = Vec::with_capacity(grid.len() * radial.len());
        match self {
            Shape::Mesh(m) => return Ok(m.volume_samples(res.mesh_order, res.radial_order)),
            Shape::Ellipsoid(e) => {
                let map = e.linear_map();
                let det: f64 = e.semi_axes.iter().product();
                for (u, &w) in grid.directions.iter().zip(&grid.weights) {
                    let mu = map * u;
                    for &(t, wt) in &radial {
                        out.push(VolumeSample { point: e.center + mu * t, weight: det * w * wt * t * t });
                    }
                }
            }
            Shape::Ball(_) | Shape::Star(_) => {
                let center = self.center();
                for (u, &w) in grid.directions.iter().zip(&grid.weights) {
                    let rho = (self.boundary_at(u)?.point - center).norm();
                    let rho3 = rho * rho * rho;
                    for &(t, wt) in &radial {
                        out.push(VolumeSample { point: center + u * (t * rho), weight: rho3 * w * wt * t * t });
                    }
                }
            }
        }
        Ok(out)
    }

    /// The same geometry moved so every boundary point `s` becomes `s + a`.
    pub fn shift_origin(&self, a: &Vec3) -> Shape {
        match self {
            Shape::Ball(b) => Shape::Ball(Ball { center: b.center + a, ..b.clone() }),
            Shape::Ellipsoid(e) => Shape::Ellipsoid(Ellipsoid { center: e.center + a, ..e.clone() }),
            Shape::Star(s) => Shape::Star(StarShape { center: s.center + a, ..s.clone() }),
            Shape::Mesh(m) => Shape::Mesh(m.translated(a)),
        }
    }

    fn not_parametric(&self) -> Error {
        Error::UnsupportedShape { expected: "parametric shape", got: self.kind() }
    }
}

/// `[s, N]` at each sample, with `s` measured from the coordinate origin.
pub fn cross_field(samples: &[SurfaceSample]) -> Vec<Vec3> {
    samples.iter().map(|s| s.point.cross(&s.normal)).collect()
}

/// Diagnostics from the sphere characterization: on a sphere centered at the
/// origin `s · s_θ = s · s_φ = 0` and `|s|²` is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericityDiagnostics {
    pub max_dot_theta: f64,
    pub max_dot_phi: f64,
    /// Solid-angle weighted variance of `|s|²`.
    pub radius_sq_variance: f64,
}

impl SphericityDiagnostics {
    pub fn max(&self) -> f64 {
        self.max_dot_theta.max(self.max_dot_phi).max(self.radius_sq_variance)
    }

    pub fn is_sphere(&self, tol: f64) -> bool {
        self.max() < tol
    }
}

pub fn sphericity_check(shape: &Shape, grid_degree: usize) -> Result<SphericityDiagnostics> {
    let points = shape.param_points(grid_degree)?;
    let mut max_dot_theta: f64 = 0.0;
    let mut max_dot_phi: f64 = 0.0;
    let (mut sum, mut sum_sq, mut total) = (0.0, 0.0, 0.0);
    for (p, w) in &points {
        max_dot_theta = max_dot_theta.max(p.point.dot(&p.s_theta).abs());
        max_dot_phi = max_dot_phi.max(p.point.dot(&p.s_phi).abs());
        let r2 = p.point.norm_squared();
        sum += w * r2;
        sum_sq += w * r2 * r2;
        total += w;
    }
    let mean = sum / total;
    Ok(SphericityDiagnostics {
        max_dot_theta,
        max_dot_phi,
        radius_sq_variance: (sum_sq / total - mean * mean).max(0.0),
    })
}
