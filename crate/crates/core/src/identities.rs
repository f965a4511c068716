//! Boundary and volume identities behind the symmetry argument, evaluated
//! by quadrature so each can be checked against its closed form or against
//! a second, independent route.
//!
//! Complex quantities are compared on real and imaginary parts separately.

use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, Unit};
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::{
    silhouette_points, Resolution, Shape, SurfaceSample, VolumeSample, DEFAULT_SILHOUETTE_MERIDIANS,
    DEFAULT_SILHOUETTE_TOL,
};
use crate::helmholtz::{BallEigenfunction, CVec3, Field, HelmholtzField};
use crate::numerics::{least_squares_solve, min_eigenvalue_symmetric};
use crate::{Error, Result, Vec3};

/// Relative tolerance on wavenumbers that are required to coincide.
pub const WAVENUMBER_MATCH_TOL: f64 = 1e-9;

/// Outcome of one numerical identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub name: String,
    /// Left-hand side, complex entries flattened to `[re, im]` pairs.
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Largest componentwise `|lhs − rhs|`.
    pub abs_discrepancy: f64,
    /// `abs_discrepancy / scale`.
    pub rel_discrepancy: f64,
    /// Reference magnitude, typically `|D|` or 1.
    pub scale: f64,
    /// Bound on `rel_discrepancy`.
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(name: impl Into<String>, lhs: Vec<f64>, rhs: Vec<f64>, scale: f64, tolerance: f64) -> Self {
        assert_eq!(lhs.len(), rhs.len(), "sides of an identity must have the same shape");
        let abs_discrepancy = lhs.iter().zip(&rhs).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max);
        let rel_discrepancy = abs_discrepancy / scale;
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_discrepancy,
            rel_discrepancy,
            scale,
            tolerance,
            pass: rel_discrepancy <= tolerance,
        }
    }

    pub fn complex(name: impl Into<String>, lhs: &[Complex64], rhs: &[Complex64], scale: f64, tolerance: f64) -> Self {
        let flat = |v: &[Complex64]| v.iter().flat_map(|z| [z.re, z.im]).collect();
        Self::new(name, flat(lhs), flat(rhs), scale, tolerance)
    }

    /// `|value| ≤ tolerance · scale`.
    pub fn vanishes(name: impl Into<String>, value: &[Complex64], scale: f64, tolerance: f64) -> Self {
        Self::complex(name, value, &vec![Complex64::new(0.0, 0.0); value.len()], scale, tolerance)
    }
}

/// A shape with its volume and surface quadratures.
#[derive(Debug, Clone)]
pub struct Domain {
    pub shape: Shape,
    pub volume: Vec<VolumeSample>,
    pub surface: Vec<SurfaceSample>,
    /// `|D|` from the volume rule.
    pub measure: f64,
}

impl Domain {
    pub fn new(shape: Shape, res: &Resolution) -> Result<Self> {
        let volume = shape.volume_samples(res)?;
        let surface = shape.surface_samples(res)?;
        let measure = volume.iter().map(|s| s.weight).sum();
        Ok(Self { shape, volume, surface, measure })
    }

    pub fn area(&self) -> f64 {
        self.surface.iter().map(|s| s.weight).sum()
    }
}

/// `∫_D U dx`.
pub fn integral_over_domain<F: Field + ?Sized>(u: &F, domain: &Domain) -> Complex64 {
    domain.volume.iter().map(|s| u.value(&s.point) * s.weight).sum()
}

/// `∫_D x × ∇U dx`; its dot product with `α` is `∫_D ∇U · (α × x) dx`.
pub fn rotational_moment<F: Field + ?Sized>(u: &F, domain: &Domain) -> CVec3 {
    domain.volume.iter().fold(CVec3::zeros(), |acc, s| {
        let g = u.gradient(&s.point);
        let x = s.point.map(|c| Complex64::new(c, 0.0));
        acc + x.cross(&g) * Complex64::new(s.weight, 0.0)
    })
}

/// `∫_D ∇U · (α × x) dx`.
pub fn rotational_derivative_integral<F: Field + ?Sized>(u: &F, alpha: &Vec3, domain: &Domain) -> Complex64 {
    domain
        .volume
        .iter()
        .map(|s| {
            let t = alpha.cross(&s.point);
            let g = u.gradient(&s.point);
            (g[0] * t[0] + g[1] * t[1] + g[2] * t[2]) * s.weight
        })
        .sum()
}

/// `∫_S U(s) (s × N) ds`.
pub fn surface_moment<F: Field + ?Sized>(u: &F, domain: &Domain) -> CVec3 {
    domain.surface.iter().fold(CVec3::zeros(), |acc, s| {
        let c = s.point.cross(&s.normal) * s.weight;
        let v = u.value(&s.point);
        acc + c.map(|x| v * x)
    })
}

/// Since `div(α × x) = 0`, `∫_D ∇U·(α × x) dx = α · ∫_S U (s × N) ds` for
/// every field and shape. Compares the two quadratures at tolerance
/// `tolerance · |D|`.
pub fn divergence_two_route<F: Field + ?Sized>(u: &F, alpha: &Vec3, domain: &Domain, tolerance: f64) -> IdentityReport {
    let lhs = rotational_derivative_integral(u, alpha, domain);
    let m = surface_moment(u, domain);
    let rhs = m[0] * alpha[0] + m[1] * alpha[1] + m[2] * alpha[2];
    IdentityReport::complex("divergence two-route", &[lhs], &[rhs], domain.measure, tolerance)
}

fn require_ball(shape: &Shape) -> Result<()> {
    match shape {
        Shape::Ball(_) => Ok(()),
        other => Err(Error::UnsupportedShape { expected: "ball", got: other.kind() }),
    }
}

fn require_wavenumber(field: f64, eigen: f64) -> Result<()> {
    if (field - eigen).abs() > WAVENUMBER_MATCH_TOL * eigen {
        return Err(Error::WavenumberMismatch { field, eigen });
    }
    Ok(())
}

/// `∫_S U(s) u_{jN}(s) ds` on a ball, for `U` at the eigenvalue of `u_j`.
///
/// It vanishes: the `(l, m)` component of `U` carries `j_l(k R) = 0` on the
/// sphere and every other component is orthogonal to `Y_lm`.
pub fn boundary_orthogonality<F: HelmholtzField + ?Sized>(
    u: &F,
    eigen: &BallEigenfunction,
    domain: &Domain,
) -> Result<Complex64> {
    require_ball(&domain.shape)?;
    require_wavenumber(u.wavenumber(), eigen.k)?;
    Ok(domain
        .surface
        .iter()
        .map(|s| u.value(&s.point) * (eigen.normal_derivative_at(&s.point) * s.weight))
        .sum())
}

fn require_common_eigenvalue(eigens: &[BallEigenfunction]) -> Result<f64> {
    let first = eigens
        .first()
        .ok_or_else(|| Error::InvalidArgument("need at least one eigenfunction".into()))?;
    for e in eigens {
        require_wavenumber(e.k, first.k)?;
    }
    Ok(first.k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    /// `G_{jj'} = ∫_S u_{jN} u_{j'N} ds`.
    pub matrix: DMatrix<f64>,
    pub min_eigenvalue: f64,
}

/// Gram matrix of the normal-derivative traces of eigenfunctions sharing
/// one eigenvalue; positive definite iff the traces are independent.
pub fn gram_normal_derivatives(eigens: &[BallEigenfunction], domain: &Domain) -> Result<GramReport> {
    require_ball(&domain.shape)?;
    require_common_eigenvalue(eigens)?;
    let j = eigens.len();
    let mut matrix = DMatrix::zeros(j, j);
    for s in &domain.surface {
        let t: Vec<f64> = eigens.iter().map(|e| e.normal_derivative_at(&s.point)).collect();
        for a in 0..j {
            for b in 0..j {
                matrix[(a, b)] += s.weight * t[a] * t[b];
            }
        }
    }
    let min_eigenvalue = min_eigenvalue_symmetric(&matrix);
    Ok(GramReport { matrix, min_eigenvalue })
}

/// `det(u_{jN}(s_m))` with rows indexed by points and columns by
/// eigenfunctions.
pub fn det_sample_matrix(eigens: &[BallEigenfunction], points: &[Vec3]) -> Result<f64> {
    if eigens.len() != points.len() || eigens.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "need as many points as eigenfunctions, got {} and {}",
            points.len(),
            eigens.len()
        )));
    }
    let j = eigens.len();
    let m = DMatrix::from_fn(j, j, |r, c| eigens[c].normal_derivative_at(&points[r]));
    Ok(m.determinant())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantStats {
    pub trials: usize,
    /// Trials with `|det| > threshold`.
    pub above: usize,
    /// `rel_threshold · scale^J`.
    pub threshold: f64,
    /// `max_{j,s} |u_{jN}(s)|` over the surface samples.
    pub scale: f64,
    pub determinants: Vec<f64>,
}

/// Draws `trials` tuples of `J` boundary points, area-uniformly through the
/// surface weights, and counts how many give a sample matrix with
/// `|det| > rel_threshold · scale^J`. Trial `t` uses stream `t` of a ChaCha
/// generator seeded with `seed`, so results do not depend on scheduling.
pub fn det_monte_carlo(
    eigens: &[BallEigenfunction],
    domain: &Domain,
    trials: usize,
    seed: u64,
    rel_threshold: f64,
) -> Result<DeterminantStats> {
    require_ball(&domain.shape)?;
    require_common_eigenvalue(eigens)?;
    let weights = WeightedIndex::new(domain.surface.iter().map(|s| s.weight))
        .map_err(|e| Error::InvalidArgument(format!("surface weights: {e}")))?;
    let scale = domain
        .surface
        .iter()
        .flat_map(|s| eigens.iter().map(|e| e.normal_derivative_at(&s.point).abs()))
        .fold(0.0, f64::max);
    let threshold = rel_threshold * scale.powi(eigens.len() as i32);
    let determinants = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let points: Vec<Vec3> = (0..eigens.len()).map(|_| domain.surface[weights.sample(&mut rng)].point).collect();
            det_sample_matrix(eigens, &points)
        })
        .collect::<Result<Vec<f64>>>()?;
    let above = determinants.iter().filter(|d| d.abs() > threshold).count();
    Ok(DeterminantStats { trials, above, threshold, scale, determinants })
}

/// Least-squares fit of one component of `s × N` onto normal-derivative
/// traces.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossExpansion {
    pub component: usize,
    pub coefficients: Vec<f64>,
    /// `‖fit − (s × N)_component‖_{L²(S)}`.
    pub residual_norm: f64,
}

/// `∂_N u(s)` from the analytic gradient.
pub fn normal_trace<F: Field + ?Sized>(u: &F, s: &SurfaceSample) -> f64 {
    let g = u.gradient(&s.point);
    g[0].re * s.normal[0] + g[1].re * s.normal[1] + g[2].re * s.normal[2]
}

fn fit_onto_traces<F: Field>(trials: &[F], samples: &[SurfaceSample], target: impl Fn(&SurfaceSample) -> f64) -> Result<(Vec<f64>, f64)> {
    let a = DMatrix::from_fn(samples.len(), trials.len(), |i, j| samples[i].weight.sqrt() * normal_trace(&trials[j], &samples[i]));
    let b = DVector::from_fn(samples.len(), |i, _| samples[i].weight.sqrt() * target(&samples[i]));
    let ls = least_squares_solve(&a, &b)?;
    Ok((ls.solution.iter().copied().collect(), ls.residual_norm))
}

/// Fits each component of the cross field `s × N` onto
/// `span{∂_N u_j}`. On a ball centered at the origin the field vanishes
/// and so does the fit; elsewhere the residual is only reported.
pub fn cross_expansion<F: Field>(trials: &[F], samples: &[SurfaceSample]) -> Result<[CrossExpansion; 3]> {
    let fit = |c: usize| -> Result<CrossExpansion> {
        let (coefficients, residual_norm) = fit_onto_traces(trials, samples, |s| s.point.cross(&s.normal)[c])?;
        Ok(CrossExpansion { component: c, coefficients, residual_norm })
    };
    Ok([fit(0)?, fit(1)?, fit(2)?])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationMechanics {
    /// `(s + a) × N = s × N + a × N` over the surface samples.
    pub additivity: IdentityReport,
    /// `(|a'|, max_S |(s + a') × N|)` for `a' = â` scaled to 1, 10, 100.
    pub maxima: Vec<(f64, f64)>,
    /// `max at 100 / max at 10`.
    pub growth_ratio: f64,
    /// The growth ratio against 10, tolerance 0.5.
    pub growth: IdentityReport,
}

/// Moving the origin by `a` adds `a × N` to the cross field; whenever the
/// normal is not constant its maximum grows linearly in `|a|` while the
/// rest stays bounded.
pub fn translation_mechanics_check(samples: &[SurfaceSample], a: &Vec3) -> Result<TranslationMechanics> {
    let norm = a.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidArgument("translation must be nonzero".into()));
    }
    let mut lhs = Vec::with_capacity(3 * samples.len());
    let mut rhs = Vec::with_capacity(3 * samples.len());
    let mut scale: f64 = 0.0;
    for s in samples {
        let moved = (s.point + a).cross(&s.normal);
        let split = s.point.cross(&s.normal) + a.cross(&s.normal);
        lhs.extend(moved.iter());
        rhs.extend(split.iter());
        scale = scale.max(moved.norm()).max(s.point.norm() + norm);
    }
    let additivity = IdentityReport::new("cross-field additivity", lhs, rhs, scale.max(1.0), 1e-14);

    let unit = a / norm;
    let maxima: Vec<(f64, f64)> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&t| {
            let shift = unit * t;
            (t, samples.iter().map(|s| (s.point + shift).cross(&s.normal).norm()).fold(0.0, f64::max))
        })
        .collect();
    let growth_ratio = maxima[2].1 / maxima[1].1;
    let growth = IdentityReport::new("cross-field linear growth", vec![growth_ratio], vec![10.0], 1.0, 0.5);
    Ok(TranslationMechanics { additivity, maxima, growth_ratio, growth })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedIdentity {
    /// `p = q × a`.
    pub p: Vec3,
    pub silhouette_points: usize,
    /// `N · p̂` on the silhouette of `p`, which vanishes by construction.
    pub silhouette: IdentityReport,
    /// Fit of `N · p` over the whole surface onto the trial traces.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    /// `residual_norm / ‖N · p‖_{L²(S)}`.
    pub relative_residual: f64,
}

/// Projects the translated cross-field expansion onto `q`: with
/// `p = q × a`, `q · (a × N) = N · p`, so the identity reads
/// `N · p = Σ B_j u_{jN}`. Builds the silhouette of `p` and fits `N · p`
/// onto the traces of `trials`.
pub fn projected_normal_identity<F: Field>(
    shape: &Shape,
    samples: &[SurfaceSample],
    a: &Vec3,
    q: &Vec3,
    trials: &[F],
) -> Result<ProjectedIdentity> {
    let p = q.cross(a);
    if p.norm() <= 1e-12 * q.norm() * a.norm() || p.norm() == 0.0 {
        return Err(Error::InvalidArgument("q is parallel to a, so p = q × a vanishes".into()));
    }
    let unit = p.normalize();
    let contour = silhouette_points(shape, &p, DEFAULT_SILHOUETTE_MERIDIANS, DEFAULT_SILHOUETTE_TOL)?;
    let on_contour: Vec<f64> = contour.iter().map(|s| s.normal.dot(&unit)).collect();
    let silhouette = IdentityReport::new(
        "normal projection on silhouette",
        on_contour.clone(),
        vec![0.0; on_contour.len()],
        1.0,
        1e-10,
    );
    let (coefficients, residual_norm) = fit_onto_traces(trials, samples, |s| s.normal.dot(&p))?;
    let target_norm = samples.iter().map(|s| s.weight * s.normal.dot(&p).powi(2)).sum::<f64>().sqrt();
    Ok(ProjectedIdentity {
        p,
        silhouette_points: contour.len(),
        silhouette,
        coefficients,
        residual_norm,
        relative_residual: residual_norm / target_norm,
    })
}

/// `x ↦ U(g x)` for a rotation `g`.
#[derive(Debug, Clone)]
pub struct Rotated<F> {
    pub field: F,
    pub rotation: Matrix3<f64>,
}

impl<F: Field> Field for Rotated<F> {
    fn value(&self, x: &Vec3) -> Complex64 {
        self.field.value(&(self.rotation * x))
    }

    fn gradient(&self, x: &Vec3) -> CVec3 {
        let g = self.field.gradient(&(self.rotation * x));
        let rt = self.rotation.transpose();
        CVec3::from_fn(|i, _| (0..3).map(|j| g[j] * rt[(i, j)]).sum())
    }
}

impl<F: HelmholtzField> HelmholtzField for Rotated<F> {
    fn wavenumber(&self) -> f64 {
        self.field.wavenumber()
    }
}

/// A rotation with a random axis and angle.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let axis = loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            break v;
        }
    };
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle).into_inner()
}
