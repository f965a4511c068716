use std::f64::consts::PI;

use super::{Shape, SurfaceSample};
use crate::numerics::find_roots;
use crate::{Error, Result, Vec3};

pub const DEFAULT_SILHOUETTE_MERIDIANS: usize = 64;
pub const DEFAULT_SILHOUETTE_TOL: f64 = 1e-10;

const MERIDIAN_SCAN: usize = 129;

/// Boundary points whose outward normal is orthogonal to `p`: the contact set
/// of the tangent lines parallel to `p`.
///
/// Each of `n_meridians` half great circles from `p` to `−p` (in the
/// parametrizing direction) is scanned for sign changes of `N · p`, which are
/// bisected. Every root with `|N · p| < tol` is returned, so non-convex shapes
/// can contribute several points per meridian. The sample weight is the area
/// factor `dS/dΩ` at the point. An empty result flags a degenerate direction.
pub fn silhouette_points(shape: &Shape, p: &Vec3, n_meridians: usize, tol: f64) -> Result<Vec<SurfaceSample>> {
    if !shape.is_parametric() {
        return Err(Error::UnsupportedShape { expected: "parametric shape", got: shape.kind() });
    }
    let norm = p.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("silhouette direction is zero".into()));
    }
    let p = p / norm;
    let helper = if p[0].abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = p.cross(&helper).normalize();
    let e2 = p.cross(&e1);

    let mut out = Vec::new();
    for j in 0..n_meridians {
        let phi = 2.0 * PI * j as f64 / n_meridians as f64;
        let axis = e1 * phi.cos() + e2 * phi.sin();
        let direction = |t: f64| axis * t.sin() + p * t.cos();
        let g = |t: f64| {
            shape
                .boundary_at(&direction(t))
                .map(|b| b.normal.dot(&p))
                .unwrap_or(f64::NAN)
        };
        let roots = find_roots(g, 1e-9, PI - 1e-9, MERIDIAN_SCAN, tol);
        for &t in &roots.roots {
            let b = shape.boundary_at(&direction(t))?;
            out.push(SurfaceSample { point: b.point, normal: b.normal, weight: b.area_factor });
        }
    }
    Ok(out)
}
