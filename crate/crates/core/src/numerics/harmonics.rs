//! Real spherical harmonics through their solid (polynomial) form.
//!
//! `R_lm(x) = |x|^l Y_lm(x̂)` is a homogeneous polynomial, so it and its
//! gradient are evaluated in Cartesian coordinates with no pole singularity:
//!
//! ```text
//! R_lm = N_lm · Π_l^|m|(z, r²) · { Re (x+iy)^|m|   m ≥ 0
//!                                 { Im (x+iy)^|m|   m < 0
//! ```
//!
//! where `Π_l^m = r^{l-m} P_l^{(m)}(z/r)` satisfies the associated Legendre
//! recurrence in `l`. No Condon–Shortley phase.

use std::f64::consts::PI;

use crate::{Error, Result, Vec3};

/// Flat index of `(l, m)`: `l² + l + m`.
#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Number of `(l, m)` pairs with `l ≤ l_max`.
#[inline]
pub fn harmonic_count(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Orthonormal real harmonic `Y_lm` at a direction (normalized internally).
pub fn real_spherical_harmonic(l: usize, m: i64, direction: &Vec3) -> Result<f64> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::InvalidArgument(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let norm = direction.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("zero direction".into()));
    }
    Ok(solid_harmonics(l, &(direction / norm))[lm_index(l, m)])
}

/// All `R_lm(x)` for `l ≤ l_max`, indexed by [`lm_index`].
pub fn solid_harmonics(l_max: usize, x: &Vec3) -> Vec<f64> {
    let mut values = vec![0.0; harmonic_count(l_max)];
    fill(l_max, x, &mut values, None);
    values
}

/// All `R_lm(x)` and `∇R_lm(x)`.
pub fn solid_harmonics_with_gradient(l_max: usize, x: &Vec3) -> (Vec<f64>, Vec<Vec3>) {
    let n = harmonic_count(l_max);
    let mut values = vec![0.0; n];
    let mut grads = vec![Vec3::zeros(); n];
    fill(l_max, x, &mut values, Some(&mut grads));
    (values, grads)
}

fn fill(l_max: usize, x: &Vec3, values: &mut [f64], mut grads: Option<&mut [Vec3]>) {
    let (px, py, pz) = (x[0], x[1], x[2]);
    let rho = px * px + py * py + pz * pz;
    let with_grad = grads.is_some();

    // (x + iy)^m as (C_m, S_m) with gradients.
    let mut c = vec![0.0; l_max + 1];
    let mut s = vec![0.0; l_max + 1];
    c[0] = 1.0;
    for m in 1..=l_max {
        c[m] = px * c[m - 1] - py * s[m - 1];
        s[m] = px * s[m - 1] + py * c[m - 1];
    }

    let mut pi = vec![0.0; l_max + 1];
    let mut dpi_dz = vec![0.0; l_max + 1];
    let mut dpi_drho = vec![0.0; l_max + 1];

    let mut pi_mm = 1.0;
    for m in 0..=l_max {
        if m > 0 {
            pi_mm *= (2 * m - 1) as f64;
        }
        // Π_l^m for l = m..=l_max, stored at index l.
        pi[m] = pi_mm;
        dpi_dz[m] = 0.0;
        dpi_drho[m] = 0.0;
        if m < l_max {
            let a = (2 * m + 1) as f64;
            pi[m + 1] = a * pz * pi_mm;
            dpi_dz[m + 1] = a * pi_mm;
            dpi_drho[m + 1] = 0.0;
        }
        for l in (m + 2)..=l_max {
            let a = (2 * l - 1) as f64;
            let b = (l + m - 1) as f64;
            let d = (l - m) as f64;
            pi[l] = (a * pz * pi[l - 1] - b * rho * pi[l - 2]) / d;
            if with_grad {
                dpi_dz[l] = (a * (pi[l - 1] + pz * dpi_dz[l - 1]) - b * rho * dpi_dz[l - 2]) / d;
                dpi_drho[l] = (a * pz * dpi_drho[l - 1] - b * (pi[l - 2] + rho * dpi_drho[l - 2])) / d;
            }
        }

        for l in m..=l_max {
            let norm = normalization(l, m);
            let grad_pi = Vec3::new(
                2.0 * px * dpi_drho[l],
                2.0 * py * dpi_drho[l],
                dpi_dz[l] + 2.0 * pz * dpi_drho[l],
            );
            if m == 0 {
                let idx = lm_index(l, 0);
                values[idx] = norm * pi[l];
                if let Some(g) = grads.as_deref_mut() {
                    g[idx] = grad_pi * norm;
                }
                continue;
            }
            let mf = m as f64;
            let cos_idx = lm_index(l, m as i64);
            let sin_idx = lm_index(l, -(m as i64));
            values[cos_idx] = norm * pi[l] * c[m];
            values[sin_idx] = norm * pi[l] * s[m];
            if let Some(g) = grads.as_deref_mut() {
                let grad_c = Vec3::new(mf * c[m - 1], -mf * s[m - 1], 0.0);
                let grad_s = Vec3::new(mf * s[m - 1], mf * c[m - 1], 0.0);
                g[cos_idx] = (grad_pi * c[m] + grad_c * pi[l]) * norm;
                g[sin_idx] = (grad_pi * s[m] + grad_s * pi[l]) * norm;
            }
        }
    }
}

fn normalization(l: usize, m: usize) -> f64 {
    // (l-m)!/(l+m)! as a running product to stay in range.
    let mut ratio = 1.0;
    for j in (l - m + 1)..=(l + m) {
        ratio /= j as f64;
    }
    let base = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
    if m == 0 {
        base
    } else {
        base * std::f64::consts::SQRT_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sphere_grid;

    #[test]
    fn y00_is_constant() {
        let y = real_spherical_harmonic(0, 0, &Vec3::new(0.3, -0.2, 0.9)).unwrap();
        assert!((y - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn y10_at_north_pole() {
        let y = real_spherical_harmonic(1, 0, &Vec3::z()).unwrap();
        assert!((y - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_m_above_l() {
        assert!(real_spherical_harmonic(2, 3, &Vec3::z()).is_err());
        assert!(real_spherical_harmonic(2, -3, &Vec3::z()).is_err());
    }

    #[test]
    fn orthonormal_on_grid() {
        let grid = sphere_grid(20);
        let tables: Vec<Vec<f64>> = grid.directions.iter().map(|d| solid_harmonics(10, d)).collect();
        let n = harmonic_count(10);
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = tables.iter().zip(&grid.weights).map(|(t, w)| w * t[a] * t[b]).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-10, "({a},{b}): {dot}");
            }
        }
    }

    #[test]
    fn solid_harmonics_are_homogeneous() {
        let x = Vec3::new(0.4, -0.7, 0.2);
        let a = solid_harmonics(6, &x);
        let b = solid_harmonics(6, &(x * 2.5));
        for l in 0..=6usize {
            for m in -(l as i64)..=(l as i64) {
                let i = lm_index(l, m);
                assert!((b[i] - 2.5f64.powi(l as i32) * a[i]).abs() < 1e-12 * b[i].abs().max(1.0));
            }
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let x = Vec3::new(0.31, -0.52, 0.77);
        let (_, grads) = solid_harmonics_with_gradient(7, &x);
        let h = 1e-6;
        for axis in 0..3 {
            let mut e = Vec3::zeros();
            e[axis] = h;
            let plus = solid_harmonics(7, &(x + e));
            let minus = solid_harmonics(7, &(x - e));
            for i in 0..harmonic_count(7) {
                let fd = (plus[i] - minus[i]) / (2.0 * h);
                assert!((grads[i][axis] - fd).abs() < 1e-7 * fd.abs().max(1.0), "i={i} axis={axis}");
            }
        }
    }

    #[test]
    fn solid_harmonics_are_harmonic() {
        // Laplacian of a homogeneous harmonic polynomial vanishes.
        let x = Vec3::new(0.2, 0.5, -0.4);
        let center = solid_harmonics(5, &x);
        let laplacian = |h: f64| {
            let mut lap = vec![0.0; center.len()];
            for axis in 0..3 {
                let mut e = Vec3::zeros();
                e[axis] = h;
                let p = solid_harmonics(5, &(x + e));
                let m = solid_harmonics(5, &(x - e));
                for i in 0..lap.len() {
                    lap[i] += (p[i] - 2.0 * center[i] + m[i]) / (h * h);
                }
            }
            lap
        };
        // Richardson extrapolation removes the h² term; the h⁴ term involves
        // sixth derivatives, which vanish for degree 5.
        let (coarse, fine) = (laplacian(2e-2), laplacian(1e-2));
        let lap: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
        let worst = lap.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(worst < 1e-6, "worst={worst}");
    }
}
