use std::f64::consts::PI;

use crate::Vec3;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.on_interval(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `n`-point Gauss–Legendre rule, exact for polynomials of degree `2n - 1`.
///
/// Nodes come from Newton iteration on `P_n` started at the Tricomi
/// approximation; the rule is symmetrized so `x_i = -x_{n-1-i}` holds exactly.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn gauss_legendre(n: usize) -> Quadrature1D {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        if dp != 0.0 {
            deriv = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Quadrature1D { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Product quadrature on the unit sphere.
///
/// Directions are stored ring by ring: the polar index varies slowest.
#[derive(Debug, Clone)]
pub struct SphericalGrid {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// Harmonic degree integrated exactly.
    pub degree: usize,
}

impl SphericalGrid {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn integrate<F: Fn(&Vec3) -> f64>(&self, f: F) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w * f(d))
            .sum()
    }
}

/// Gauss–Legendre in `cos θ` times the uniform rule in `φ`.
///
/// With `p/2 + 1` rings and twice as many azimuths the rule integrates every
/// polynomial of degree `≤ p` on the sphere exactly; `p = 30` gives 512 points.
pub fn sphere_grid(p: usize) -> SphericalGrid {
    let n_theta = p / 2 + 1;
    let n_phi = 2 * n_theta;
    let rule = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut grid = SphericalGrid {
        directions: Vec::with_capacity(n_theta * n_phi),
        weights: Vec::with_capacity(n_theta * n_phi),
        thetas: Vec::with_capacity(n_theta * n_phi),
        phis: Vec::with_capacity(n_theta * n_phi),
        degree: 2 * n_theta - 1,
    };
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let theta = t.acos();
        let sin_t = (1.0 - t * t).max(0.0).sqrt();
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            grid.directions
                .push(Vec3::new(sin_t * phi.cos(), sin_t * phi.sin(), t));
            grid.weights.push(w * dphi);
            grid.thetas.push(theta);
            grid.phis.push(phi);
        }
    }
    grid
}
