/// Default absolute tolerance for bracketed roots.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Roots located by [`find_roots`], strictly increasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootList {
    pub roots: Vec<f64>,
    /// `|f(root)|` for each root.
    pub residuals: Vec<f64>,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Sign-change scan on `n_scan` equispaced points of `[a, b]`, then bisection.
///
/// Bisection runs until the bracket collapses to adjacent floats, so the
/// reported root is as good as `f` allows. A sign change whose bisected
/// residual exceeds `tol` is a discontinuity, not a root, and is dropped.
pub fn find_roots<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n_scan: usize, tol: f64) -> RootList {
    assert!(a < b, "empty interval [{a}, {b}]");
    assert!(n_scan >= 2, "scan needs at least two points");
    let step = (b - a) / (n_scan - 1) as f64;
    let mut out = RootList::default();
    let push = |out: &mut RootList, x: f64, r: f64| {
        if r <= tol && out.roots.last().is_none_or(|&last| x > last) {
            out.roots.push(x);
            out.residuals.push(r);
        }
    };

    let mut x_prev = a;
    let mut f_prev = f(a);
    if f_prev == 0.0 {
        push(&mut out, a, 0.0);
    }
    for i in 1..n_scan {
        let x = if i == n_scan - 1 { b } else { a + i as f64 * step };
        let fx = f(x);
        if fx == 0.0 {
            push(&mut out, x, 0.0);
        } else if f_prev != 0.0 && f_prev.signum() != fx.signum() {
            let root = bisect(&f, x_prev, f_prev, x);
            push(&mut out, root, f(root).abs());
        }
        x_prev = x;
        f_prev = fx;
    }
    out
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, f_lo: f64, mut hi: f64) -> f64 {
    let lo_sign = f_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
///
/// Returns `(argmin, min)`. Stops when the bracket is narrower than `tol`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..300 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        for cand in [(x1, f1), (x2, f2)] {
            if cand.1 < best.1 {
                best = cand;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::spherical_bessel_j;

    #[test]
    fn j1_roots_below_ten() {
        let roots = find_roots(|x| spherical_bessel_j(1, x), 0.1, 10.0, 200, 1e-12);
        assert_eq!(roots.len(), 2);
        // Independent check: the roots of j1 solve tan x = x.
        for &r in &roots.roots {
            assert!((r.tan() - r).abs() < 1e-9);
        }
        assert!((roots.roots[0] - 4.493409457909064).abs() < 1e-12);
        assert!((roots.roots[1] - 7.725251836937707).abs() < 1e-12);
        assert!(roots.residuals.iter().all(|&r| r < 1e-12));
    }

    #[test]
    fn linear_root() {
        let roots = find_roots(|x| x - 1.0, 0.0, 2.0, 7, 1e-12);
        assert_eq!(roots.roots.len(), 1);
        assert!((roots.roots[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn no_real_root() {
        assert!(find_roots(|x| x * x + 1.0, 0.0, 2.0, 50, 1e-12).is_empty());
    }

    #[test]
    fn pole_is_not_a_root() {
        let roots = find_roots(|x| 1.0 / (x - 1.0), 0.0, 2.0, 10, 1e-12);
        assert!(roots.is_empty());
    }

    #[test]
    fn refined_scan_is_idempotent() {
        let f = |x: f64| spherical_bessel_j(2, x);
        let coarse = find_roots(f, 0.5, 20.0, 100, 1e-12);
        let fine = find_roots(f, 0.5, 20.0, 1000, 1e-12);
        assert_eq!(coarse.len(), fine.len());
        for (a, b) in coarse.roots.iter().zip(&fine.roots) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_section_on_v_shape() {
        let (x, fx) = golden_section_min(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-11);
        assert!(fx < 1e-11);
    }
}
