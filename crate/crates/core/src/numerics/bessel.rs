//! Spherical Bessel functions of the first kind.
//!
//! Three regimes, chosen per call:
//!
//! * `x < 1`: power series of `j_l(x) / x^l` for every order.
//! * `x ≥ l_max`: upward recurrence from the closed forms of `j₀`, `j₁`.
//! * otherwise: Miller's downward recurrence normalized against `j₀` or `j₁`.

const SERIES_LIMIT: f64 = 1.0;
const RESCALE_THRESHOLD: f64 = 1e200;

/// `j_l(x)` for a single order.
pub fn spherical_bessel_j(l: usize, x: f64) -> f64 {
    spherical_bessel_j_array(l, x)[l]
}

/// `j_l'(x)`.
///
/// Uses `(2l+1) j_l' = l j_{l-1} - (l+1) j_{l+1}`, which needs no division by
/// `x`, and `j₀' = -j₁`.
pub fn spherical_bessel_j_deriv(l: usize, x: f64) -> f64 {
    let j = spherical_bessel_j_array(l + 1, x);
    if l == 0 {
        -j[1]
    } else {
        (l as f64 * j[l - 1] - (l + 1) as f64 * j[l + 1]) / (2 * l + 1) as f64
    }
}

/// `[j_0(x), …, j_{l_max}(x)]`.
pub fn spherical_bessel_j_array(l_max: usize, x: f64) -> Vec<f64> {
    if x < 0.0 {
        let mut out = spherical_bessel_j_array(l_max, -x);
        for (l, v) in out.iter_mut().enumerate() {
            if l % 2 == 1 {
                *v = -*v;
            }
        }
        return out;
    }
    if x < SERIES_LIMIT {
        let mut out = series_ratios(l_max, x);
        let mut power = 1.0;
        for v in out.iter_mut() {
            *v *= power;
            power *= x;
        }
        return out;
    }
    if x >= l_max as f64 {
        upward(l_max, x)
    } else {
        miller(l_max, x)
    }
}

/// `[j_l(x) / x^l]` for `l = 0..=l_max`.
///
/// This is the smooth, even radial factor of `j_l(k|x|) Y_lm(x̂)` once the
/// harmonic is written as the solid polynomial `|x|^l Y_lm(x̂)`; it stays finite
/// at `x = 0` where it equals `1 / (2l+1)!!`.
pub fn spherical_bessel_ratio_array(l_max: usize, x: f64) -> Vec<f64> {
    let x = x.abs();
    if x < SERIES_LIMIT {
        return series_ratios(l_max, x);
    }
    let mut out = spherical_bessel_j_array(l_max, x);
    let inv = 1.0 / x;
    let mut scale = 1.0;
    for v in out.iter_mut() {
        *v *= scale;
        scale *= inv;
    }
    out
}

fn series_ratios(l_max: usize, x: f64) -> Vec<f64> {
    let half_x2 = 0.5 * x * x;
    let mut out = Vec::with_capacity(l_max + 1);
    let mut double_factorial = 1.0;
    for l in 0..=l_max {
        double_factorial *= (2 * l + 1) as f64;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1;
        loop {
            term *= -half_x2 / (k as f64 * (2 * l + 2 * k + 1) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs() || k > 60 {
                break;
            }
            k += 1;
        }
        out.push(sum / double_factorial);
    }
    out
}

fn upward(l_max: usize, x: f64) -> Vec<f64> {
    let (s, c) = x.sin_cos();
    let mut out = Vec::with_capacity(l_max + 1);
    out.push(s / x);
    if l_max >= 1 {
        out.push(s / (x * x) - c / x);
    }
    for l in 1..l_max {
        let next = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        out.push(next);
    }
    out
}

fn miller(l_max: usize, x: f64) -> Vec<f64> {
    let start = l_max + 30 + x.ceil() as usize + 4 * (l_max as f64).sqrt() as usize;
    let mut out = vec![0.0; l_max + 1];
    let mut upper = 0.0;
    let mut current = 1e-300;
    // j_{l-1} = (2l+1)/x j_l - j_{l+1}
    for l in (1..=start).rev() {
        let lower = (2 * l + 1) as f64 / x * current - upper;
        upper = current;
        current = lower;
        if l - 1 <= l_max {
            out[l - 1] = current;
        }
        if current.abs() > RESCALE_THRESHOLD {
            current /= RESCALE_THRESHOLD;
            upper /= RESCALE_THRESHOLD;
            out.iter_mut().for_each(|v| *v /= RESCALE_THRESHOLD);
        }
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let scale = if j0.abs() >= j1.abs() { j0 / out[0] } else { j1 / out[1] };
    out.iter_mut().for_each(|v| *v *= scale);
    out
}
