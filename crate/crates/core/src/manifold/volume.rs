use std::f64::consts::PI;

use super::rotsym::warp;
use crate::error::{Error, Result};

/// Area of the unit 2-sphere.
const OMEGA_2: f64 = 4.0 * PI;

/// `int_0^a sinh^2(z) dz`: the hyperbolic ball volume in `H^3` is
/// `omega_2` times this.
pub fn sinh2_integral(a: f64) -> f64 {
    if a < 1e-3 {
        // a^3/3 + a^5/15 + 2 a^7/315
        let a2 = a * a;
        return a * a2 * (1.0 / 3.0 + a2 * (1.0 / 15.0 + a2 * 2.0 / 315.0));
    }
    ((2.0 * a).sinh() / 2.0 - a) / 2.0
}

/// Volume of the annular region
/// `{(z, r, theta) : d_H3(z, z_i)^2 + (r - r_i)^2 < rho^2}` in `H^3 x R`.
///
/// The inner hyperbolic integral is closed form; the outer radial integral
/// uses adaptive Simpson with absolute tolerance `1e-8`.
pub fn annular_volume(alpha: f64, hyperbolic_dim: usize, center_r: f64, rho: f64) -> Result<f64> {
    if hyperbolic_dim != 3 {
        return Err(Error::Domain(format!(
            "annular volume is only available for H^3, got H^{hyperbolic_dim}"
        )));
    }
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {rho}")));
    }
    if !(alpha > 0.0) || !(center_r >= 0.0) {
        return Err(Error::Domain("alpha > 0 and r >= 0 required".into()));
    }
    let lo = (center_r - rho).max(0.0);
    let hi = center_r + rho;
    let integrand = |r: f64| {
        let a = (rho * rho - (r - center_r) * (r - center_r))
            .max(0.0)
            .sqrt();
        let phi = warp(alpha, r);
        sinh2_integral(a) * phi * phi
    };
    Ok(OMEGA_2 * OMEGA_2 * adaptive_simpson(integrand, lo, hi, 1e-8, 50))
}

/// Adaptive Simpson quadrature with the standard Richardson correction.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 20);
        assert!((v - 0.0).abs() < 1e-12);
        let v = adaptive_simpson(f64::sin, 0.0, PI, 1e-10, 30);
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn sinh2_integral_series_is_continuous() {
        let a: f64 = 1e-3;
        let closed = ((2.0 * a).sinh() / 2.0 - a) / 2.0;
        assert!((sinh2_integral(a * 0.999_999) - closed).abs() < 1e-14);
    }

    #[test]
    fn vanishes_and_grows_with_rho() {
        let tiny = annular_volume(1.0, 3, 1.0, 1e-3).unwrap();
        assert!(tiny < 1e-10);
        let mut prev = 0.0;
        for k in 1..=10 {
            let v = annular_volume(1.0, 3, 1.0, 0.3 * k as f64).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn increases_with_center_radius() {
        let mut prev = 0.0;
        for k in 0..10 {
            let v = annular_volume(0.7, 3, 0.5 * k as f64, 2.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(annular_volume(1.0, 3, 1.0, 0.0).is_err());
        assert!(annular_volume(1.0, 2, 1.0, 1.0).is_err());
    }
}
