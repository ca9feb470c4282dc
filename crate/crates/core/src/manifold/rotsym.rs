//! Curvature of the rotationally symmetric 3-manifold with metric
//! `dr^2 + phi(r)^2 g_{S^2}` and `phi(r) = alpha * atan(r / alpha)`.
//!
//! Everything is evaluated in the scale-free variable `s = r / alpha`;
//! curvatures scale as `1 / alpha^2` and their `r`-derivatives as
//! `1 / alpha^3`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SERIES_CUTOFF: f64 = 1e-4;
const DERIVATIVE_SERIES_CUTOFF: f64 = 1e-2;
// beyond this, (1 + s^2)^2 risks overflow and the profile is flat to machine precision
const FAR_FIELD: f64 = 1e50;

/// Warping function `phi_alpha(r)`.
pub fn warp(alpha: f64, r: f64) -> f64 {
    alpha * (r / alpha).atan()
}

/// Scalar curvature `R_alpha(r) = 2 (-2 phi'' / phi + (1 - phi'^2) / phi^2)`.
///
/// Strictly decreasing on `[0, inf)` from `12 / alpha^2` towards
/// `8 / (pi alpha)^2`.
pub fn curvature(alpha: f64, r: f64) -> f64 {
    let s = (r / alpha).abs();
    unit_curvature(s) / (alpha * alpha)
}

fn unit_curvature(s: f64) -> f64 {
    if s < SERIES_CUTOFF {
        let s2 = s * s;
        return 12.0 - 50.0 / 3.0 * s2 + 976.0 / 45.0 * s2 * s2;
    }
    let (k, l) = unit_sectional(s);
    2.0 * (2.0 * k + l)
}

/// Sectional curvatures `(K, L)` of the planes perpendicular (`K = -phi''/phi`)
/// and tangential (`L = (1 - phi'^2)/phi^2`) to the spherical orbits.
pub fn sectional(alpha: f64, r: f64) -> (f64, f64) {
    let s = (r / alpha).abs();
    let (k, l) = unit_sectional(s);
    let a2 = alpha * alpha;
    (k / a2, l / a2)
}

fn unit_sectional(s: f64) -> (f64, f64) {
    if s < SERIES_CUTOFF {
        let s2 = s * s;
        return (2.0 - 10.0 / 3.0 * s2, 2.0 - 5.0 / 3.0 * s2);
    }
    let u = s.atan();
    if s > FAR_FIELD {
        return (0.0, 1.0 / (u * u));
    }
    let q = 1.0 + s * s;
    // 1 - phi'^2 = s^2 (2 + s^2) / (1 + s^2)^2, written without cancellation
    let k = 2.0 * s / (q * q * u);
    let l = s * s * (2.0 + s * s) / (q * q * u * u);
    (k, l)
}

/// `d R_alpha / dr`. Non-positive, zero at the origin.
pub fn curvature_derivative(alpha: f64, r: f64) -> f64 {
    let s = r / alpha;
    let sign = if s < 0.0 { -1.0 } else { 1.0 };
    sign * unit_curvature_derivative(s.abs()) / (alpha * alpha * alpha)
}

fn unit_curvature_derivative(s: f64) -> f64 {
    if s < DERIVATIVE_SERIES_CUTOFF {
        return series_derivative(s);
    }
    if s > FAR_FIELD {
        return 0.0;
    }
    closed_form_derivative(s)
}

fn series_derivative(s: f64) -> f64 {
    let s2 = s * s;
    s * (-100.0 / 3.0 + s2 * (3904.0 / 45.0 + s2 * (-16592.0 / 105.0 + s2 * 696_832.0 / 2835.0)))
}

fn closed_form_derivative(s: f64) -> f64 {
    // dR/ds = -4 (phi''' / phi + phi' (1 - phi'^2) / phi^3)
    let u = s.atan();
    let q = 1.0 + s * s;
    let a = 1.0 / q;
    let one_minus_a2 = s * s * (2.0 + s * s) / (q * q);
    let c = -2.0 * (1.0 - 3.0 * s * s) / (q * q * q);
    -4.0 * (c / u + a * one_minus_a2 / (u * u * u))
}

/// `R_alpha(0) = 12 / alpha^2`.
pub fn max_curvature(alpha: f64) -> f64 {
    12.0 / (alpha * alpha)
}

/// Horizontal asymptote `8 / (pi alpha)^2`.
pub fn min_curvature(alpha: f64) -> f64 {
    8.0 / (PI * PI * alpha * alpha)
}

/// Radius at which `R_alpha` takes `value`, by bisection. `None` if the value
/// is outside `(8 / (pi alpha)^2, 12 / alpha^2]`.
pub fn curvature_inverse(alpha: f64, value: f64) -> Option<f64> {
    if value > max_curvature(alpha) || value <= min_curvature(alpha) {
        return None;
    }
    if value == max_curvature(alpha) {
        return Some(0.0);
    }
    let mut lo = 0.0;
    let mut hi = alpha;
    while curvature(alpha, hi) > value {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curvature(alpha, mid) > value {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Choice of `alpha` and of the curvature offset `delta_hat` from the range
/// of node Forman curvature and the two geometric hyperparameters.
///
/// `alpha = sqrt(12 / (maxF - minF + delta + ell_plus))` and
/// `delta_hat = 2 / (3 pi^2 - 2) * (maxF - minF + ell_plus) + delta`.
pub fn alpha_from_range(max_f: f64, min_f: f64, delta: f64, ell_plus: f64) -> Result<(f64, f64)> {
    if !(max_f >= min_f) {
        return Err(Error::Domain(format!(
            "curvature range is empty: max {max_f} < min {min_f}"
        )));
    }
    if !(delta > 0.0) || !(ell_plus > 0.0) {
        return Err(Error::Domain(format!(
            "delta ({delta}) and ell_plus ({ell_plus}) must be positive"
        )));
    }
    let span = max_f - min_f;
    let top = span + delta + ell_plus;
    if !(top > 0.0) || !top.is_finite() {
        return Err(Error::Domain(format!("invalid curvature span {top}")));
    }
    let alpha = (12.0 / top).sqrt();
    let delta_hat = delta_hat(span, delta, ell_plus);
    Ok((alpha, delta_hat))
}

pub fn delta_hat(span: f64, delta: f64, ell_plus: f64) -> f64 {
    2.0 / (3.0 * PI * PI - 2.0) * (span + ell_plus) + delta
}
