//! Block-level formulas for the three space forms.
//!
//! Hyperboloid blocks store `d + 1` coordinates with the time-like
//! coordinate last: `<x, x> = x_1^2 + ... + x_d^2 - x_{d+1}^2 = -1`.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minkowski product with signature `(+, ..., +, -)`.
#[inline]
pub fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    let d = a.len() - 1;
    dot(&a[..d], &b[..d]) - a[d] * b[d]
}

#[inline]
pub fn euclidean_sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `arcosh(-<x, y>)`, with the argument clamped to `[1, inf)`.
#[inline]
pub fn hyperbolic_dist(a: &[f64], b: &[f64]) -> f64 {
    (-minkowski(a, b)).max(1.0).acosh()
}

/// `arccos(<x, y>)`, with the argument clamped to `[-1, 1]`.
#[inline]
pub fn sphere_dist(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

/// Puts a hyperboloid point back on the upper sheet by recomputing its
/// time coordinate.
#[inline]
pub fn hyperbolic_reproject(x: &mut [f64]) {
    let d = x.len() - 1;
    x[d] = (1.0 + dot(&x[..d], &x[..d])).sqrt();
}

#[inline]
pub fn sphere_reproject(x: &mut [f64]) {
    let n = dot(x, x).sqrt();
    x.iter_mut().for_each(|c| *c /= n);
}

/// `cosh(|v|) p + sinh(|v|) v / |v|` followed by reprojection.
pub fn hyperbolic_exp(p: &[f64], v: &[f64], out: &mut [f64]) {
    let nv = minkowski(v, v).max(0.0).sqrt();
    if nv < 1e-300 {
        out.copy_from_slice(p);
    } else {
        let (c, s) = (nv.cosh(), nv.sinh() / nv);
        for k in 0..p.len() {
            out[k] = c * p[k] + s * v[k];
        }
    }
    hyperbolic_reproject(out);
}

/// `cos(|v|) p + sin(|v|) v / |v|` followed by normalization.
pub fn sphere_exp(p: &[f64], v: &[f64], out: &mut [f64]) {
    let nv = dot(v, v).sqrt();
    if nv < 1e-300 {
        out.copy_from_slice(p);
    } else {
        let (c, s) = (nv.cos(), nv.sin() / nv);
        for k in 0..p.len() {
            out[k] = c * p[k] + s * v[k];
        }
    }
    sphere_reproject(out);
}

/// Projects an ambient vector onto `T_p H^d` (Minkowski-orthogonal part).
#[inline]
pub fn hyperbolic_project(p: &[f64], v: &mut [f64]) {
    let c = minkowski(p, v);
    v.iter_mut().zip(p).for_each(|(x, pk)| *x += c * pk);
}

/// Projects an ambient vector onto `T_p S^d`.
#[inline]
pub fn sphere_project(p: &[f64], v: &mut [f64]) {
    let c = dot(p, v);
    v.iter_mut().zip(p).for_each(|(x, pk)| *x -= c * pk);
}

/// Euclidean partial derivatives -> Riemannian gradient on the hyperboloid:
/// flip the time-like sign (inverse Minkowski metric), then project.
pub fn hyperbolic_riemannian_grad(p: &[f64], g: &mut [f64]) {
    let d = g.len() - 1;
    g[d] = -g[d];
    hyperbolic_project(p, g);
}

pub fn sphere_riemannian_grad(p: &[f64], g: &mut [f64]) {
    sphere_project(p, g);
}

/// `(-y_1, ..., -y_d, y_{d+1})`, i.e. the partial derivative of `-<x, y>`
/// with respect to `x`, scaled by `coef` and accumulated into `out`.
#[inline]
pub fn accumulate_neg_minkowski_partial(y: &[f64], coef: f64, out: &mut [f64]) {
    let d = y.len() - 1;
    for k in 0..d {
        out[k] -= coef * y[k];
    }
    out[d] += coef * y[d];
}

/// Coefficient `arcosh(m) / sqrt(m^2 - 1)` for `m > 1`.
#[inline]
pub fn acosh_over_sqrt(m: f64) -> f64 {
    let t = m - 1.0;
    if t < 1e-8 {
        // series around m = 1
        1.0 - t / 3.0 + 2.0 * t * t / 15.0
    } else {
        m.acosh() / (t * (m + 1.0)).sqrt()
    }
}
