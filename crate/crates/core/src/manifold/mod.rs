//! Embedding spaces: weighted products of space forms with at most one
//! rotationally symmetric radial factor.
//!
//! A [`Point`] is a flat coordinate vector laid out factor by factor:
//!
//! | factor          | block length | constraint                        |
//! |-----------------|--------------|-----------------------------------|
//! | `e<d>`          | `d`          | none                              |
//! | `s<d>`          | `d + 1`      | unit Euclidean norm               |
//! | `h<d>`          | `d + 1`      | `<x,x>_M = -1`, last coord `> 0`  |
//! | `rot(a=..)`     | `1`          | radius `r >= 0`                   |
//!
//! The angular coordinates of the radial factor never enter distances or
//! curvatures and are not stored.
//!
//! Factor scales `l` multiply the factor metric by `l^2`: distances scale by
//! `l`, scalar curvature by `1 / l^2` and Riemannian gradients by `1 / l^2`.

pub mod rotsym;
pub mod space_form;
mod volume;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use volume::{adaptive_simpson, annular_volume, sinh2_integral};

/// Tolerance for the sphere/hyperboloid constraints of a [`Point`].
pub const CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    /// Chosen from the graph's curvature range at training start.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FactorKind {
    Euclidean(usize),
    Sphere(usize),
    Hyperbolic(usize),
    RotSym(Alpha),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorSpec {
    pub kind: FactorKind,
    pub scale: f64,
}

impl FactorSpec {
    pub fn euclidean(dim: usize) -> Self {
        Self::unit(FactorKind::Euclidean(dim))
    }

    pub fn sphere(dim: usize) -> Self {
        Self::unit(FactorKind::Sphere(dim))
    }

    pub fn hyperbolic(dim: usize) -> Self {
        Self::unit(FactorKind::Hyperbolic(dim))
    }

    pub fn rotsym(alpha: f64) -> Self {
        Self::unit(FactorKind::RotSym(Alpha::Value(alpha)))
    }

    pub fn rotsym_auto() -> Self {
        Self::unit(FactorKind::RotSym(Alpha::Auto))
    }

    fn unit(kind: FactorKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Number of stored coordinates.
    pub fn block_len(&self) -> usize {
        match self.kind {
            FactorKind::Euclidean(d) => d,
            FactorKind::Sphere(d) | FactorKind::Hyperbolic(d) => d + 1,
            FactorKind::RotSym(_) => 1,
        }
    }

    /// Constant scalar curvature of a space form, including its scale.
    /// `None` for the radial factor.
    pub fn constant_curvature(&self) -> Option<f64> {
        let l2 = self.scale * self.scale;
        match self.kind {
            FactorKind::Euclidean(_) => Some(0.0),
            FactorKind::Sphere(d) => Some((d * (d - 1)) as f64 / l2),
            FactorKind::Hyperbolic(d) => Some(-((d * (d - 1)) as f64) / l2),
            FactorKind::RotSym(_) => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::Domain(format!(
                "factor scale must be positive, got {}",
                self.scale
            )));
        }
        match self.kind {
            FactorKind::Euclidean(0) | FactorKind::Sphere(0) | FactorKind::Hyperbolic(0) => Err(
                Error::Domain("space form dimension must be at least 1".into()),
            ),
            FactorKind::RotSym(Alpha::Value(a)) if !(a > 0.0) || !a.is_finite() => {
                Err(Error::Domain(format!("alpha must be positive, got {a}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scaled = self.scale != 1.0;
        match self.kind {
            FactorKind::Euclidean(d) => write!(f, "e{d}")?,
            FactorKind::Sphere(d) => write!(f, "s{d}")?,
            FactorKind::Hyperbolic(d) => write!(f, "h{d}")?,
            FactorKind::RotSym(alpha) => {
                match alpha {
                    Alpha::Auto => write!(f, "rot(a=auto")?,
                    Alpha::Value(a) => write!(f, "rot(a={a}")?,
                }
                if scaled {
                    write!(f, ",l={}", self.scale)?;
                }
                return write!(f, ")");
            }
        }
        if scaled {
            write!(f, "(l={})", self.scale)?;
        }
        Ok(())
    }
}

/// Ordered list of factors with at most one radial factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    factors: Vec<FactorSpec>,
    offsets: Vec<usize>,
}

impl ManifoldSpec {
    pub fn new(factors: Vec<FactorSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Domain("manifold needs at least one factor".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        let rot = factors
            .iter()
            .filter(|f| matches!(f.kind, FactorKind::RotSym(_)))
            .count();
        if rot > 1 {
            return Err(Error::Domain(
                "at most one rotationally symmetric factor is supported".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(factors.len() + 1);
        let mut o = 0;
        for f in &factors {
            offsets.push(o);
            o += f.block_len();
        }
        offsets.push(o);
        Ok(Self { factors, offsets })
    }

    /// Parses the textual form, e.g. `h5,h5,rot(a=auto,l=0.5)` or `h5,s5`.
    pub fn parse(s: &str) -> Result<Self> {
        let atoms = split_atoms(s)?;
        let factors = atoms
            .iter()
            .map(|a| parse_atom(a.trim()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    /// Total number of stored coordinates per point.
    pub fn coord_len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn block_range(&self, k: usize) -> Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&FactorSpec, Range<usize>)> + '_ {
        self.factors
            .iter()
            .enumerate()
            .map(move |(k, f)| (f, self.block_range(k)))
    }

    /// The radial factor and its coordinate index.
    pub fn rotsym(&self) -> Option<(&FactorSpec, usize)> {
        self.blocks()
            .find(|(f, _)| matches!(f.kind, FactorKind::RotSym(_)))
            .map(|(f, r)| (f, r.start))
    }

    pub fn has_rotsym(&self) -> bool {
        self.rotsym().is_some()
    }

    /// `alpha` of the radial factor, if present and resolved.
    pub fn alpha(&self) -> Option<f64> {
        match self.rotsym()?.0.kind {
            FactorKind::RotSym(Alpha::Value(a)) => Some(a),
            _ => None,
        }
    }

    /// Copy with the radial factor's `alpha` fixed.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let factors = self
            .factors
            .iter()
            .map(|f| match f.kind {
                FactorKind::RotSym(_) => FactorSpec {
                    kind: FactorKind::RotSym(Alpha::Value(alpha)),
                    scale: f.scale,
                },
                _ => *f,
            })
            .collect();
        Self::new(factors)
    }

    /// The homogeneous part `M_h` alone.
    pub fn without_rotsym(&self) -> Result<Self> {
        Self::new(
            self.factors
                .iter()
                .filter(|f| !matches!(f.kind, FactorKind::RotSym(_)))
                .copied()
                .collect(),
        )
    }

    /// Scalar curvature of the homogeneous part, `R_h`.
    pub fn homogeneous_curvature(&self) -> f64 {
        self.factors
            .iter()
            .filter_map(FactorSpec::constant_curvature)
            .sum()
    }

    fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.coord_len() {
            return Err(Error::Shape(format!(
                "{what} has {len} coordinates, manifold {self} needs {}",
                self.coord_len()
            )));
        }
        Ok(())
    }

    /// Canonical base point: origin of every space form and `r = 0`.
    pub fn base_point(&self) -> Point {
        let mut c = vec![0.0; self.coord_len()];
        for (f, r) in self.blocks() {
            if let FactorKind::Sphere(_) | FactorKind::Hyperbolic(_) = f.kind {
                c[r.end - 1] = 1.0;
            }
        }
        Point(c)
    }

    /// Checks the per-block constraints within [`CONSTRAINT_TOL`].
    pub fn validate_point(&self, p: &Point) -> Result<()> {
        self.check_len(p.0.len(), "point")?;
        for (f, r) in self.blocks() {
            let x = &p.0[r];
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Contract("point has non-finite coordinates".into()));
            }
            match f.kind {
                FactorKind::Hyperbolic(_) => {
                    let q = space_form::minkowski(x, x);
                    if (q + 1.0).abs() > CONSTRAINT_TOL || x[x.len() - 1] <= 0.0 {
                        return Err(Error::Contract(format!("off the hyperboloid: <x,x> = {q}")));
                    }
                }
                FactorKind::Sphere(_) => {
                    let q = space_form::dot(x, x);
                    if (q.sqrt() - 1.0).abs() > CONSTRAINT_TOL {
                        return Err(Error::Contract(format!("off the sphere: |x|^2 = {q}")));
                    }
                }
                FactorKind::RotSym(_) => {
                    if x[0] < 0.0 {
                        return Err(Error::Contract(format!("negative radius {}", x[0])));
                    }
                }
                FactorKind::Euclidean(_) => {}
            }
        }
        Ok(())
    }

    /// Squared distance on raw coordinate slices; no layout checks.
    #[inline]
    pub fn sq_distance_raw(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for (f, r) in self.blocks() {
            let (x, y) = (&a[r.clone()], &b[r]);
            let d2 = match f.kind {
                FactorKind::Euclidean(_) => space_form::euclidean_sq_dist(x, y),
                FactorKind::Sphere(_) => space_form::sphere_dist(x, y).powi(2),
                FactorKind::Hyperbolic(_) => space_form::hyperbolic_dist(x, y).powi(2),
                FactorKind::RotSym(_) => (x[0] - y[0]) * (x[0] - y[0]),
            };
            s += f.scale * f.scale * d2;
        }
        s
    }

    /// Geodesic distance of the product metric.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_len(p.0.len(), "first point")?;
        self.check_len(q.0.len(), "second point")?;
        Ok(self.sq_distance_raw(&p.0, &q.0).sqrt())
    }

    /// Norm of a tangent vector in the (scaled) product metric.
    pub fn tangent_norm(&self, v: &TangentVector) -> f64 {
        self.blocks()
            .map(|(f, r)| {
                let x = &v.0[r];
                let n2 = match f.kind {
                    FactorKind::Hyperbolic(_) => space_form::minkowski(x, x).max(0.0),
                    _ => space_form::dot(x, x),
                };
                f.scale * f.scale * n2
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Inner product `g_p(u, v)` of two tangent vectors.
    pub fn inner(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        self.blocks()
            .map(|(f, r)| {
                let (a, b) = (&u.0[r.clone()], &v.0[r]);
                let ip = match f.kind {
                    FactorKind::Hyperbolic(_) => space_form::minkowski(a, b),
                    _ => space_form::dot(a, b),
                };
                f.scale * f.scale * ip
            })
            .sum()
    }

    /// Checks that `v` lies in `T_p M` (relative tolerance).
    pub fn check_tangent(&self, p: &Point, v: &TangentVector) -> Result<()> {
        self.check_len(v.0.len(), "tangent vector")?;
        for (f, r) in self.blocks() {
            let (x, w) = (&p.0[r.clone()], &v.0[r]);
            let (ip, scale) = match f.kind {
                FactorKind::Hyperbolic(_) => (
                    space_form::minkowski(x, w),
                    space_form::dot(x, x).sqrt() * space_form::dot(w, w).sqrt(),
                ),
                FactorKind::Sphere(_) => (space_form::dot(x, w), space_form::dot(w, w).sqrt()),
                _ => continue,
            };
            if ip.abs() > CONSTRAINT_TOL * (1.0 + scale) {
                return Err(Error::Contract(format!(
                    "vector is not tangent: normal component {ip}"
                )));
            }
        }
        Ok(())
    }

    /// Projects an arbitrary ambient vector onto `T_p M`.
    pub fn project_tangent(&self, p: &Point, v: &mut TangentVector) {
        for (f, r) in self.blocks() {
            let (x, w) = (&p.0[r.clone()], &mut v.0[r]);
            match f.kind {
                FactorKind::Hyperbolic(_) => space_form::hyperbolic_project(x, w),
                FactorKind::Sphere(_) => space_form::sphere_project(x, w),
                _ => {}
            }
        }
    }

    /// Factor-wise exponential map. The radial factor moves along its ray and
    /// stops at the origin: `r <- (r + nu)_+`.
    pub fn exp_map(&self, p: &Point, v: &TangentVector) -> Result<Point> {
        self.check_len(p.0.len(), "point")?;
        self.check_tangent(p, v)?;
        let mut out = p.clone();
        self.exp_map_raw(&p.0, &v.0, 1.0, &mut out.0);
        Ok(out)
    }

    /// `exp_p(t * v)` on raw slices without checks.
    pub fn exp_map_raw(&self, p: &[f64], v: &[f64], t: f64, out: &mut [f64]) {
        let mut scratch = [0.0; 64];
        for (f, r) in self.blocks() {
            let (x, o) = (&p[r.clone()], &mut out[r.clone()]);
            let len = x.len();
            let w: &mut [f64] = if len <= scratch.len() {
                &mut scratch[..len]
            } else {
                // rare: very high dimensional factor
                return self.exp_map_raw_alloc(p, v, t, out);
            };
            for (wk, vk) in w.iter_mut().zip(&v[r]) {
                *wk = t * vk;
            }
            match f.kind {
                FactorKind::Euclidean(_) => {
                    for k in 0..len {
                        o[k] = x[k] + w[k];
                    }
                }
                FactorKind::Sphere(_) => space_form::sphere_exp(x, w, o),
                FactorKind::Hyperbolic(_) => space_form::hyperbolic_exp(x, w, o),
                FactorKind::RotSym(_) => o[0] = (x[0] + w[0]).max(0.0),
            }
        }
    }

    fn exp_map_raw_alloc(&self, p: &[f64], v: &[f64], t: f64, out: &mut [f64]) {
        for (f, r) in self.blocks() {
            let x = &p[r.clone()];
            let w: Vec<f64> = v[r.clone()].iter().map(|vk| t * vk).collect();
            let o = &mut out[r];
            match f.kind {
                FactorKind::Euclidean(_) => {
                    for k in 0..x.len() {
                        o[k] = x[k] + w[k];
                    }
                }
                FactorKind::Sphere(_) => space_form::sphere_exp(x, &w, o),
                FactorKind::Hyperbolic(_) => space_form::hyperbolic_exp(x, &w, o),
                FactorKind::RotSym(_) => o[0] = (x[0] + w[0]).max(0.0),
            }
        }
    }

    /// Maps Euclidean partial derivatives in stored coordinates to the
    /// Riemannian gradient at `p`.
    pub fn riemannian_gradient(&self, p: &Point, ambient: &TangentVector) -> Result<TangentVector> {
        self.check_len(p.0.len(), "point")?;
        self.check_len(ambient.0.len(), "gradient")?;
        let mut g = ambient.clone();
        self.riemannian_gradient_raw(&p.0, &mut g.0);
        Ok(g)
    }

    pub fn riemannian_gradient_raw(&self, p: &[f64], g: &mut [f64]) {
        for (f, r) in self.blocks() {
            let (x, w) = (&p[r.clone()], &mut g[r]);
            match f.kind {
                FactorKind::Hyperbolic(_) => space_form::hyperbolic_riemannian_grad(x, w),
                FactorKind::Sphere(_) => space_form::sphere_riemannian_grad(x, w),
                _ => {}
            }
            let inv = 1.0 / (f.scale * f.scale);
            w.iter_mut().for_each(|c| *c *= inv);
        }
    }

    /// Scalar curvature `R_h + R_alpha(r) / l^2` at `p`.
    pub fn scalar_curvature(&self, p: &Point) -> Result<f64> {
        self.check_len(p.0.len(), "point")?;
        let mut total = self.homogeneous_curvature();
        if let Some((f, idx)) = self.rotsym() {
            let alpha = self.alpha().ok_or_else(|| {
                Error::Contract("radial factor alpha is unresolved (auto)".into())
            })?;
            total += rotsym::curvature(alpha, p.0[idx]) / (f.scale * f.scale);
        }
        Ok(total)
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, factor) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

impl FromStr for ManifoldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for ManifoldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ManifoldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        msg: msg.into(),
    }
}

fn split_atoms(s: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(spec_err(format!("unbalanced ')' in {s:?}")));
                }
            }
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(spec_err(format!("unbalanced '(' in {s:?}")));
    }
    out.push(&s[start..]);
    Ok(out)
}

fn parse_num(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| spec_err(format!("invalid value {v:?} for {key}")))
}

fn parse_atom(atom: &str) -> Result<FactorSpec> {
    let (head, args) = match atom.find('(') {
        Some(i) => {
            let inner = atom[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| spec_err(format!("missing ')' in {atom:?}")))?;
            (&atom[..i], Some(inner))
        }
        None => (atom, None),
    };
    let mut alpha = None;
    let mut scale = 1.0;
    if let Some(args) = args {
        for kv in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| spec_err(format!("expected key=value, got {kv:?}")))?;
            match k.trim() {
                "l" | "lambda" | "scale" => scale = parse_num(k, v)?,
                "a" | "alpha" if head == "rot" => {
                    alpha = Some(match v.trim() {
                        "auto" => Alpha::Auto,
                        other => Alpha::Value(parse_num(k, other)?),
                    })
                }
                other => return Err(spec_err(format!("unknown parameter {other:?} in {atom:?}"))),
            }
        }
    }
    let kind = if head == "rot" {
        FactorKind::RotSym(alpha.unwrap_or(Alpha::Auto))
    } else {
        let (letter, digits) = head.split_at(head.len().min(1));
        let dim: usize = digits
            .parse()
            .map_err(|_| spec_err(format!("unknown factor {head:?}")))?;
        match letter {
            "e" => FactorKind::Euclidean(dim),
            "s" => FactorKind::Sphere(dim),
            "h" => FactorKind::Hyperbolic(dim),
            _ => return Err(spec_err(format!("unknown factor {head:?}"))),
        }
    };
    Ok(FactorSpec { kind, scale })
}

/// Fills `out` with a vector drawn uniformly from the Euclidean ball of the
/// given radius.
pub fn sample_ball(rng: &mut impl rand::Rng, radius: f64, out: &mut [f64]) {
    let dim = out.len();
    loop {
        for c in out.iter_mut() {
            *c = rng.sample(rand_distr::StandardNormal);
        }
        let norm = space_form::dot(out, out).sqrt();
        if norm > 0.0 {
            let u: f64 = rng.random();
            let scale = radius * u.powf(1.0 / dim as f64) / norm;
            out.iter_mut().for_each(|c| *c *= scale);
            return;
        }
    }
}

/// Stored coordinates of a point; layout given by its [`ManifoldSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

/// Tangent vector (or raw gradient) in the same layout as [`Point`]. The
/// radial block holds the radial speed.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector(pub Vec<f64>);

impl TangentVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "h5,h5,rot(a=auto,l=0.5)",
            "h5,s5",
            "e2",
            "h2(l=2),s2,rot(a=0.75)",
        ] {
            let spec = ManifoldSpec::parse(s).unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(ManifoldSpec::parse(&spec.to_string()).unwrap(), spec);
        }
        let spec = ManifoldSpec::parse("h5, h5, rot").unwrap();
        assert_eq!(spec.to_string(), "h5,h5,rot(a=auto)");
        assert_eq!(spec.coord_len(), 13);
    }

    #[test]
    fn parse_rejects() {
        assert!(ManifoldSpec::parse("x3").is_err());
        assert!(ManifoldSpec::parse("h0").is_err());
        assert!(ManifoldSpec::parse("rot,rot").is_err());
        assert!(ManifoldSpec::parse("rot(a=-1)").is_err());
        assert!(ManifoldSpec::parse("h2(l=0)").is_err());
        assert!(ManifoldSpec::parse("h2(q=1)").is_err());
        assert!(ManifoldSpec::parse("rot(a=1").is_err());
    }

    #[test]
    fn product_distance_is_pythagorean() {
        let spec = ManifoldSpec::parse("e1,e1").unwrap();
        let d = spec
            .distance(&Point(vec![0.0, 0.0]), &Point(vec![3.0, 4.0]))
            .unwrap();
        assert!((d - 5.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_radial_distance() {
        let spec = ManifoldSpec::parse("rot(a=1,l=0.5)").unwrap();
        let d = spec.distance(&Point(vec![2.0]), &Point(vec![6.0])).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
    }

    #[test]
    fn shape_errors() {
        let spec = ManifoldSpec::parse("h2").unwrap();
        assert!(matches!(
            spec.distance(&Point(vec![0.0, 1.0]), &Point(vec![0.0, 0.0, 1.0])),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn exp_map_examples() {
        let spec = ManifoldSpec::parse("h2").unwrap();
        let p = spec.base_point();
        let q = spec
            .exp_map(&p, &TangentVector(vec![1.0, 0.0, 0.0]))
            .unwrap();
        assert!((q.0[0] - 1f64.sinh()).abs() < 1e-12);
        assert!((q.0[2] - 1f64.cosh()).abs() < 1e-12);
        let same = spec.exp_map(&p, &TangentVector::zeros(3)).unwrap();
        assert_eq!(same, p);

        let rot = ManifoldSpec::parse("rot(a=1)").unwrap();
        let r = rot
            .exp_map(&Point(vec![0.5]), &TangentVector(vec![-0.7]))
            .unwrap();
        assert_eq!(r.0, vec![0.0]);
    }

    #[test]
    fn exp_map_rejects_normal_vectors() {
        let spec = ManifoldSpec::parse("h2").unwrap();
        let p = spec.base_point();
        let err = spec.exp_map(&p, &TangentVector(vec![0.0, 0.0, 1.0]));
        assert!(matches!(err, Err(Error::Contract(_))));
        let s = ManifoldSpec::parse("s2").unwrap();
        assert!(s
            .exp_map(&s.base_point(), &TangentVector(vec![0.0, 0.0, 0.5]))
            .is_err());
    }

    #[test]
    fn gradient_examples() {
        let spec = ManifoldSpec::parse("e2,h2,rot(a=1,l=2)").unwrap();
        let p = spec.base_point();
        let g = TangentVector(vec![1.5, -2.0, 0.3, 0.4, 9.0, 8.0]);
        let rg = spec.riemannian_gradient(&p, &g).unwrap();
        assert_eq!(&rg.0[..2], &[1.5, -2.0]);
        assert_eq!(&rg.0[2..5], &[0.3, 0.4, 0.0]);
        assert_eq!(rg.0[5], 2.0);
    }

    #[test]
    fn scalar_curvature_examples() {
        let spec = ManifoldSpec::parse("h5,h5").unwrap();
        assert_eq!(spec.scalar_curvature(&spec.base_point()).unwrap(), -40.0);
        let rot = ManifoldSpec::parse("rot(a=1)").unwrap();
        assert_eq!(rot.scalar_curvature(&Point(vec![0.0])).unwrap(), 12.0);
        let r1 = rot.scalar_curvature(&Point(vec![1.0])).unwrap();
        assert!((r1 - 4.978_187_496_886_43).abs() < 1e-12);
        let auto = ManifoldSpec::parse("rot").unwrap();
        assert!(auto.scalar_curvature(&Point(vec![0.0])).is_err());
        let s = ManifoldSpec::parse("s3(l=2)").unwrap();
        assert_eq!(s.homogeneous_curvature(), 1.5);
    }

    #[test]
    fn validate_point_constraints() {
        let spec = ManifoldSpec::parse("h2,s1,rot(a=1)").unwrap();
        assert!(spec.validate_point(&spec.base_point()).is_ok());
        let mut bad = spec.base_point();
        bad.0[2] = 1.1;
        assert!(spec.validate_point(&bad).is_err());
        let mut neg = spec.base_point();
        neg.0[5] = -0.1;
        assert!(spec.validate_point(&neg).is_err());
    }
}
