//! Losses, analytic gradients and Riemannian SGD.
//!
//! The objective is `L = L_d + tau * L_c` with
//!
//! - `L_d = sum_{(i,j)} | d_M(y_i, y_j)^2 / d_G(i, j)^2 - 1 |` over unordered
//!   connected pairs, and
//! - `L_c = sum_i (t_i - R_alpha(r_i))^2 / (|F_i| + eps)^2`, where
//!   `t_i = F_i - min F + delta_hat` is the shifted Forman target.
//!
//! During training the distance term is weighted by `n / (2 |P|)` for a
//! batch of `|P|` pairs so that both terms are per-node averages of
//! comparable size.

pub mod config;

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    bfs_apsp, connected_pairs, forman, forman_max_degree_normalized, DistanceMatrix, FormanSignal,
    Graph, UNREACHABLE,
};
use crate::manifold::space_form::{
    accumulate_neg_minkowski_partial, acosh_over_sqrt, dot, minkowski,
};
use crate::manifold::{
    rotsym, sample_ball, Alpha, FactorKind, FactorSpec, ManifoldSpec, Point, TangentVector,
};

pub use config::{BatchPairs, CurvatureLoss, TrainConfig};

/// Radius of the tangent ball used to initialize space-form blocks.
pub const INIT_RADIUS: f64 = 0.1;
/// Fraction of epochs after which the learning rate drops by 10x.
pub const DECAY_AT: f64 = 0.8;

/// Constants of the shifted curvature loss, fixed once before training.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftConstants {
    pub min_forman: f64,
    pub delta_hat: f64,
    /// Scale of the radial factor.
    pub lambda: f64,
    /// Scalar curvature of the homogeneous part.
    pub r_h: f64,
}

impl ShiftConstants {
    /// `F - min F + delta_hat`, the value `R_alpha(r)` should take.
    pub fn target(&self, f: f64) -> f64 {
        f - self.min_forman + self.delta_hat
    }

    /// Inverse of [`Self::target`]: the Forman value a radial curvature
    /// stands for.
    pub fn reconstruct(&self, r_alpha: f64) -> f64 {
        r_alpha + self.min_forman - self.delta_hat
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub epochs: usize,
    pub config_digest: String,
    pub gamma: f64,
    #[serde(default)]
    pub normalize_forman: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub spec: ManifoldSpec,
    pub points: Vec<Point>,
    pub shift: Option<ShiftConstants>,
    pub provenance: Provenance,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.spec
            .sq_distance_raw(&self.points[i].0, &self.points[j].0)
            .sqrt()
    }

    /// Radial coordinate of node `i`, if the space has a radial factor.
    pub fn radius(&self, i: usize) -> Option<f64> {
        self.spec.rotsym().map(|(_, idx)| self.points[i].0[idx])
    }

    /// `R_alpha(r_i)` of the radial factor (without the `1 / lambda^2`).
    pub fn radial_curvature(&self, i: usize) -> Option<f64> {
        Some(rotsym::curvature(self.spec.alpha()?, self.radius(i)?))
    }

    /// Forman value encoded at node `i`: `R_alpha(r_i) + min F - delta_hat`.
    pub fn reconstructed_curvature(&self, i: usize) -> Option<f64> {
        Some(self.shift?.reconstruct(self.radial_curvature(i)?))
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            self.spec.validate_point(p)?;
        }
        Ok(())
    }

    fn flat(&self) -> Vec<f64> {
        self.points
            .iter()
            .flat_map(|p| p.0.iter().copied())
            .collect()
    }

    fn set_flat(&mut self, flat: &[f64]) {
        let len = self.spec.coord_len();
        for (p, chunk) in self.points.iter_mut().zip(flat.chunks_exact(len)) {
            p.0.copy_from_slice(chunk);
        }
    }
}

/// Per-node gradients and the number of pairs whose distance derivative was
/// singular and therefore skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub per_node: Vec<TangentVector>,
    pub skipped_pairs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub l_d: f64,
    pub l_c: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub embedding: Embedding,
    /// Losses evaluated during each epoch's gradient passes. With full
    /// batches these are the losses at the start of the epoch.
    pub history: Vec<EpochRecord>,
    pub skipped_pairs: u64,
    /// Whether the Forman signal was computed at all.
    pub forman_computed: bool,
}

/// Random initial embedding: space-form blocks are `exp` of a uniform tangent
/// vector of norm at most [`INIT_RADIUS`] at the base point, radii are uniform
/// on `cfg.radial_init`.
pub fn initialize(spec: &ManifoldSpec, g: &Graph, cfg: &TrainConfig) -> Result<Embedding> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points = init_points(spec, g.n(), cfg, &mut rng);
    Ok(Embedding {
        spec: spec.clone(),
        points,
        shift: None,
        provenance: Provenance {
            seed: cfg.seed,
            epochs: cfg.epochs,
            config_digest: cfg.digest(),
            gamma: cfg.gamma,
            normalize_forman: cfg.normalize_forman,
        },
    })
}

fn init_points(spec: &ManifoldSpec, n: usize, cfg: &TrainConfig, rng: &mut impl Rng) -> Vec<Point> {
    let base = spec.base_point();
    let mut v = vec![0.0; spec.coord_len()];
    (0..n)
        .map(|_| {
            for (f, r) in spec.blocks() {
                let w = &mut v[r];
                match f.kind {
                    FactorKind::Euclidean(_) => sample_ball(rng, INIT_RADIUS, w),
                    FactorKind::Sphere(_) | FactorKind::Hyperbolic(_) => {
                        let d = w.len() - 1;
                        sample_ball(rng, INIT_RADIUS, &mut w[..d]);
                        w[d] = 0.0;
                    }
                    FactorKind::RotSym(_) => {
                        w[0] = rng.random_range(cfg.radial_init.0..cfg.radial_init.1)
                    }
                }
            }
            let mut p = base.clone();
            spec.exp_map_raw(&base.0, &v, 1.0, &mut p.0);
            // the radial block is sampled directly, not moved from r = 0
            if let Some((_, idx)) = spec.rotsym() {
                p.0[idx] = v[idx];
            }
            p
        })
        .collect()
}

struct CurvCtx<'a> {
    alpha: f64,
    idx: usize,
    shift: ShiftConstants,
    forman: &'a [f64],
    epsilon: f64,
    normalized: bool,
}

impl CurvCtx<'_> {
    /// `(residual weight, residual)` for node `i` at radius `r`.
    #[inline]
    fn residual(&self, i: usize, r: f64) -> (f64, f64) {
        let f = self.forman[i];
        let e = self.shift.target(f) - rotsym::curvature(self.alpha, r);
        let w = if self.normalized {
            let den = f.abs() + self.epsilon;
            1.0 / (den * den)
        } else {
            1.0
        };
        (w, e)
    }
}

fn curv_ctx<'a>(
    emb: &Embedding,
    f: &'a FormanSignal,
    cfg: &TrainConfig,
) -> Result<Option<CurvCtx<'a>>> {
    let Some((_, idx)) = emb.spec.rotsym() else {
        return Ok(None);
    };
    let alpha = emb
        .spec
        .alpha()
        .ok_or_else(|| Error::Contract("radial factor alpha is unresolved".into()))?;
    let shift = emb
        .shift
        .ok_or_else(|| Error::Contract("embedding has no shift constants".into()))?;
    if f.node_values.len() != emb.n() {
        return Err(Error::Shape(format!(
            "Forman signal has {} nodes, embedding has {}",
            f.node_values.len(),
            emb.n()
        )));
    }
    Ok(Some(CurvCtx {
        alpha,
        idx,
        shift,
        forman: &f.node_values,
        epsilon: cfg.epsilon,
        normalized: cfg.curvature_loss == CurvatureLoss::Normalized,
    }))
}

fn check_pairs(d: &DistanceMatrix, n: usize, pairs: &[(u32, u32)]) -> Result<()> {
    if d.n() != n {
        return Err(Error::Shape(format!(
            "distance matrix has {} nodes, embedding has {n}",
            d.n()
        )));
    }
    for &(i, j) in pairs {
        let (i, j) = (i as usize, j as usize);
        if i == j || i >= n || j >= n {
            return Err(Error::Contract(format!("invalid pair ({i}, {j})")));
        }
        if d.raw(i, j) == UNREACHABLE {
            return Err(Error::Contract(format!("pair ({i}, {j}) is not connected")));
        }
    }
    Ok(())
}

/// Distance loss over the given unordered pairs.
pub fn loss_distance(emb: &Embedding, d: &DistanceMatrix, pairs: &[(u32, u32)]) -> Result<f64> {
    check_pairs(d, emb.n(), pairs)?;
    Ok(pairs
        .iter()
        .map(|&(i, j)| {
            let dg = d.raw(i as usize, j as usize) as f64;
            let dm2 = emb
                .spec
                .sq_distance_raw(&emb.points[i as usize].0, &emb.points[j as usize].0);
            (dm2 / (dg * dg) - 1.0).abs()
        })
        .sum())
}

/// Curvature loss. Zero for spaces without a radial factor, whose scalar
/// curvature is constant.
pub fn loss_curvature(emb: &Embedding, f: &FormanSignal, cfg: &TrainConfig) -> Result<f64> {
    let Some(ctx) = curv_ctx(emb, f, cfg)? else {
        return Ok(0.0);
    };
    Ok(emb
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (w, e) = ctx.residual(i, p.0[ctx.idx]);
            w * e * e
        })
        .sum())
}

/// `L_d + tau * L_c`. The curvature term is not evaluated when `tau = 0`.
pub fn loss_total(
    emb: &Embedding,
    d: &DistanceMatrix,
    f: &FormanSignal,
    cfg: &TrainConfig,
    pairs: &[(u32, u32)],
) -> Result<f64> {
    let ld = loss_distance(emb, d, pairs)?;
    if cfg.tau == 0.0 {
        return Ok(ld);
    }
    Ok(ld + cfg.tau * loss_curvature(emb, f, cfg)?)
}

/// Euclidean partial derivatives of `L_d + tau * L_c` in stored coordinates.
pub fn ambient_gradients(
    emb: &Embedding,
    d: &DistanceMatrix,
    f: &FormanSignal,
    cfg: &TrainConfig,
    pairs: &[(u32, u32)],
) -> Result<Gradients> {
    check_pairs(d, emb.n(), pairs)?;
    let ctx = if cfg.tau > 0.0 {
        curv_ctx(emb, f, cfg)?
    } else {
        None
    };
    let flat = emb.flat();
    let mut grad = vec![0.0; flat.len()];
    let acc = accumulate(
        &emb.spec,
        &flat,
        d,
        pairs,
        1.0,
        ctx.as_ref().map(|c| (c, cfg.tau)),
        &mut grad,
    );
    let len = emb.spec.coord_len();
    Ok(Gradients {
        per_node: grad
            .chunks_exact(len)
            .map(|c| TangentVector(c.to_vec()))
            .collect(),
        skipped_pairs: acc.skipped,
    })
}

/// Riemannian gradients of `L_d + tau * L_c`.
pub fn gradients(
    emb: &Embedding,
    d: &DistanceMatrix,
    f: &FormanSignal,
    cfg: &TrainConfig,
    pairs: &[(u32, u32)],
) -> Result<Gradients> {
    let mut g = ambient_gradients(emb, d, f, cfg, pairs)?;
    for (p, v) in emb.points.iter().zip(&mut g.per_node) {
        emb.spec.riemannian_gradient_raw(&p.0, &mut v.0);
    }
    Ok(g)
}

/// One descent step: `exp_p(-lr * grad)` per node; radii become
/// `(r - lr * dL/dr)_+`.
pub fn rsgd_step(emb: &Embedding, grads: &[TangentVector], lr: f64) -> Result<Embedding> {
    if grads.len() != emb.n() {
        return Err(Error::Shape(format!(
            "{} gradients for {} nodes",
            grads.len(),
            emb.n()
        )));
    }
    let mut out = emb.clone();
    for ((p, g), o) in emb.points.iter().zip(grads).zip(&mut out.points) {
        if g.0.len() != p.0.len() {
            return Err(Error::Shape(
                "gradient layout does not match the point".into(),
            ));
        }
        emb.spec.exp_map_raw(&p.0, &g.0, -lr, &mut o.0);
    }
    Ok(out)
}

struct Accumulated {
    l_d: f64,
    l_c: f64,
    skipped: u64,
}

/// `acos(c) / sqrt(1 - c^2)` for `c` in `(-1, 1]`.
#[inline]
fn acos_over_sqrt(c: f64) -> f64 {
    let t = 1.0 - c;
    if t < 1e-8 {
        1.0 + t / 3.0
    } else {
        c.acos() / (t * (1.0 + c)).sqrt()
    }
}

/// Adds `w_d * dL_d + w_c * dL_c` into `grad` and returns the unweighted
/// losses.
fn accumulate(
    spec: &ManifoldSpec,
    x: &[f64],
    d: &DistanceMatrix,
    pairs: &[(u32, u32)],
    w_d: f64,
    curv: Option<(&CurvCtx, f64)>,
    grad: &mut [f64],
) -> Accumulated {
    let len = spec.coord_len();
    let mut acc = Accumulated {
        l_d: 0.0,
        l_c: 0.0,
        skipped: 0,
    };
    for &(i, j) in pairs {
        let (i, j) = (i as usize, j as usize);
        let (pi, pj) = (&x[i * len..(i + 1) * len], &x[j * len..(j + 1) * len]);
        let dg = d.raw(i, j) as f64;
        let dg2 = dg * dg;
        let s = spec.sq_distance_raw(pi, pj);
        let q = s / dg2;
        acc.l_d += (q - 1.0).abs();
        if q == 1.0 {
            continue;
        }
        if s == 0.0 || is_singular(spec, pi, pj) {
            acc.skipped += 1;
            continue;
        }
        let c = w_d * (q - 1.0).signum() / dg2;
        let (gi, gj) = split_two(grad, i, j, len);
        pair_partials(spec, pi, pj, c, gi, gj);
    }
    if let Some((ctx, w_c)) = curv {
        for i in 0..x.len() / len {
            let r = x[i * len + ctx.idx];
            let (w, e) = ctx.residual(i, r);
            acc.l_c += w * e * e;
            let dr = -2.0 * w * e * rotsym::curvature_derivative(ctx.alpha, r);
            grad[i * len + ctx.idx] += w_c * dr;
        }
    }
    acc
}

fn is_singular(spec: &ManifoldSpec, a: &[f64], b: &[f64]) -> bool {
    spec.blocks().any(|(f, r)| {
        matches!(f.kind, FactorKind::Sphere(_)) && dot(&a[r.clone()], &b[r]) <= -1.0 + 1e-12
    })
}

fn split_two(v: &mut [f64], i: usize, j: usize, len: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert_ne!(i, j);
    if i < j {
        let (lo, hi) = v.split_at_mut(j * len);
        (&mut lo[i * len..(i + 1) * len], &mut hi[..len])
    } else {
        let (lo, hi) = v.split_at_mut(i * len);
        (&mut hi[..len], &mut lo[j * len..(j + 1) * len])
    }
}

/// Adds `c * d(lambda_k^2 d_k^2)` with respect to both endpoints.
#[inline]
fn pair_partials(
    spec: &ManifoldSpec,
    pi: &[f64],
    pj: &[f64],
    c: f64,
    gi: &mut [f64],
    gj: &mut [f64],
) {
    for (f, r) in spec.blocks() {
        let FactorSpec { kind, scale } = *f;
        let c = c * scale * scale;
        let (a, b) = (&pi[r.clone()], &pj[r.clone()]);
        let (ga, gb) = (&mut gi[r.clone()], &mut gj[r]);
        match kind {
            FactorKind::Euclidean(_) => {
                for k in 0..a.len() {
                    let t = 2.0 * c * (a[k] - b[k]);
                    ga[k] += t;
                    gb[k] -= t;
                }
            }
            FactorKind::RotSym(_) => {
                let t = 2.0 * c * (a[0] - b[0]);
                ga[0] += t;
                gb[0] -= t;
            }
            FactorKind::Hyperbolic(_) => {
                let m = (-minkowski(a, b)).max(1.0);
                let coef = 2.0 * c * acosh_over_sqrt(m);
                accumulate_neg_minkowski_partial(b, coef, ga);
                accumulate_neg_minkowski_partial(a, coef, gb);
            }
            FactorKind::Sphere(_) => {
                let cs = dot(a, b).clamp(-1.0, 1.0);
                let coef = -2.0 * c * acos_over_sqrt(cs);
                for k in 0..a.len() {
                    ga[k] += coef * b[k];
                    gb[k] += coef * a[k];
                }
            }
        }
    }
}

/// Fixes the radial factor's scale from the spec and `cfg.lambda_rot`. An
/// explicit `l` in the spec and a non-default `lambda_rot` must agree.
fn resolve_lambda(spec: &ManifoldSpec, cfg: &TrainConfig) -> Result<ManifoldSpec> {
    let Some((f, _)) = spec.rotsym() else {
        return Ok(spec.clone());
    };
    let lambda = match (f.scale != 1.0, cfg.lambda_rot != 1.0) {
        (true, true) if f.scale != cfg.lambda_rot => {
            return Err(Error::Domain(format!(
                "radial scale given twice: l={} in the manifold, lambda_rot={}",
                f.scale, cfg.lambda_rot
            )))
        }
        (true, _) => f.scale,
        (false, _) => cfg.lambda_rot,
    };
    let factors = spec
        .factors()
        .iter()
        .map(|x| match x.kind {
            FactorKind::RotSym(_) => x.with_scale(lambda),
            _ => *x,
        })
        .collect();
    ManifoldSpec::new(factors)
}

/// Resolves `alpha` and the shift constants from the Forman signal.
pub fn resolve_radial(
    spec: &ManifoldSpec,
    g: &Graph,
    f: &FormanSignal,
    cfg: &TrainConfig,
) -> Result<(ManifoldSpec, ShiftConstants)> {
    let (rot, _) = spec
        .rotsym()
        .ok_or_else(|| Error::Contract("manifold has no radial factor".into()))?;
    let (min_f, max_f) = f.range(g).unwrap_or((0.0, 0.0));
    let (spec, delta_hat) = match rot.kind {
        FactorKind::RotSym(Alpha::Auto) => {
            let (alpha, dh) = rotsym::alpha_from_range(max_f, min_f, cfg.delta, cfg.ell_plus)?;
            (spec.with_alpha(alpha)?, dh)
        }
        _ => (
            spec.clone(),
            rotsym::delta_hat(max_f - min_f, cfg.delta, cfg.ell_plus),
        ),
    };
    let lambda = spec.rotsym().map(|(f, _)| f.scale).unwrap_or(1.0);
    let shift = ShiftConstants {
        min_forman: min_f,
        delta_hat,
        lambda,
        r_h: spec.homogeneous_curvature(),
    };
    Ok((spec, shift))
}

/// The Forman signal a configuration trains against.
pub fn forman_signal(g: &Graph, gamma: f64, normalize: bool) -> FormanSignal {
    if normalize {
        forman_max_degree_normalized(g, gamma)
    } else {
        forman(g, gamma)
    }
}

/// Trains an embedding of `g` into `spec` by full- or mini-batch Riemannian
/// SGD.
///
/// The Forman signal is computed only when the space has a radial factor.
pub fn train(g: &Graph, spec: &ManifoldSpec, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let d = bfs_apsp(g);
    let pairs = connected_pairs(&d);
    if pairs.is_empty() {
        return Err(Error::Contract("graph has no connected pairs".into()));
    }
    let spec = resolve_lambda(spec, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = g.n();

    let signal = spec
        .has_rotsym()
        .then(|| forman_signal(g, cfg.gamma, cfg.normalize_forman));
    let (spec, shift) = match &signal {
        Some(f) => {
            let (s, c) = resolve_radial(&spec, g, f, cfg)?;
            (s, Some(c))
        }
        None => (spec, None),
    };
    let mut emb = Embedding {
        points: init_points(&spec, n, cfg, &mut rng),
        spec,
        shift,
        provenance: Provenance {
            seed: cfg.seed,
            epochs: cfg.epochs,
            config_digest: cfg.digest(),
            gamma: cfg.gamma,
            normalize_forman: cfg.normalize_forman,
        },
    };
    let ctx = match (&signal, cfg.tau > 0.0) {
        (Some(f), true) => curv_ctx(&emb, f, cfg)?,
        _ => None,
    };

    let spec = emb.spec.clone();
    let len = spec.coord_len();
    let mut x = emb.flat();
    let mut next = x.clone();
    let mut grad = vec![0.0; x.len()];
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut batch: Vec<(u32, u32)> = Vec::new();
    let decay_epoch = (DECAY_AT * cfg.epochs as f64).floor() as usize;
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut skipped = 0;
    let start = Instant::now();

    for epoch in 0..cfg.epochs {
        let lr = if epoch >= decay_epoch {
            0.1 * cfg.learning_rate
        } else {
            cfg.learning_rate
        };
        let batch_size = match cfg.batch_pairs {
            BatchPairs::Count(k) if k < pairs.len() => {
                order.shuffle(&mut rng);
                k
            }
            _ => pairs.len(),
        };
        let (mut l_d, mut l_c) = (0.0, None);
        for chunk in order.chunks(batch_size) {
            let batch_pairs: &[(u32, u32)] = if batch_size == pairs.len() {
                &pairs
            } else {
                batch.clear();
                batch.extend(chunk.iter().map(|&k| pairs[k]));
                &batch
            };
            grad.iter_mut().for_each(|v| *v = 0.0);
            let w_d = n as f64 / (2.0 * batch_pairs.len() as f64);
            let acc = accumulate(
                &spec,
                &x,
                &d,
                batch_pairs,
                w_d,
                ctx.as_ref().map(|c| (c, cfg.tau)),
                &mut grad,
            );
            l_d += acc.l_d;
            l_c.get_or_insert(acc.l_c);
            skipped += acc.skipped;
            for i in 0..n {
                let r = i * len..(i + 1) * len;
                spec.riemannian_gradient_raw(&x[r.clone()], &mut grad[r.clone()]);
                spec.exp_map_raw(&x[r.clone()], &grad[r.clone()], -lr, &mut next[r]);
            }
            std::mem::swap(&mut x, &mut next);
        }
        let l_c = l_c.unwrap_or(0.0);
        if !l_d.is_finite() || !l_c.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(numeric_abort(epoch, lr, l_d, l_c, &x, len));
        }
        history.push(EpochRecord {
            epoch,
            l_d,
            l_c,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    emb.set_flat(&x);
    Ok(TrainOutcome {
        embedding: emb,
        history,
        skipped_pairs: skipped,
        forman_computed: signal.is_some(),
    })
}

fn numeric_abort(epoch: usize, lr: f64, l_d: f64, l_c: f64, x: &[f64], len: usize) -> Error {
    let bad: Vec<usize> = x
        .chunks_exact(len)
        .enumerate()
        .filter(|(_, p)| p.iter().any(|v| !v.is_finite()))
        .map(|(i, _)| i)
        .collect();
    let state = format!(
        "epoch={epoch} lr={lr} L_d={l_d} L_c={l_c} non_finite_nodes={} first={:?}",
        bad.len(),
        bad.iter().take(10).collect::<Vec<_>>()
    );
    Error::NumericAbort {
        epoch,
        reason: "non-finite loss or coordinates".into(),
        state,
    }
}
