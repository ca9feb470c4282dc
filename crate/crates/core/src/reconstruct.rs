//! Graph reconstruction from embedded points.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{node_forman, triangle_counts, Graph};
use crate::optim::Embedding;

/// Threshold graph: `(i, j)` is an edge iff `d(y_i, y_j) <= rho`.
pub fn nn_graph(emb: &Embedding, rho: f64) -> Graph {
    nn_graph_with(emb.n(), |i, j| emb.distance(i, j), rho)
}

/// [`nn_graph`] for an arbitrary metric on `0..n`.
pub fn nn_graph_with(n: usize, dist: impl Fn(usize, usize) -> f64 + Sync, rho: f64) -> Graph {
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).filter(|&j| dist(i, j) <= rho).collect())
        .collect();
    let edges = rows
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().map(move |&j| (i, j)));
    Graph::from_edges(n, edges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdChoice {
    pub rho: f64,
    /// Mismatched adjacency entries in the validation rows at `rho`.
    pub validation_mismatch: usize,
    /// Sorted validation node indices.
    pub validation: Vec<usize>,
}

/// Picks the threshold that minimizes mismatched adjacency entries in the
/// rows of a random validation node set.
pub fn tune_threshold(
    emb: &Embedding,
    g_true: &Graph,
    val_fraction: f64,
    seed: u64,
) -> Result<ThresholdChoice> {
    if g_true.n() != emb.n() {
        return Err(Error::Shape("graph and embedding sizes differ".into()));
    }
    tune_threshold_with(g_true, |i, j| emb.distance(i, j), val_fraction, seed)
}

/// Validation node set used by [`tune_threshold`].
pub fn validation_nodes(n: usize, val_fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::Domain(format!(
            "validation fraction must be in (0, 1), got {val_fraction}"
        )));
    }
    let k = (val_fraction * n as f64).round() as usize;
    if k == 0 {
        return Err(Error::Domain("validation set is empty".into()));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx.truncate(k);
    idx.sort_unstable();
    Ok(idx)
}

/// [`tune_threshold`] for an arbitrary metric.
///
/// Every threshold between two consecutive candidate distances gives the
/// same reconstruction, so only midpoints are tried, plus half the smallest
/// and twice the largest candidate. Ties go to the smaller threshold.
pub fn tune_threshold_with(
    g_true: &Graph,
    dist: impl Fn(usize, usize) -> f64,
    val_fraction: f64,
    seed: u64,
) -> Result<ThresholdChoice> {
    let n = g_true.n();
    let validation = validation_nodes(n, val_fraction, seed)?;
    let mut entries: Vec<(f64, bool)> = Vec::with_capacity(validation.len() * n);
    for &i in &validation {
        for j in (0..n).filter(|&j| j != i) {
            entries.push((dist(i, j), g_true.has_edge(i, j)));
        }
    }
    if entries.is_empty() {
        return Err(Error::Domain("no candidate pairs".into()));
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    // nothing predicted: every true edge is missed
    let mut mismatch = entries.iter().filter(|e| e.1).count();
    let d_min = entries[0].0;
    let mut best = if d_min > 0.0 {
        Some((mismatch, 0.5 * d_min))
    } else {
        None
    };
    let mut k = 0;
    while k < entries.len() {
        let c = entries[k].0;
        while k < entries.len() && entries[k].0 == c {
            if entries[k].1 {
                mismatch -= 1;
            } else {
                mismatch += 1;
            }
            k += 1;
        }
        let rho = if k < entries.len() {
            0.5 * (c + entries[k].0)
        } else if c > 0.0 {
            2.0 * c
        } else {
            1.0
        };
        if best.is_none_or(|(m, _)| mismatch < m) {
            best = Some((mismatch, rho));
        }
    }
    let (validation_mismatch, rho) = best.expect("at least one candidate");
    Ok(ThresholdChoice {
        rho,
        validation_mismatch,
        validation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleEstimate {
    /// Estimates from the curvature identity; may be negative.
    pub raw: Vec<f64>,
    /// `raw` clamped at zero.
    pub clamped: Vec<f64>,
    /// Exact triangle counts of the threshold graph itself.
    pub nn_only: Vec<f64>,
}

/// Per-node triangle counts implied by the curvature each embedded point
/// encodes: `6 gamma #(i) = d(i) R(y_i) - sum_{j ~ i} (4 - d(i) - d(j))`,
/// degrees taken in `a_rho`.
pub fn estimate_triangles(emb: &Embedding, a_rho: &Graph, gamma: f64) -> Result<TriangleEstimate> {
    if a_rho.n() != emb.n() {
        return Err(Error::Shape("graph and embedding sizes differ".into()));
    }
    let curvature = (0..emb.n())
        .map(|i| emb.reconstructed_curvature(i))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| {
            Error::Contract("embedding has no radial factor or shift constants".into())
        })?;
    estimate_triangles_from(a_rho, &curvature, gamma)
}

/// [`estimate_triangles`] from explicit node curvatures.
pub fn estimate_triangles_from(
    a_rho: &Graph,
    curvature: &[f64],
    gamma: f64,
) -> Result<TriangleEstimate> {
    if curvature.len() != a_rho.n() {
        return Err(Error::Shape("one curvature value per node required".into()));
    }
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let raw: Vec<f64> = (0..a_rho.n())
        .map(|i| {
            let di = a_rho.degree(i) as f64;
            let s: f64 = a_rho
                .neighbors(i)
                .iter()
                .map(|&j| 4.0 - di - a_rho.degree(j as usize) as f64)
                .sum();
            (di * curvature[i] - s) / (6.0 * gamma)
        })
        .collect();
    let clamped = raw.iter().map(|&v| v.max(0.0)).collect();
    let nn_only = triangle_counts(a_rho)
        .per_node
        .iter()
        .map(|&t| t as f64)
        .collect();
    Ok(TriangleEstimate {
        raw,
        clamped,
        nn_only,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrectionAction {
    /// Re-threshold the node's edges at `rho + step`.
    Densify,
    /// Re-threshold the node's edges at `rho - step`.
    Sparsify,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionEntry {
    pub node: usize,
    pub action: CorrectionAction,
    pub edges_changed: usize,
    /// Curvature error summed over the affected nodes before and after.
    pub local_err_before: f64,
    pub local_err_after: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub rho: f64,
    pub graph: Graph,
    /// Edge symmetric difference to the true graph, when known.
    pub mismatch: Option<usize>,
    pub correction_log: Vec<CorrectionEntry>,
}

impl ReconstructionResult {
    pub fn plain(rho: f64, graph: Graph) -> Self {
        Self {
            rho,
            graph,
            mismatch: None,
            correction_log: Vec::new(),
        }
    }

    pub fn compare(mut self, truth: &Graph) -> Self {
        self.mismatch = Some(self.graph.edge_mismatch(truth));
        self
    }
}

/// Percentile with linear interpolation between order statistics.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = p / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Local repair of a threshold graph using the curvature each point
/// encodes.
///
/// With `err_i = |R(y_i) - F_rho(i)|`, nodes whose error lies strictly above
/// the given percentile are visited in decreasing error order. A node whose
/// graph curvature is below its target gets its edges re-thresholded at
/// `rho + step`, otherwise at `rho - step`. The change is kept iff the total
/// error over all nodes whose curvature it affects decreases.
pub fn curvature_correction(
    emb: &Embedding,
    a_rho: &Graph,
    percentile_cut: f64,
    rho: f64,
    step: f64,
) -> Result<ReconstructionResult> {
    if a_rho.n() != emb.n() {
        return Err(Error::Shape("graph and embedding sizes differ".into()));
    }
    let target = (0..emb.n())
        .map(|i| emb.reconstructed_curvature(i))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| {
            Error::Contract("embedding has no radial factor or shift constants".into())
        })?;
    let p = &emb.provenance;
    curvature_correction_with(
        a_rho,
        &target,
        p.gamma,
        p.normalize_forman,
        |i, j| emb.distance(i, j),
        percentile_cut,
        rho,
        step,
    )
}

/// Total curvature error `sum_i |R_i - F(i)|` of a graph.
pub fn curvature_error(g: &Graph, target: &[f64], gamma: f64, normalize: bool) -> f64 {
    (0..g.n())
        .map(|i| (target[i] - node_forman(g.adjacency(), i, gamma, normalize)).abs())
        .sum()
}

/// [`curvature_correction`] on explicit node targets and metric.
#[allow(clippy::too_many_arguments)]
pub fn curvature_correction_with(
    a_rho: &Graph,
    target: &[f64],
    gamma: f64,
    normalize: bool,
    dist: impl Fn(usize, usize) -> f64,
    percentile_cut: f64,
    rho: f64,
    step: f64,
) -> Result<ReconstructionResult> {
    if !(percentile_cut > 0.0 && percentile_cut < 100.0) {
        return Err(Error::Domain(format!(
            "percentile must be in (0, 100), got {percentile_cut}"
        )));
    }
    if target.len() != a_rho.n() {
        return Err(Error::Shape("one target per node required".into()));
    }
    let (adj, log) = correct(
        a_rho.adjacency().to_vec(),
        target,
        (gamma, normalize),
        dist,
        percentile_cut,
        rho,
        step,
    );
    Ok(ReconstructionResult {
        rho,
        graph: Graph::from_adjacency(adj, a_rho.labels().to_vec()),
        mismatch: None,
        correction_log: log,
    })
}

fn correct(
    mut adj: Vec<Vec<u32>>,
    target: &[f64],
    (gamma, normalize): (f64, bool),
    dist: impl Fn(usize, usize) -> f64,
    percentile_cut: f64,
    rho: f64,
    step: f64,
) -> (Vec<Vec<u32>>, Vec<CorrectionEntry>) {
    let n = adj.len();
    let err =
        |adj: &[Vec<u32>], i: usize| (target[i] - node_forman(adj, i, gamma, normalize)).abs();
    let errs: Vec<f64> = (0..n).map(|i| err(&adj, i)).collect();
    let cut = percentile(&errs, percentile_cut);
    let mut order: Vec<usize> = (0..n).filter(|&i| errs[i] > cut).collect();
    order.sort_by(|&a, &b| errs[b].total_cmp(&errs[a]).then(a.cmp(&b)));

    let mut log = Vec::with_capacity(order.len());
    for i in order {
        let diff = target[i] - node_forman(&adj, i, gamma, normalize);
        let (action, threshold) = if diff > 0.0 {
            (CorrectionAction::Densify, rho + step)
        } else {
            (CorrectionAction::Sparsify, rho - step)
        };
        let new_nb: Vec<u32> = (0..n)
            .filter(|&j| j != i && dist(i, j) <= threshold)
            .map(|j| j as u32)
            .collect();
        let toggled = symmetric_difference(&adj[i], &new_nb);
        let mut affected: Vec<u32> = Vec::new();
        for &x in std::iter::once(&(i as u32)).chain(&toggled) {
            affected.push(x);
            affected.extend_from_slice(&adj[x as usize]);
        }
        affected.sort_unstable();
        affected.dedup();

        let before: f64 = affected.iter().map(|&u| err(&adj, u as usize)).sum();
        let old_nb = adj[i].clone();
        set_neighbors(&mut adj, i, &toggled);
        let after: f64 = affected.iter().map(|&u| err(&adj, u as usize)).sum();
        let accepted = !toggled.is_empty() && after < before;
        if !accepted {
            set_neighbors(&mut adj, i, &toggled);
            debug_assert_eq!(adj[i], old_nb);
        }
        log.push(CorrectionEntry {
            node: i,
            action,
            edges_changed: toggled.len(),
            local_err_before: before,
            local_err_after: after,
            accepted,
        });
    }
    (adj, log)
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Toggles the edges `(i, j)` for every `j` in `toggled`.
fn set_neighbors(adj: &mut [Vec<u32>], i: usize, toggled: &[u32]) {
    for &j in toggled {
        toggle(&mut adj[i], j);
        toggle(&mut adj[j as usize], i as u32);
    }
}

fn toggle(list: &mut Vec<u32>, x: u32) {
    match list.binary_search(&x) {
        Ok(pos) => {
            list.remove(pos);
        }
        Err(pos) => list.insert(pos, x),
    }
}
