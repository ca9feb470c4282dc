//! Evaluation of trained embeddings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_apsp, DistanceMatrix, FormanSignal, Graph, UNREACHABLE};
use crate::manifold::{annular_volume, FactorKind};
use crate::optim::{forman_signal, Embedding};

/// Mean of `|1 - d_M(i, j) / d_G(i, j)|` over connected unordered pairs,
/// with the number of pairs used.
pub fn avg_distance_distortion(emb: &Embedding, d: &DistanceMatrix) -> Result<(f64, usize)> {
    if d.n() != emb.n() {
        return Err(Error::Shape(format!(
            "graph has {} nodes, embedding has {}",
            d.n(),
            emb.n()
        )));
    }
    distance_distortion_with(d, |i, j| emb.distance(i, j))
}

/// [`avg_distance_distortion`] for an arbitrary embedded metric.
pub fn distance_distortion_with(
    d: &DistanceMatrix,
    dist: impl Fn(usize, usize) -> f64,
) -> Result<(f64, usize)> {
    let n = d.n();
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            let dg = d.raw(i, j);
            if dg == UNREACHABLE {
                continue;
            }
            sum += (1.0 - dist(i, j) / dg as f64).abs();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Contract("no connected pairs".into()));
    }
    Ok((sum / count as f64, count))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapResult {
    pub value: f64,
    /// Isolated nodes, which have no neighbors to retrieve.
    pub skipped_nodes: usize,
}

/// Mean average precision of graph neighbors ranked by embedded distance.
///
/// For a neighbor `j` of `i`, the retrieved set is every `z != i` with
/// `d(i, z) <= d(i, j)`; ties count as retrieved.
pub fn mean_average_precision(emb: &Embedding, g: &Graph) -> Result<MapResult> {
    if g.n() != emb.n() {
        return Err(Error::Shape(format!(
            "graph has {} nodes, embedding has {}",
            g.n(),
            emb.n()
        )));
    }
    mean_average_precision_with(g, |i, j| emb.distance(i, j))
}

/// [`mean_average_precision`] for an arbitrary embedded metric.
pub fn mean_average_precision_with(
    g: &Graph,
    dist: impl Fn(usize, usize) -> f64,
) -> Result<MapResult> {
    let n = g.n();
    let mut total = 0.0;
    let mut used = 0usize;
    let mut all = Vec::with_capacity(n);
    let mut near = Vec::new();
    for i in 0..n {
        let nb = g.neighbors(i);
        if nb.is_empty() {
            continue;
        }
        all.clear();
        all.extend((0..n).filter(|&z| z != i).map(|z| dist(i, z)));
        all.sort_by(f64::total_cmp);
        near.clear();
        near.extend(nb.iter().map(|&j| dist(i, j as usize)));
        let mut near_sorted = near.clone();
        near_sorted.sort_by(f64::total_cmp);
        let mut ap = 0.0;
        for &dij in &near {
            let retrieved = all.partition_point(|&x| x <= dij);
            let hits = near_sorted.partition_point(|&x| x <= dij);
            ap += hits as f64 / retrieved as f64;
        }
        total += ap / nb.len() as f64;
        used += 1;
    }
    if used == 0 {
        return Err(Error::Contract("graph has no edges".into()));
    }
    Ok(MapResult {
        value: total / used as f64,
        skipped_nodes: n - used,
    })
}

/// `(1/n) sum_i |F_i - R_i| / (|F_i| + 1)` with `R_i` the Forman value
/// encoded by the radial coordinate. `None` without a radial factor.
pub fn avg_curvature_distortion(emb: &Embedding, f: &FormanSignal) -> Result<Option<f64>> {
    if emb.shift.is_none() || !emb.spec.has_rotsym() {
        return Ok(None);
    }
    if f.node_values.len() != emb.n() {
        return Err(Error::Shape(
            "Forman signal and embedding sizes differ".into(),
        ));
    }
    let n = emb.n();
    let mut sum = 0.0;
    for (i, &fi) in f.node_values.iter().enumerate() {
        let Some(rec) = emb.reconstructed_curvature(i) else {
            return Ok(None);
        };
        sum += (fi - rec).abs() / (fi.abs() + 1.0);
    }
    Ok(Some(sum / n as f64))
}

/// Population variance of node Forman values.
pub fn forman_variance(f: &FormanSignal) -> f64 {
    population_variance(&f.node_values)
}

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn population_variance(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

/// `(1/n) sum_i |t_i - e_i| / (t_i + 1)`.
pub fn avg_triangle_distortion(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::Shape(format!(
            "{} true counts, {} estimates",
            truth.len(),
            estimate.len()
        )));
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    let s: f64 = truth
        .iter()
        .zip(estimate)
        .map(|(t, e)| (t - e).abs() / (t + 1.0))
        .sum();
    Ok(s / truth.len() as f64)
}

/// Graph ball sizes and annular manifold volumes per node, each divided by
/// its maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeMatch {
    pub graph: Vec<f64>,
    pub manifold: Vec<f64>,
}

/// Compares `|{j : d_G(i, j) <= rho}|` with the volume of the annular region
/// of radius `rho` around each embedded node. Requires the space `h3,rot`
/// with unit scales.
pub fn volume_match(emb: &Embedding, g: &Graph, rho: f64) -> Result<VolumeMatch> {
    let factors = emb.spec.factors();
    let shape_ok = factors.len() == 2
        && factors.iter().all(|f| f.scale == 1.0)
        && factors.iter().any(|f| f.kind == FactorKind::Hyperbolic(3))
        && emb.spec.has_rotsym();
    if !shape_ok {
        return Err(Error::Contract(format!(
            "volume matching needs h3,rot with unit scales, got {}",
            emb.spec
        )));
    }
    if g.n() != emb.n() {
        return Err(Error::Shape("graph and embedding sizes differ".into()));
    }
    if g.n() == 0 {
        return Err(Error::Domain("empty graph".into()));
    }
    let alpha = emb
        .spec
        .alpha()
        .ok_or_else(|| Error::Contract("radial factor alpha is unresolved".into()))?;
    let d = bfs_apsp(g);
    let graph: Vec<f64> = (0..g.n())
        .map(|i| {
            d.row(i)
                .iter()
                .filter(|&&x| x != UNREACHABLE && f64::from(x) <= rho)
                .count() as f64
        })
        .collect();
    let manifold = (0..g.n())
        .map(|i| annular_volume(alpha, 3, emb.radius(i).unwrap_or(0.0), rho))
        .collect::<Result<Vec<_>>>()?;
    Ok(VolumeMatch {
        graph: max_normalized(graph),
        manifold: max_normalized(manifold),
    })
}

fn max_normalized(mut v: Vec<f64>) -> Vec<f64> {
    let m = v.iter().copied().fold(0.0, f64::max);
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
    }
    v
}

/// Ranks starting at 1, ties receiving their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut e = k;
        while e + 1 < idx.len() && x[idx[e + 1]] == x[idx[k]] {
            e += 1;
        }
        let r = (k + e) as f64 / 2.0 + 1.0;
        for &i in &idx[k..=e] {
            ranks[i] = r;
        }
        k = e + 1;
    }
    ranks
}

/// Pearson correlation; `NaN` if either input is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Shape(
            "spearman needs two equal-length samples of size >= 2".into(),
        ));
    }
    Ok(pearson(&average_ranks(a), &average_ranks(b)))
}

/// Flat evaluation summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub ad_d: f64,
    pub map: f64,
    pub ad_c: Option<f64>,
    pub forman_variance: f64,
    pub ad_triangle: Option<f64>,
    pub n_pairs_used: usize,
    pub notes: Vec<String>,
}

/// Computes distance distortion, mAP, curvature distortion (with a radial
/// factor) and the Forman variance of `g`.
pub fn evaluate(emb: &Embedding, g: &Graph) -> Result<EvalReport> {
    if g.n() != emb.n() {
        return Err(Error::Shape(format!(
            "graph has {} nodes, embedding has {}",
            g.n(),
            emb.n()
        )));
    }
    let d = bfs_apsp(g);
    let (ad_d, n_pairs_used) = avg_distance_distortion(emb, &d)?;
    let map = mean_average_precision(emb, g)?;
    let f = forman_signal(g, emb.provenance.gamma, emb.provenance.normalize_forman);
    let ad_c = avg_curvature_distortion(emb, &f)?;
    let mut notes = vec![
        format!("manifold={}", emb.spec),
        format!("forman_gamma={}", emb.provenance.gamma),
        "scale_mode=fixed".to_string(),
    ];
    if emb.provenance.normalize_forman {
        notes.push("forman=max_degree_normalized".into());
    }
    if map.skipped_nodes > 0 {
        notes.push(format!("map_skipped_isolated_nodes={}", map.skipped_nodes));
    }
    if ad_c.is_some() {
        notes.push("ad_c_reconstruction=R_alpha(r)+min_F-delta_hat".into());
    }
    Ok(EvalReport {
        ad_d,
        map: map.value,
        ad_c,
        forman_variance: forman_variance(&f),
        ad_triangle: None,
        n_pairs_used,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{forman, generators};

    fn line_distortion(scale: f64) -> f64 {
        let g = generators::path(3);
        let d = bfs_apsp(&g);
        distance_distortion_with(&d, |i, j| scale * (i as f64 - j as f64).abs())
            .unwrap()
            .0
    }

    #[test]
    fn distortion_examples() {
        assert_eq!(line_distortion(1.0), 0.0);
        assert_eq!(line_distortion(2.0), 1.0);
    }

    #[test]
    fn perfect_retrieval() {
        let g = generators::cycle(8);
        let pos: Vec<f64> = (0..8)
            .map(|i| i as f64 * std::f64::consts::TAU / 8.0)
            .collect();
        let chord = |i: usize, j: usize| {
            let (a, b) = (pos[i], pos[j]);
            ((a.cos() - b.cos()).powi(2) + (a.sin() - b.sin()).powi(2)).sqrt()
        };
        let m = mean_average_precision_with(&g, chord).unwrap();
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn star_retrieval_by_hand() {
        // center 0 far away, leaves 1..3 close together
        let g = generators::star(3);
        let x: [f64; 4] = [10.0, 0.0, 0.1, 0.3];
        let m = mean_average_precision_with(&g, |i, j| (x[i] - x[j]).abs()).unwrap();
        // center: every leaf retrieved with all 3 candidates at distance <= 10 -> AP 1.
        // leaf 1: center is the farthest, R = {2, 3, 0}, precision 1/3.
        // leaf 2: R = {1, 3, 0}, 1/3. leaf 3: R = {2, 1, 0}, 1/3.
        let expect = (1.0 + 3.0 * (1.0 / 3.0)) / 4.0;
        assert!((m.value - expect).abs() < 1e-15);
    }

    #[test]
    fn isolated_nodes_are_skipped() {
        let g = Graph::from_edges(3, [(0, 1)]);
        let m = mean_average_precision_with(&g, |i, j| (i as f64 - j as f64).abs()).unwrap();
        assert_eq!(m.skipped_nodes, 1);
    }

    #[test]
    fn variance_and_triangle_examples() {
        assert_eq!(forman_variance(&forman(&generators::complete(3), 1.0)), 0.0);
        assert_eq!(population_variance(&[0.0, 2.0]), 1.0);
        assert_eq!(
            avg_triangle_distortion(&[2.0, 5.0], &[2.0, 5.0]).unwrap(),
            0.0
        );
        assert_eq!(avg_triangle_distortion(&[1.0; 4], &[0.0; 4]).unwrap(), 0.5);
        assert!(avg_triangle_distortion(&[1.0], &[]).is_err());
    }

    #[test]
    fn spearman_ties_and_sign() {
        assert_eq!(
            average_ranks(&[3.0, 1.0, 3.0, 2.0]),
            vec![3.5, 1.0, 3.5, 2.0]
        );
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&a, &[10.0, 20.0, 25.0, 100.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&a, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn report_keys_are_fixed() {
        let r = EvalReport {
            ad_d: 0.1,
            map: 0.9,
            ad_c: None,
            forman_variance: 2.0,
            ad_triangle: None,
            n_pairs_used: 3,
            notes: vec![],
        };
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        for k in [
            "ad_d",
            "map",
            "ad_c",
            "forman_variance",
            "ad_triangle",
            "n_pairs_used",
            "notes",
        ] {
            assert!(keys.contains(&k));
        }
        assert!(v["ad_c"].is_null());
    }
}
