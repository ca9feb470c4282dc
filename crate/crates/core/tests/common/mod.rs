//! Shared instance builders and brute-force oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use hetembed::graph::{forman, generators, Graph};
use hetembed::manifold::{sample_ball, FactorKind, ManifoldSpec, Point};
use hetembed::optim::{resolve_radial, Embedding, Provenance, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    generators::gnp(n, p, &mut rng(seed))
}

/// Random graph with a spanning path, so it is connected.
pub fn connected_graph(n: usize, p: f64, seed: u64) -> Graph {
    let g = random_graph(n, p, seed);
    let edges = g.edges().chain((1..n).map(|i| (i - 1, i)));
    Graph::from_edges(n, edges)
}

/// Shortest-path lengths by Floyd-Warshall; `None` when unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let n = g.n();
    let mut d = vec![vec![None; n]; n];
    for i in 0..n {
        d[i][i] = Some(0);
        for &j in g.neighbors(i) {
            d[i][j as usize] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// mAP by direct enumeration of the retrieved set of every edge.
pub fn brute_force_map(g: &Graph, dist: impl Fn(usize, usize) -> f64) -> Option<f64> {
    let n = g.n();
    let mut total = 0.0;
    let mut used = 0usize;
    for i in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&j| g.has_edge(i, j)).collect();
        if nb.is_empty() {
            continue;
        }
        let mut ap = 0.0;
        for &j in &nb {
            let retrieved: Vec<usize> = (0..n)
                .filter(|&k| k != i && dist(i, k) <= dist(i, j))
                .collect();
            let hits = retrieved.iter().filter(|&&k| g.has_edge(i, k)).count();
            ap += hits as f64 / retrieved.len() as f64;
        }
        total += ap / nb.len() as f64;
        used += 1;
    }
    (used > 0).then(|| total / used as f64)
}

/// Largest clique by enumerating every vertex subset (`n <= 20`).
pub fn exhaustive_clique(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 20);
    let masks: Vec<u32> = (0..n)
        .map(|i| g.neighbors(i).iter().fold(0u32, |m, &j| m | 1 << j))
        .collect();
    let mut best = 0;
    for s in 0u32..(1 << n) {
        let size = s.count_ones() as usize;
        if size <= best {
            continue;
        }
        let ok = (0..n)
            .filter(|&i| s >> i & 1 == 1)
            .all(|i| s & !(1 << i) & !masks[i] == 0);
        if ok {
            best = size;
        }
    }
    best
}

/// Random point with every space-form block at tangent distance at most
/// `spread` from the base point; radii uniform on `radial`.
pub fn random_point(
    spec: &ManifoldSpec,
    spread: f64,
    radial: (f64, f64),
    rng: &mut impl Rng,
) -> Point {
    let base = spec.base_point();
    let mut v = vec![0.0; spec.coord_len()];
    for (f, r) in spec.blocks() {
        let w = &mut v[r];
        match f.kind {
            FactorKind::Euclidean(_) => sample_ball(rng, spread, w),
            FactorKind::Sphere(_) | FactorKind::Hyperbolic(_) => {
                let d = w.len() - 1;
                sample_ball(rng, spread, &mut w[..d]);
            }
            FactorKind::RotSym(_) => {}
        }
    }
    let mut p = base.clone();
    spec.exp_map_raw(&base.0, &v, 1.0, &mut p.0);
    if let Some((_, idx)) = spec.rotsym() {
        p.0[idx] = rng.random_range(radial.0..radial.1);
    }
    p
}

/// Embedding with random points; a radial factor gets its `alpha` and shift
/// constants resolved from the Forman signal of `g`.
pub fn random_embedding(
    spec: &str,
    g: &Graph,
    cfg: &TrainConfig,
    spread: f64,
    seed: u64,
) -> Embedding {
    let spec: ManifoldSpec = spec.parse().unwrap();
    let (spec, shift) = if spec.has_rotsym() {
        let f = forman(g, cfg.gamma);
        let (s, sh) = resolve_radial(&spec, g, &f, cfg).unwrap();
        (s, Some(sh))
    } else {
        (spec, None)
    };
    let mut r = rng(seed);
    let points = (0..g.n())
        .map(|_| random_point(&spec, spread, (0.2, 1.5), &mut r))
        .collect();
    Embedding {
        spec,
        points,
        shift,
        provenance: Provenance {
            seed,
            epochs: 0,
            config_digest: cfg.digest(),
            gamma: cfg.gamma,
            normalize_forman: cfg.normalize_forman,
        },
    }
}
