use super::{sorted_intersection_len, Graph};

/// Triangle counts per edge and per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleCounts {
    /// Edges `(i, j)` with `i < j`, in [`Graph::edges`] order.
    pub edges: Vec<(u32, u32)>,
    /// Triangles containing each edge, aligned with `edges`.
    pub per_edge: Vec<u32>,
    /// Triangles containing each node.
    pub per_node: Vec<u64>,
}

impl TriangleCounts {
    pub fn total(&self) -> u64 {
        self.per_node.iter().sum::<u64>() / 3
    }
}

pub fn triangle_counts(g: &Graph) -> TriangleCounts {
    let mut edges = Vec::with_capacity(g.num_edges());
    let mut per_edge = Vec::with_capacity(g.num_edges());
    // each triangle at i is seen once from each of its two edges at i
    let mut twice = vec![0u64; g.n()];
    for (i, j) in g.edges() {
        let t = sorted_intersection_len(g.neighbors(i), g.neighbors(j)) as u32;
        edges.push((i as u32, j as u32));
        per_edge.push(t);
        twice[i] += u64::from(t);
        twice[j] += u64::from(t);
    }
    let per_node = twice.into_iter().map(|t| t / 2).collect();
    TriangleCounts {
        edges,
        per_edge,
        per_node,
    }
}

/// Augmented Forman curvature of every edge and node.
#[derive(Debug, Clone, PartialEq)]
pub struct FormanSignal {
    pub gamma: f64,
    /// Aligned with `triangles.edges`.
    pub edge_values: Vec<f64>,
    /// Degree average of incident edge values; `0` on isolated nodes.
    pub node_values: Vec<f64>,
    pub triangles: TriangleCounts,
}

impl FormanSignal {
    /// `(min, max)` of node values over non-isolated nodes.
    pub fn range(&self, g: &Graph) -> Option<(f64, f64)> {
        self.node_values
            .iter()
            .enumerate()
            .filter(|&(i, _)| g.degree(i) > 0)
            .map(|(_, &v)| v)
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }
}

/// `F(i,j) = 4 - d_i - d_j + 3 gamma #tri(i,j)` on edges, averaged over
/// incident edges on nodes.
pub fn forman(g: &Graph, gamma: f64) -> FormanSignal {
    forman_impl(g, gamma, false)
}

/// Like [`forman`], with each edge value divided by the larger degree of
/// its endpoints.
pub fn forman_max_degree_normalized(g: &Graph, gamma: f64) -> FormanSignal {
    forman_impl(g, gamma, true)
}

fn forman_impl(g: &Graph, gamma: f64, normalize: bool) -> FormanSignal {
    assert!(gamma > 0.0, "gamma must be positive");
    let triangles = triangle_counts(g);
    let mut sums = vec![0.0; g.n()];
    let edge_values: Vec<f64> = triangles
        .edges
        .iter()
        .zip(&triangles.per_edge)
        .map(|(&(i, j), &t)| {
            let (i, j) = (i as usize, j as usize);
            let (di, dj) = (g.degree(i) as f64, g.degree(j) as f64);
            let mut f = 4.0 - di - dj + 3.0 * gamma * f64::from(t);
            if normalize {
                f /= di.max(dj);
            }
            sums[i] += f;
            sums[j] += f;
            f
        })
        .collect();
    let node_values = sums
        .into_iter()
        .enumerate()
        .map(|(i, s)| match g.degree(i) {
            0 => 0.0,
            d => s / d as f64,
        })
        .collect();
    FormanSignal {
        gamma,
        edge_values,
        node_values,
        triangles,
    }
}

/// Node Forman value of a single node, computed from scratch.
pub(crate) fn node_forman(adj: &[Vec<u32>], i: usize, gamma: f64, normalize: bool) -> f64 {
    let nb = &adj[i];
    if nb.is_empty() {
        return 0.0;
    }
    let di = nb.len() as f64;
    let s: f64 = nb
        .iter()
        .map(|&j| {
            let other = &adj[j as usize];
            let t = sorted_intersection_len(nb, other) as f64;
            let dj = other.len() as f64;
            let f = 4.0 - di - dj + 3.0 * gamma * t;
            if normalize {
                f / di.max(dj)
            } else {
                f
            }
        })
        .sum();
    s / di
}

/// `1/2 * sum over edges of (F_i / sqrt(d_i) - F_j / sqrt(d_j))^2`.
pub fn forman_dirichlet_energy(g: &Graph, f: &FormanSignal) -> f64 {
    let norm = |i: usize| f.node_values[i] / (g.degree(i) as f64).sqrt();
    0.5 * g
        .edges()
        .map(|(i, j)| (norm(i) - norm(j)).powi(2))
        .sum::<f64>()
}
