//! Undirected, unweighted graphs and their combinatorial invariants.

mod apsp;
mod curvature;
pub mod generators;

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub use apsp::{bfs_apsp, connected_pairs, DistanceMatrix, UNREACHABLE};
pub(crate) use curvature::node_forman;
pub use curvature::{
    forman, forman_dirichlet_energy, forman_max_degree_normalized, triangle_counts, FormanSignal,
    TriangleCounts,
};

/// Simple undirected graph on nodes `0..n`.
///
/// Neighbor lists are sorted and free of duplicates and self-loops.
/// `labels[i]` is the identifier node `i` had in its source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    labels: Vec<i64>,
}

/// Result of parsing an edge list.
#[derive(Debug, Clone)]
pub struct LoadReport {
    pub graph: Graph,
    pub duplicates_dropped: usize,
    pub self_loops_dropped: usize,
}

impl Graph {
    /// Builds a graph from an edge iterator, silently dropping self-loops and
    /// repeated edges. Labels default to the node indices.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::build(n, edges, None).0
    }

    fn build(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        labels: Option<Vec<i64>>,
    ) -> (Self, usize, usize) {
        let mut adj = vec![Vec::new(); n];
        let mut loops = 0;
        let mut total = 0;
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a},{b}) out of range for n={n}");
            if a == b {
                loops += 1;
                continue;
            }
            total += 1;
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        for nb in adj.iter_mut() {
            nb.sort_unstable();
            nb.dedup();
        }
        let kept: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let labels = labels.unwrap_or_else(|| (0..n as i64).collect());
        (Graph { adj, labels }, total - kept, loops)
    }

    /// Takes sorted, duplicate-free, symmetric neighbor lists as they are.
    pub(crate) fn from_adjacency(adj: Vec<Vec<u32>>, labels: Vec<i64>) -> Self {
        debug_assert_eq!(adj.len(), labels.len());
        Graph { adj, labels }
    }

    pub(crate) fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, std::iter::empty())
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Self {
        assert_eq!(labels.len(), self.adj.len());
        self.labels = labels;
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adj[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, nb)| {
            nb.iter()
                .map(move |&j| (i, j as usize))
                .filter(|&(i, j)| i < j)
        })
    }

    /// Number of unordered pairs on which the edge sets of two graphs on the
    /// same node set disagree.
    pub fn edge_mismatch(&self, other: &Graph) -> usize {
        assert_eq!(self.n(), other.n());
        let missing = |x: &Graph, y: &Graph| x.edges().filter(|&(i, j)| !y.has_edge(i, j)).count();
        missing(self, other) + missing(other, self)
    }

    /// Parses the whitespace edge-list format. Lines starting with `#` or `%`
    /// are comments; node ids are remapped densely in first-appearance order.
    pub fn load_edge_list(reader: impl BufRead) -> Result<LoadReport> {
        let mut ids: HashMap<i64, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut edges = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
                continue;
            }
            let mut tok = t.split_whitespace();
            let mut next_id = |what: &str| -> Result<i64> {
                let s = tok
                    .next()
                    .ok_or_else(|| Error::parse(lineno, format!("missing {what} node id")))?;
                s.parse::<i64>()
                    .map_err(|_| Error::parse(lineno, format!("invalid node id {s:?}")))
            };
            let a = next_id("first")?;
            let b = next_id("second")?;
            let mut intern = |x: i64| {
                *ids.entry(x).or_insert_with(|| {
                    labels.push(x);
                    labels.len() - 1
                })
            };
            let ia = intern(a);
            let ib = intern(b);
            edges.push((ia, ib));
        }
        let n = labels.len();
        let (graph, duplicates_dropped, self_loops_dropped) = Self::build(n, edges, Some(labels));
        Ok(LoadReport {
            graph,
            duplicates_dropped,
            self_loops_dropped,
        })
    }

    pub fn parse_edge_list(text: &str) -> Result<LoadReport> {
        Self::load_edge_list(text.as_bytes())
    }

    /// Writes one `label label` line per edge. Isolated nodes are not
    /// representable in this format and are lost.
    pub fn write_edge_list(&self, mut w: impl Write) -> std::io::Result<()> {
        for (i, j) in self.edges() {
            writeln!(w, "{} {}", self.labels[i], self.labels[j])?;
        }
        Ok(())
    }

    /// Graph induced by a node permutation: node `i` of the result is node
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let n = self.n();
        assert_eq!(perm.len(), n);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let edges = self.edges().map(|(a, b)| (inv[a], inv[b]));
        let labels = perm.iter().map(|&p| self.labels[p]).collect();
        Graph::from_edges(n, edges).with_labels(labels)
    }
}

pub(crate) fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}
