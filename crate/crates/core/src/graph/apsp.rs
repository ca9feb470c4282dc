use std::collections::VecDeque;

use rayon::prelude::*;

use super::Graph;

/// Marker stored for pairs in different connected components.
pub const UNREACHABLE: u16 = u16::MAX;

/// Dense matrix of hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u16>,
}

impl DistanceMatrix {
    pub fn from_raw(n: usize, data: Vec<u16>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Hop distance, or `None` if `i` and `j` are disconnected.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<u16> {
        match self.data[i * self.n + j] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> u16 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_connected(&self) -> bool {
        !self.data.contains(&UNREACHABLE)
    }

    /// Largest finite distance.
    pub fn diameter(&self) -> u16 {
        self.data
            .iter()
            .copied()
            .filter(|&d| d != UNREACHABLE)
            .max()
            .unwrap_or(0)
    }
}

/// All-pairs hop distances by one breadth-first search per source.
///
/// Rows are independent, so the searches run in parallel; the result does
/// not depend on scheduling.
pub fn bfs_apsp(g: &Graph) -> DistanceMatrix {
    let n = g.n();
    assert!(
        n < UNREACHABLE as usize,
        "graph too large for 16-bit hop counts"
    );
    let mut data = vec![UNREACHABLE; n * n];
    if n == 0 {
        return DistanceMatrix { n, data };
    }
    data.par_chunks_mut(n).enumerate().for_each(|(src, row)| {
        let mut queue = VecDeque::new();
        row[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = row[u];
            for &v in g.neighbors(u) {
                let v = v as usize;
                if row[v] == UNREACHABLE {
                    row[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
    });
    DistanceMatrix { n, data }
}

/// Unordered pairs `(i, j)`, `i < j`, lying in the same component.
pub fn connected_pairs(d: &DistanceMatrix) -> Vec<(u32, u32)> {
    let n = d.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if d.raw(i, j) != UNREACHABLE {
                out.push((i as u32, j as u32));
            }
        }
    }
    out
}
